//! A bounded machine run laid out on an `n`-board: node rows hold
//! successive configurations, row cells carry the pair of neighbouring
//! node configurations, column cells carry the `(u, v, w)` triple read
//! from the node below.

use rand::Rng;
use rayon::prelude::*;

use super::{local_transition, run_bounded, CellConfig, RunOutcome, TuringMachine};
use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::geometry::BoardSpec;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Node(CellConfig),
    /// On a row between two nodes: (left node, right node).
    Pair(CellConfig, CellConfig),
    /// On a column between two nodes: the lower node and its neighbours;
    /// `None` past the board edge.
    Triple(Option<CellConfig>, CellConfig, Option<CellConfig>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superimposed {
    pub n: u32,
    pub side: u64,
    /// Row-major, bottom row first; `None` off the board.
    cells: Vec<Option<Layer>>,
    pub column_bits: Vec<bool>,
}

impl Superimposed {
    /// 1-based coordinates.
    pub fn get(&self, x: u64, y: u64) -> Option<Layer> {
        if x == 0 || y == 0 || x > self.side || y > self.side {
            return None;
        }
        self.cells[((y - 1) * self.side + (x - 1)) as usize]
    }

    fn slot(&mut self, x: u64, y: u64) -> &mut Option<Layer> {
        &mut self.cells[((y - 1) * self.side + (x - 1)) as usize]
    }

    /// Occupied cells, bottom row first.
    pub fn cells(&self) -> impl Iterator<Item = (u64, u64, Layer)> + '_ {
        let side = self.side;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|l| (i as u64 % side + 1, i as u64 / side + 1, l)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Superimposition {
    Pattern(Superimposed),
    Infeasible { halt_step: u64 },
}

/// Lays out the first `4^n` configurations of `m` on input `bits` (one
/// bit per node column, 0 beyond). Infeasible when the machine halts
/// within `4^n` steps.
pub fn board_superimpose(
    m: &TuringMachine,
    b: &BoardSpec,
    bits: &[bool],
) -> Result<Superimposition> {
    let width = b.index.len();
    if bits.len() != width {
        return Err(Error::Precondition(format!(
            "board level {} needs {width} input bits, got {}",
            b.n,
            bits.len()
        )));
    }
    let input = |i: usize| bits.get(i).copied().unwrap_or(false);
    let run = run_bounded(m, &input, width as u64, true);
    if let RunOutcome::Halted(t) = run.outcome {
        return Ok(Superimposition::Infeasible { halt_step: t });
    }
    let sym = |i: usize| m.bit_symbol(input(i));
    let rows: Vec<Vec<CellConfig>> = run.history[..width]
        .iter()
        .map(|c| c.cells(width, &sym))
        .collect();

    let mut s = Superimposed {
        n: b.n,
        side: b.side,
        cells: vec![None; (b.side * b.side) as usize],
        column_bits: bits.to_vec(),
    };
    for (j, &y) in b.index.iter().enumerate() {
        for (i, &x) in b.index.iter().enumerate() {
            *s.slot(x, y) = Some(Layer::Node(rows[j][i]));
            if let Some(&x2) = b.index.get(i + 1) {
                for xx in x + 1..x2 {
                    *s.slot(xx, y) = Some(Layer::Pair(rows[j][i], rows[j][i + 1]));
                }
            }
            if let Some(&y2) = b.index.get(j + 1) {
                let u = i.checked_sub(1).map(|k| rows[j][k]);
                let w = rows[j].get(i + 1).copied();
                for yy in y + 1..y2 {
                    *s.slot(x, yy) = Some(Layer::Triple(u, rows[j][i], w));
                }
            }
        }
    }
    Ok(Superimposition::Pattern(s))
}

/// Configuration seen from a node looking left (`dx = -1`) or right.
fn side_value(s: &Superimposed, x: u64, y: u64, dx: i64) -> std::result::Result<Option<CellConfig>, String> {
    let nx = x as i64 + dx;
    if nx < 1 {
        return Ok(None);
    }
    match s.get(nx as u64, y) {
        None => Ok(None),
        Some(Layer::Node(c)) => Ok(Some(c)),
        Some(Layer::Pair(l, r)) => Ok(Some(if dx < 0 { l } else { r })),
        Some(Layer::Triple(..)) => Err("column cell beside a node".into()),
    }
}

fn check_cell(
    m: &TuringMachine,
    b: &BoardSpec,
    s: &Superimposed,
    x: u64,
    y: u64,
) -> std::result::Result<(), String> {
    let here = s.get(x, y);
    let on_row = b.in_index(y);
    let on_col = b.in_index(x);
    let layer = match (b.is_cell(x, y), here) {
        (false, None) => return Ok(()),
        (false, Some(_)) => return Err("symbol off the board".into()),
        (true, None) => return Err("missing symbol".into()),
        (true, Some(l)) => l,
    };
    match layer {
        Layer::Node(v) => {
            if !(on_row && on_col) {
                return Err("node symbol off a node".into());
            }
            if y == b.index[0] {
                let i = b.index.iter().position(|&c| c == x).expect("node column");
                let want = CellConfig {
                    data: m.bit_symbol(s.column_bits.get(i).copied().unwrap_or(false)),
                    state: (i == 0).then_some(m.initial()),
                };
                if v != want {
                    return Err("bottom row disagrees with the input".into());
                }
            }
            // pickups on the row
            if let Some(Layer::Pair(_, r)) = s.get(x - 1, y) {
                if r != v {
                    return Err("row pair does not pick up the node".into());
                }
            }
            if let Some(Layer::Pair(l, _)) = s.get(x + 1, y) {
                if l != v {
                    return Err("row pair does not pick up the node".into());
                }
            }
            let u = side_value(s, x, y, -1)?;
            let w = side_value(s, x, y, 1)?;
            match s.get(x, y + 1) {
                Some(Layer::Triple(tu, tv, tw)) => {
                    if (tu, tv, tw) != (u, v, w) {
                        return Err("column triple does not pick up the node".into());
                    }
                }
                Some(Layer::Node(above)) => {
                    let next = local_transition(m, u, v, w).map_err(|e| e.to_string())?;
                    if above != next {
                        return Err("node row does not follow the local rule".into());
                    }
                }
                Some(Layer::Pair(..)) => return Err("row cell above a node".into()),
                None => {}
            }
            if let Some(Layer::Triple(tu, tv, tw)) = s.get(x, y - 1) {
                let next = local_transition(m, tu, tv, tw).map_err(|e| e.to_string())?;
                if v != next {
                    return Err("node row does not follow the local rule".into());
                }
            }
        }
        Layer::Pair(..) => {
            if !on_row || on_col {
                return Err("row symbol off a row".into());
            }
            if let Some(l @ Layer::Pair(..)) = s.get(x + 1, y) {
                if l != layer {
                    return Err("row pair changes along the run".into());
                }
            }
        }
        Layer::Triple(..) => {
            if !on_col || on_row {
                return Err("column symbol off a column".into());
            }
            if let Some(l @ Layer::Triple(..)) = s.get(x, y + 1) {
                if l != layer {
                    return Err("column triple changes along the run".into());
                }
            }
        }
    }
    Ok(())
}

/// First local rule broken, as `(x, y, reason)`.
pub fn violation(s: &Superimposed, m: &TuringMachine, b: &BoardSpec) -> Option<(u64, u64, String)> {
    if s.side != b.side || s.n != b.n || s.column_bits.len() != b.index.len() {
        return Some((0, 0, "pattern and board sizes differ".into()));
    }
    (1..=b.side).into_par_iter().find_map_first(|y| {
        (1..=b.side).find_map(|x| check_cell(m, b, s, x, y).err().map(|e| (x, y, e)))
    })
}

/// Purely local check; cells are visited in parallel.
pub fn verify_superimposed(s: &Superimposed, m: &TuringMachine, b: &BoardSpec) -> bool {
    violation(s, m, b).is_none()
}

fn corrupt_config(c: &mut CellConfig, m: &TuringMachine, rng: &mut impl Rng) {
    let k = m.tape().len() as u32;
    let q = m.states().len();
    if rng.gen_bool(0.5) && k > 1 {
        let d = (c.data.0 + rng.gen_range(1..k)) % k;
        c.data = Symbol(d);
    } else {
        // q + 1 choices: no head or one of the states
        let cur = c.state.map_or(0, |s| s + 1);
        let next = (cur + rng.gen_range(1..=q)) % (q + 1);
        c.state = next.checked_sub(1);
    }
}

/// Copy of `s` with one configuration component of one board cell
/// changed to a different value. Returns the cell changed.
pub fn corrupt_one_cell(
    s: &Superimposed,
    m: &TuringMachine,
    rng: &mut impl Rng,
) -> (Superimposed, (u64, u64)) {
    let occupied: Vec<(u64, u64)> = s.cells().map(|(x, y, _)| (x, y)).collect();
    let (x, y) = occupied[rng.gen_range(0..occupied.len())];
    let mut out = s.clone();
    let slot = out.slot(x, y).as_mut().expect("occupied");
    match slot {
        Layer::Node(c) => corrupt_config(c, m, rng),
        Layer::Pair(l, r) => corrupt_config(if rng.gen_bool(0.5) { l } else { r }, m, rng),
        Layer::Triple(u, v, w) => match rng.gen_range(0..3) {
            0 | 2 => {
                let side = if rng.gen_bool(0.5) { u } else { w };
                match side {
                    Some(c) if rng.gen_bool(0.75) => corrupt_config(c, m, rng),
                    Some(_) => *side = None,
                    None => *side = Some(CellConfig::data(m.bit_symbol(rng.gen_bool(0.5)))),
                }
            }
            _ => corrupt_config(v, m, rng),
        },
    }
    (out, (x, y))
}

#[cfg(test)]
mod tests {
    use super::super::samples;
    use super::*;
    use crate::geometry::board;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pattern(m: &TuringMachine, n: u32, bits: &[bool]) -> Superimposition {
        board_superimpose(m, &board(n).unwrap(), bits).unwrap()
    }

    #[test]
    fn walker_rows() {
        let m = samples::walker();
        let b = board(1).unwrap();
        let bits = [true, false, true, true];
        let Superimposition::Pattern(s) = pattern(&m, 1, &bits) else {
            panic!("walker never halts")
        };
        for (j, &y) in b.index.iter().enumerate() {
            for (i, &x) in b.index.iter().enumerate() {
                let Some(Layer::Node(c)) = s.get(x, y) else { panic!() };
                assert_eq!(c.data, m.bit_symbol(bits[i]));
                assert_eq!(c.state.is_some(), i == j);
            }
        }
        assert!(verify_superimposed(&s, &m, &b));
    }

    #[test]
    fn scanner_feasibility() {
        let m = samples::right_scanner();
        assert_eq!(
            pattern(&m, 1, &[true, false, false, false]),
            Superimposition::Infeasible { halt_step: 1 }
        );
        assert!(matches!(
            pattern(&m, 1, &[false; 4]),
            Superimposition::Pattern(_)
        ));
    }

    #[test]
    fn wrong_bit_count() {
        let b = board(1).unwrap();
        assert!(board_superimpose(&samples::walker(), &b, &[true; 3]).is_err());
    }

    #[test]
    fn corruptions_are_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = board(2).unwrap();
        let m = samples::bouncer();
        let bits: Vec<bool> = (0..16).map(|i| i % 3 == 0).collect();
        let Superimposition::Pattern(s) = pattern(&m, 2, &bits) else { panic!() };
        assert!(verify_superimposed(&s, &m, &b));
        for _ in 0..200 {
            let (bad, at) = corrupt_one_cell(&s, &m, &mut rng);
            assert_ne!(bad, s);
            assert!(!verify_superimposed(&bad, &m, &b), "missed corruption at {at:?}");
        }
    }
}

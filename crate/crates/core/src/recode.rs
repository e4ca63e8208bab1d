//! Higher-block recoding of an arbitrary syntax into a one-step syntax.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::csp::Flow;
use crate::error::{Error, Result};
use crate::lattice::{Point, Shape};
use crate::region::{RegionProblem, DEFAULT_NODE_LIMIT};
use crate::syntax::{Mode, Syntax};

/// Output of [`recode_detailed`].
#[derive(Clone, Debug)]
pub struct Recoded {
    /// One-step syntax on `{0,1}^d` over the block alphabet.
    pub syntax: Syntax,
    /// The block box `{0..b_1-1} x ... x {0..b_d-1}`.
    pub window: Shape,
    /// Contents of each block symbol, listed in `window` order.
    pub blocks: Vec<Vec<u32>>,
}

/// Block side per axis: one less than the window extent, at least 1.
pub fn block_sides(s: &Syntax) -> Vec<usize> {
    s.shape().extents().iter().map(|&e| e.saturating_sub(1).max(1)).collect()
}

/// Recodes `s` into a one-step syntax and returns the block window.
///
/// Locally admissible colorings of `{1..n}^d` for the output correspond
/// one to one with locally admissible colorings of `{1..n}^d + window` for
/// the input.
pub fn recode_one_step(s: &Syntax) -> Result<(Syntax, Shape)> {
    let r = recode_detailed(s, DEFAULT_NODE_LIMIT)?;
    Ok((r.syntax, r.window))
}

pub fn recode_detailed(s: &Syntax, node_limit: u64) -> Result<Recoded> {
    let d = s.dim();
    let sides = block_sides(s);
    let hi: Vec<i64> = sides.iter().map(|&b| b as i64 - 1).collect();
    let window = Shape::boxed(&vec![0; d], &hi)?;
    let big_hi: Vec<i64> = sides.iter().map(|&b| b as i64).collect();
    let big = Shape::boxed(&vec![0; d], &big_hi)?;

    let block_prob = RegionProblem::new(s, &window);
    let window_idx: Vec<usize> = window
        .offsets()
        .iter()
        .map(|p| block_prob.cells.get(&p.0).unwrap())
        .collect();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    block_prob.csp.search(node_limit, |v| {
        blocks.push(window_idx.iter().map(|&i| v[i]).collect());
        Flow::Continue
    })?;
    let id: HashMap<&[u32], u32> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.as_slice(), i as u32))
        .collect();

    let unit = Shape::boxed(&vec![0; d], &vec![1; d])?;
    let big_prob = RegionProblem::new(s, &big);
    // For each corner v of the unit cube, where each window cell of block v sits in `big`.
    let corner_cells: Vec<Vec<usize>> = unit
        .offsets()
        .iter()
        .map(|v| {
            window
                .offsets()
                .iter()
                .map(|p| big_prob.cells.get(&(p + v).0).unwrap())
                .collect()
        })
        .collect();
    let mut allowed: Vec<Vec<Symbol>> = Vec::new();
    let mut buf = Vec::new();
    big_prob.csp.search(node_limit, |v| {
        let mut row = Vec::with_capacity(corner_cells.len());
        for cells in &corner_cells {
            buf.clear();
            buf.extend(cells.iter().map(|&i| v[i]));
            row.push(Symbol(id[buf.as_slice()]));
        }
        allowed.push(row);
        Flow::Continue
    })?;

    if blocks.is_empty() {
        // No admissible block at all: keep a placeholder symbol and allow nothing.
        let alphabet = Arc::new(Alphabet::new(["[]"])?);
        let syntax = Syntax::new(alphabet, unit, Mode::Allowed, Vec::new())?;
        return Ok(Recoded {
            syntax,
            window,
            blocks,
        });
    }
    let names: Vec<String> = blocks
        .iter()
        .map(|b| block_name(s.alphabet(), &window, &sides, b))
        .collect();
    let alphabet = Arc::new(Alphabet::new(names).map_err(|e| {
        Error::InvalidDefinition(format!("cannot name recoded blocks: {e}"))
    })?);
    let syntax = Syntax::new(alphabet, unit, Mode::Allowed, allowed)?;
    Ok(Recoded {
        syntax,
        window,
        blocks,
    })
}

/// `[a,b;c,d]`: rows from the top (largest axis-2 coordinate) down.
fn block_name(a: &Alphabet, window: &Shape, sides: &[usize], block: &[u32]) -> String {
    let sym = |p: &Point| a.name(Symbol(block[window.index_of(p).unwrap()])).to_string();
    match sides.len() {
        1 => {
            let cells: Vec<String> = window.offsets().iter().map(sym).collect();
            format!("[{}]", cells.join(","))
        }
        2 => {
            let rows: Vec<String> = (0..sides[1] as i64)
                .rev()
                .map(|y| {
                    (0..sides[0] as i64)
                        .map(|x| sym(&Point::new(vec![x, y])))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            format!("[{}]", rows.join(";"))
        }
        _ => {
            let cells: Vec<String> = window.offsets().iter().map(sym).collect();
            format!("[{}]", cells.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::region::enumerate_locally_admissible;

    #[test]
    fn one_step_input_is_renamed_only() {
        let hs = builtin::hard_squares();
        let r = recode_detailed(&hs, 1 << 20).unwrap();
        assert_eq!(r.blocks, vec![vec![0], vec![1]]);
        let mut a = r.syntax.allowed_windows(100).unwrap();
        let mut b = hs.allowed_windows(100).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(r.syntax.alphabet().names(), ["[0]", "[1]"]);
    }

    #[test]
    fn three_ones_forbidden() {
        let a = Arc::new(Alphabet::numeric(2));
        let s = Syntax::new(
            a,
            Shape::boxed(&[0], &[2]).unwrap(),
            Mode::Forbidden,
            vec![vec![Symbol(1); 3]],
        )
        .unwrap();
        let r = recode_detailed(&s, 1 << 20).unwrap();
        assert_eq!(r.syntax.alphabet().len(), 4);
        let eleven = r.syntax.alphabet().symbol("[1,1]").unwrap();
        assert!(!r.syntax.allows(&[eleven, eleven]));
        // 7 legal 3-words give 7 allowed transitions
        assert_eq!(r.syntax.patterns().len(), 7);
    }

    #[test]
    fn counts_match_minkowski_region() {
        let a = Arc::new(Alphabet::numeric(2));
        let s = Syntax::new(
            a,
            Shape::boxed(&[0], &[2]).unwrap(),
            Mode::Forbidden,
            vec![vec![Symbol(1); 3], vec![Symbol(0), Symbol(1), Symbol(0)]],
        )
        .unwrap();
        let (out, window) = recode_one_step(&s).unwrap();
        for n in 1..=10i64 {
            let fn_ = Shape::cube_from_one(1, n).unwrap();
            let lhs = enumerate_locally_admissible(&out, &fn_, 1 << 24).unwrap().len();
            let sum = fn_.minkowski_sum(&window).unwrap();
            let rhs = enumerate_locally_admissible(&s, &sum, 1 << 24).unwrap().len();
            assert_eq!(lhs, rhs, "n={n}");
        }
    }
}

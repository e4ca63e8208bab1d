//! Two-dimensional substitution rules: block expansion, appearance in
//! blocks, derivation checks and the counting bound for substitutive
//! patterns.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::exact::{log2_biguint, Enclosure};
use crate::lattice::{Pattern, Point};

/// Largest block side that [`expand`] materializes.
pub const MAX_BLOCK_CELLS: usize = 1 << 26;

/// `s: Σ -> Σ^{k x k}`. Images are stored bottom row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    alphabet: Arc<Alphabet>,
    k: usize,
    images: Vec<Vec<u32>>,
}

/// A square block of symbol ids, bottom row first; `(1,1)` is the
/// bottom-left cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub side: usize,
    pub cells: Vec<u32>,
}

impl Block {
    pub fn single(s: Symbol) -> Self {
        Block {
            side: 1,
            cells: vec![s.0],
        }
    }

    /// Symbol at 1-based `(x, y)`.
    pub fn at(&self, x: usize, y: usize) -> u32 {
        self.cells[(y - 1) * self.side + (x - 1)]
    }

    pub fn to_pattern(&self, alphabet: &Arc<Alphabet>) -> Pattern {
        let s = self.side;
        Pattern::new(
            alphabet.clone(),
            2,
            (0..s * s).map(|i| {
                (
                    Point::new(vec![(i % s) as i64 + 1, (i / s) as i64 + 1]),
                    Symbol(self.cells[i]),
                )
            }),
        )
        .expect("square block")
    }
}

/// The level-`n` block grown from `seed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SBlock {
    pub level: u32,
    pub seed: Symbol,
    pub block: Block,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RowDef {
    Names(Vec<String>),
    Text(String),
}

/// On-disk rule: image rows are written top row first.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDef {
    alphabet: Vec<String>,
    k: usize,
    images: BTreeMap<String, Vec<RowDef>>,
}

pub const BULLET: &str = "•";
pub const CIRCLE: &str = "∘";

impl SubstitutionRule {
    /// `images[s]` lists the rows of the image of `s`, top row first.
    pub fn new(alphabet: Arc<Alphabet>, k: usize, images: Vec<Vec<Vec<Symbol>>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDefinition("expansion factor must be at least 2".into()));
        }
        if images.len() != alphabet.len() {
            return Err(Error::InvalidDefinition(format!(
                "{} images for {} symbols",
                images.len(),
                alphabet.len()
            )));
        }
        let mut out = Vec::with_capacity(images.len());
        for (i, rows) in images.into_iter().enumerate() {
            let name = alphabet.name(Symbol(i as u32));
            if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidDefinition(format!(
                    "image of `{name}` is not {k}x{k}"
                )));
            }
            if rows.iter().flatten().any(|s| s.index() >= alphabet.len()) {
                return Err(Error::InvalidDefinition(format!(
                    "image of `{name}` uses a symbol outside the alphabet"
                )));
            }
            out.push(rows.into_iter().rev().flatten().map(|s| s.0).collect());
        }
        Ok(SubstitutionRule {
            alphabet,
            k,
            images: out,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let def: RuleDef = serde_json::from_str(text)?;
        let alphabet = Arc::new(Alphabet::new(def.alphabet.iter().cloned())?);
        let mut images = vec![None; alphabet.len()];
        for (name, rows) in &def.images {
            let s = alphabet.symbol(name)?;
            let rows = rows
                .iter()
                .map(|r| {
                    let names: Vec<&str> = match r {
                        RowDef::Names(v) => v.iter().map(String::as_str).collect(),
                        RowDef::Text(t) => t.split_whitespace().collect(),
                    };
                    names.iter().map(|n| alphabet.symbol(n)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            images[s.index()] = Some(rows);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| {
                im.ok_or_else(|| {
                    Error::InvalidDefinition(format!(
                        "no image for `{}`",
                        alphabet.name(Symbol(i as u32))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SubstitutionRule::new(alphabet, def.k, images)
    }

    pub fn to_json(&self) -> String {
        let images = self
            .alphabet
            .symbols()
            .map(|s| {
                let rows = (0..self.k)
                    .rev()
                    .map(|y| {
                        RowDef::Names(
                            (0..self.k)
                                .map(|x| {
                                    self.alphabet
                                        .name(Symbol(self.images[s.index()][y * self.k + x]))
                                        .to_string()
                                })
                                .collect(),
                        )
                    })
                    .collect();
                (self.alphabet.name(s).to_string(), rows)
            })
            .collect();
        let def = RuleDef {
            alphabet: self.alphabet.names().to_vec(),
            k: self.k,
            images,
        };
        serde_json::to_string_pretty(&def).expect("plain data serializes")
    }

    /// The rule generating the standard 2-net: `•` marks net points.
    pub fn two_net() -> Self {
        let a = Arc::new(Alphabet::new([BULLET, CIRCLE]).expect("distinct names"));
        let (b, c) = (Symbol(0), Symbol(1));
        SubstitutionRule::new(a, 2, vec![vec![vec![c, b], vec![b, c]], vec![vec![c, c], vec![b, c]]])
            .expect("well formed")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "2net" => Ok(SubstitutionRule::two_net()),
            _ => Err(Error::InvalidDefinition(format!("unknown builtin rule `{name}`"))),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Image of `s` as a block.
    pub fn image(&self, s: Symbol) -> Block {
        Block {
            side: self.k,
            cells: self.images[s.index()].clone(),
        }
    }

    /// Replaces every cell by its image.
    pub fn substitute(&self, b: &Block) -> Result<Block> {
        let k = self.k;
        let side = b.side * k;
        if side.checked_mul(side).is_none_or(|c| c > MAX_BLOCK_CELLS) {
            return Err(Error::budget("block cells", MAX_BLOCK_CELLS as u128));
        }
        let mut cells = vec![0u32; side * side];
        cells.par_chunks_mut(side).enumerate().for_each(|(y, row)| {
            let (cy, iy) = (y / k, y % k);
            for (x, out) in row.iter_mut().enumerate() {
                let s = b.cells[cy * b.side + x / k] as usize;
                *out = self.images[s][iy * k + x % k];
            }
        });
        Ok(Block { side, cells })
    }
}

pub fn expand(rule: &SubstitutionRule, seed: Symbol, n: u32) -> Result<SBlock> {
    if seed.index() >= rule.alphabet.len() {
        return Err(Error::UnknownSymbol(format!("#{}", seed.0)));
    }
    let mut b = Block::single(seed);
    for _ in 0..n {
        b = rule.substitute(&b)?;
    }
    Ok(SBlock {
        level: n,
        seed,
        block: b,
    })
}

/// Whether a 2D pattern appears, up to translation, in some level
/// `level` block.
pub fn admissible_in_block(rule: &SubstitutionRule, p: &Pattern, level: u32) -> Result<bool> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    if **p.alphabet() != *rule.alphabet {
        return Err(Error::AlphabetMismatch("pattern and rule alphabets differ".into()));
    }
    let lo = p.domain().min_corner();
    let ext = p.domain().extents();
    let side = rule.k.checked_pow(level).unwrap_or(usize::MAX);
    if ext[0] > side || ext[1] > side {
        return Err(Error::Precondition(format!(
            "pattern of extent {}x{} does not fit a level-{level} block",
            ext[0], ext[1]
        )));
    }
    let cells: Vec<(usize, usize, u32)> = p
        .cells()
        .map(|(q, s)| ((q.0[0] - lo.0[0]) as usize, (q.0[1] - lo.0[1]) as usize, s.0))
        .collect();
    for seed in rule.alphabet.symbols() {
        let b = expand(rule, seed, level)?.block;
        for oy in 0..=side - ext[1] {
            for ox in 0..=side - ext[0] {
                if cells
                    .iter()
                    .all(|&(x, y, s)| b.cells[(oy + y) * side + ox + x] == s)
                {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Result of [`check_unique_derivation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// Every central square at this depth has one preimage and phase.
    UniqueUpTo { depth: u32, squares: usize },
    Ambiguous(Ambiguity),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub seed: Symbol,
    /// The central square with more than one derivation.
    pub square: Pattern,
    /// Two derivations whose preimages differ on a common coarse cell.
    pub derivations: [Preimage; 2],
}

/// A derivation of a window: the phase `v` in `{0..k-1}^2` and the
/// preimage symbol of every coarse cell lying fully inside the window.
/// Coarse cell `c` covers window cells `k c - v + {0..k-1}^2`, so coarse
/// indices are comparable across phases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preimage {
    pub phase: Point,
    pub cells: BTreeMap<Point, u32>,
}

impl Preimage {
    /// Whether both preimages agree wherever both are defined.
    pub fn agrees_with(&self, other: &Preimage) -> bool {
        self.cells
            .iter()
            .all(|(c, s)| other.cells.get(c).is_none_or(|t| t == s))
    }
}

/// Per phase, the symbols whose image matches each fully covered coarse
/// cell; phases where some coarse cell has no match are dropped.
fn candidate_derivations(rule: &SubstitutionRule, w: &Block) -> Vec<(Point, BTreeMap<Point, Vec<u32>>)> {
    let k = rule.k;
    let side = w.side;
    let mut out = Vec::new();
    for vy in 0..k {
        for vx in 0..k {
            let n = (side + vx).div_ceil(k);
            let m = (side + vy).div_ceil(k);
            let mut full_cells = BTreeMap::new();
            let mut ok = true;
            'cells: for cy in 0..m {
                for cx in 0..n {
                    let full = cx * k >= vx
                        && cy * k >= vy
                        && cx * k + k - vx <= side
                        && cy * k + k - vy <= side;
                    let cand: Vec<u32> = (0..rule.images.len() as u32)
                        .filter(|&s| {
                            let im = &rule.images[s as usize];
                            (0..k).all(|iy| {
                                (0..k).all(|ix| {
                                    let (x, y) = (cx * k + ix, cy * k + iy);
                                    if x < vx || y < vy || x - vx >= side || y - vy >= side {
                                        return true;
                                    }
                                    w.cells[(y - vy) * side + (x - vx)] == im[iy * k + ix]
                                })
                            })
                        })
                        .collect();
                    if cand.is_empty() {
                        ok = false;
                        break 'cells;
                    }
                    if full {
                        full_cells.insert(Point::new(vec![cx as i64, cy as i64]), cand);
                    }
                }
            }
            if ok {
                out.push((Point::new(vec![vx as i64, vy as i64]), full_cells));
            }
        }
    }
    out
}

/// Two derivations of `w` with different preimages, if any.
fn find_ambiguity(rule: &SubstitutionRule, w: &Block) -> Option<[Preimage; 2]> {
    let mut unique = Vec::new();
    for (phase, cells) in candidate_derivations(rule, w) {
        let first: BTreeMap<Point, u32> = cells.iter().map(|(c, v)| (c.clone(), v[0])).collect();
        if let Some((c, v)) = cells.iter().find(|(_, v)| v.len() > 1) {
            let mut second = first.clone();
            second.insert(c.clone(), v[1]);
            return Some([
                Preimage { phase: phase.clone(), cells: first },
                Preimage { phase, cells: second },
            ]);
        }
        unique.push(Preimage { phase, cells: first });
    }
    for i in 0..unique.len() {
        for j in 0..i {
            if !unique[i].agrees_with(&unique[j]) {
                return Some([unique[j].clone(), unique[i].clone()]);
            }
        }
    }
    None
}

/// Checks that the central square of every level-`depth` block, after
/// trimming a border of `ceil(k/2)` cells, is derived from only one
/// preimage. This is a bounded check, not a proof.
pub fn check_unique_derivation(rule: &SubstitutionRule, depth: u32) -> Result<Derivation> {
    if depth < 2 {
        return Err(Error::Precondition("depth must be at least 2".into()));
    }
    let k = rule.k;
    let margin = k.div_ceil(2);
    let mut seen: HashSet<Block> = HashSet::new();
    for seed in rule.alphabet.symbols() {
        let b = expand(rule, seed, depth)?.block;
        let side = b.side - 2 * margin;
        let mut cells = Vec::with_capacity(side * side);
        for y in 0..side {
            let start = (y + margin) * b.side + margin;
            cells.extend_from_slice(&b.cells[start..start + side]);
        }
        let w = Block { side, cells };
        if !seen.insert(w.clone()) {
            continue;
        }
        if let Some(derivations) = find_ambiguity(rule, &w) {
            let square = w
                .to_pattern(&rule.alphabet)
                .translate(&Point::new(vec![margin as i64, margin as i64]));
            return Ok(Derivation::Ambiguous(Ambiguity {
                seed,
                square,
                derivations,
            }));
        }
    }
    Ok(Derivation::UniqueUpTo {
        depth,
        squares: seen.len(),
    })
}

/// Upper bound on `(1/n^2) log2 N_{F_n}` for the patterns of a
/// substitution:
/// `(floor(n/k^m) - 2)_+^2 log2|Σ| / n^2 + 4 k^m log2|Σ| / n`.
pub fn zero_entropy_bound(rule: &SubstitutionRule, n: u64, m: u32) -> Result<Enclosure> {
    let km = (rule.k as u64)
        .checked_pow(m)
        .ok_or_else(|| Error::budget("k^m", u64::MAX as u128))?;
    if n <= km {
        return Err(Error::Precondition(format!("need n > k^m = {km}")));
    }
    let inner = (n / km).saturating_sub(2);
    let n_big = BigInt::from(n);
    let coef = BigRational::new(BigInt::from(inner * inner), &n_big * &n_big)
        + BigRational::new(BigInt::from(4 * km), n_big);
    Ok(log2_biguint(&BigUint::from(rule.alphabet.len())).scale(&coef))
}

/// Distinct `j x j` windows across `blocks`.
pub fn distinct_windows(blocks: &[Block], j: usize) -> usize {
    let mut set: BTreeSet<Vec<u32>> = BTreeSet::new();
    for b in blocks {
        if j > b.side {
            continue;
        }
        for oy in 0..=b.side - j {
            for ox in 0..=b.side - j {
                let mut w = Vec::with_capacity(j * j);
                for y in 0..j {
                    let s = (oy + y) * b.side + ox;
                    w.extend_from_slice(&b.cells[s..s + j]);
                }
                set.insert(w);
            }
        }
    }
    set.len()
}

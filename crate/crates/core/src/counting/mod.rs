//! Exact counts of locally admissible patterns and the entropy bounds built
//! from them.

mod spectral;
mod transfer;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};

use crate::alphabet::{Alphabet, Symbol};
use crate::csp::{CodeTable, Constraint, Csp, Flow};
use crate::error::{Error, Result};
use crate::exact::{log2_biguint, Enclosure};
use crate::lattice::Shape;
use crate::recode::recode_detailed;
use crate::region::{RegionProblem, DEFAULT_NODE_LIMIT};
use crate::syntax::{BlockMap, Mode, Syntax};

pub use spectral::{recurrent_part, spectral_entropy_1d, spectral_radius_bracket};

/// Environment variable overriding the default row-state limit.
pub const MAX_STATES_ENV: &str = "SHIFTLAB_MAX_STATES";
pub const DEFAULT_MAX_STATES: u64 = 1 << 24;

/// Resource caps for counting.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Live row states in the 2D transfer DP.
    pub max_states: u64,
    /// Backtracking nodes for enumeration-based counts.
    pub node_limit: u64,
}

impl Default for Limits {
    fn default() -> Self {
        let max_states = std::env::var(MAX_STATES_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_STATES);
        Limits {
            max_states,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Exact count over a box with its per-site `log2` enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub region: Vec<usize>,
    pub count: BigUint,
    pub log2_per_site: Enclosure,
}

impl CountResult {
    pub fn new(region: Vec<usize>, count: BigUint) -> Self {
        let sites: usize = region.iter().product();
        let log2_per_site = log2_biguint(&count)
            .scale(&BigRational::new(1.into(), (sites as u64).into()));
        CountResult {
            region,
            count,
            log2_per_site,
        }
    }

    pub fn sites(&self) -> usize {
        self.region.iter().product()
    }
}

/// Number of locally admissible colorings of the box `{1..dims_0} x ...`.
pub fn count_box(s: &Syntax, dims: &[usize], limits: &Limits) -> Result<BigUint> {
    if dims.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: dims.len(),
        });
    }
    if dims.contains(&0) {
        return Err(Error::Precondition("box sides must be at least 1".into()));
    }
    let ext = s.shape().extents();
    let sites: usize = dims.iter().product();
    if s.is_full() || dims.iter().zip(&ext).any(|(n, e)| n < e) {
        // No window fits or none rejects: every coloring is admissible.
        return Ok(BigUint::from(s.alphabet().len()).pow(sites as u32));
    }
    if s.dim() > 1 {
        if let Some(axis) = dims.iter().position(|&n| n == 1) {
            // The window is flat along this axis, so the box is one slice.
            let mut rest = dims.to_vec();
            rest.remove(axis);
            return count_box(&s.drop_axis(axis)?, &rest, limits);
        }
    }
    let rec = recode_detailed(s, limits.node_limit)?;
    if rec.blocks.is_empty() {
        return Ok(BigUint::zero());
    }
    let sides = crate::recode::block_sides(s);
    let out: Vec<usize> = dims.iter().zip(&sides).map(|(n, b)| n + 1 - b).collect();
    match s.dim() {
        1 => transfer::count_path(&rec.syntax, out[0]),
        2 => {
            let (w, h) = (out[0], out[1]);
            if w <= h {
                transfer::count_profile(&rec.syntax, w, h, limits.max_states)
            } else {
                let t = rec.syntax.permute_axes(&[1, 0])?;
                transfer::count_profile(&t, h, w, limits.max_states)
            }
        }
        _ => {
            let region = Shape::rect(&out)?;
            count_by_search(&rec.syntax, &region, limits.node_limit)
        }
    }
}

fn count_by_search(s: &Syntax, region: &Shape, node_limit: u64) -> Result<BigUint> {
    let prob = RegionProblem::new(s, region);
    let mut n = 0u128;
    prob.csp.search(node_limit, |_| {
        n += 1;
        Flow::Continue
    })?;
    Ok(BigUint::from(n))
}

/// Count of locally admissible `n x m` colorings of a 2D syntax
/// (`n` columns along axis 1, `m` rows along axis 2).
pub fn count_rect(s: &Syntax, n: usize, m: usize) -> Result<CountResult> {
    count_rect_with(s, n, m, &Limits::default())
}

pub fn count_rect_with(s: &Syntax, n: usize, m: usize, limits: &Limits) -> Result<CountResult> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.dim(),
        });
    }
    Ok(CountResult::new(vec![n, m], count_box(s, &[n, m], limits)?))
}

/// Count over `F_n = {1..n}^d`.
pub fn count_cube(s: &Syntax, n: usize, limits: &Limits) -> Result<CountResult> {
    let dims = vec![n; s.dim()];
    Ok(CountResult::new(dims.clone(), count_box(s, &dims, limits)?))
}

/// One upper term `u_n = log2(N_n) / n^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperTerm {
    pub n: usize,
    pub count: BigUint,
    pub bound: Enclosure,
}

/// Upper-bound terms for increasing `n`; `stopped` records why the
/// sequence ended early, if it did.
#[derive(Clone, Debug)]
pub struct EntropyBoundSeq {
    pub terms: Vec<UpperTerm>,
    pub stopped: Option<Error>,
}

impl EntropyBoundSeq {
    /// Smallest upper endpoint among the terms.
    pub fn best(&self) -> Option<&UpperTerm> {
        self.terms
            .iter()
            .filter(|t| !t.bound.is_neg_infinity())
            .min_by(|a, b| a.bound.hi().cmp(&b.bound.hi()))
            .or_else(|| self.terms.first())
    }
}

pub fn upper_term(s: &Syntax, n: usize, limits: &Limits) -> Result<UpperTerm> {
    let c = count_cube(s, n, limits)?;
    Ok(UpperTerm {
        n,
        count: c.count,
        bound: c.log2_per_site,
    })
}

pub fn upper_entropy_terms(s: &Syntax, n_max: usize, limits: &Limits) -> EntropyBoundSeq {
    let mut terms = Vec::new();
    for n in 1..=n_max {
        match upper_term(s, n, limits) {
            Ok(t) => terms.push(t),
            Err(e) => {
                return EntropyBoundSeq {
                    terms,
                    stopped: Some(e),
                }
            }
        }
    }
    EntropyBoundSeq {
        terms,
        stopped: None,
    }
}

/// Number of distinct images of locally admissible `F_n` colorings under a
/// one-block map.
pub fn sofic_image_count(s: &Syntax, m: &BlockMap, n: usize, limits: &Limits) -> Result<CountResult> {
    if **m.source() != **s.alphabet() {
        return Err(Error::AlphabetMismatch(
            "block map source differs from the syntax alphabet".into(),
        ));
    }
    let dims = vec![n; s.dim()];
    let region = Shape::rect(&dims)?;
    let prob = RegionProblem::new(s, &region);
    let mut images: HashSet<Vec<u32>> = HashSet::new();
    prob.csp.search(limits.node_limit, |v| {
        images.insert(v.iter().map(|&x| m.image(Symbol(x)).0).collect());
        Flow::Continue
    })?;
    Ok(CountResult::new(dims, BigUint::from(images.len())))
}

/// 1D syntax whose symbols are the colorings of a width-`width` row of a 2D
/// syntax with window height at most 2, and whose steps are admissible
/// `width x 2` patterns. Its entropy is `log2` of the strip growth rate.
pub fn strip_syntax(s: &Syntax, width: usize, limits: &Limits) -> Result<Syntax> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.dim(),
        });
    }
    if s.shape().extents()[1] > 2 {
        return Err(Error::Precondition(
            "strip transfer needs a window of height at most 2; recode first".into(),
        ));
    }
    let k = s.alphabet().len() as u64;
    let rows = crate::csp::code_space(k, width)
        .filter(|&r| r <= 1 << 16)
        .ok_or_else(|| Error::budget("strip row symbols", 1 << 16))?;
    let names: Vec<String> = (0..rows)
        .map(|mut c| {
            let mut parts = Vec::with_capacity(width);
            for _ in 0..width {
                parts.push(s.alphabet().name(Symbol((c % k) as u32)).to_string());
                c /= k;
            }
            format!("[{}]", parts.join(","))
        })
        .collect();
    let alphabet = Arc::new(Alphabet::new(names)?);
    let region = Shape::rect(&[width, 2])?;
    let prob = RegionProblem::new(s, &region);
    let row_code = |v: &[u32], y: i64| -> u32 {
        let mut c = 0u64;
        let mut w = 1u64;
        for x in 1..=width as i64 {
            c += v[prob.cells.get(&[x, y]).unwrap()] as u64 * w;
            w *= k;
        }
        c as u32
    };
    let mut pairs = Vec::new();
    prob.csp.search(limits.node_limit, |v| {
        pairs.push(vec![Symbol(row_code(v, 1)), Symbol(row_code(v, 2))]);
        Flow::Continue
    })?;
    Syntax::new(alphabet, Shape::boxed(&[0], &[1])?, Mode::Allowed, pairs)
}

/// `log2` of the growth rate of width-`width` strips (free boundary).
pub fn strip_entropy(s: &Syntax, width: usize, tol: &BigRational, limits: &Limits) -> Result<Enclosure> {
    let strip = strip_syntax(s, width, limits)?;
    spectral::spectral_entropy_one_step(&strip, tol)
}

/// Rigorous lower bound on the entropy of a 2D SFT from periodic tiles.
///
/// Colorings of the `p x q` torus are grouped by their frame, the cells
/// within window reach of the tile edge. Any tiling of the plane by tiles
/// sharing one frame is admissible, so `h >= log2(max group) / (p q)`.
/// Returns `None` when the torus has no admissible coloring.
pub fn periodic_tile_lower_bound(
    s: &Syntax,
    p: usize,
    q: usize,
    limits: &Limits,
) -> Result<Option<TileBound>> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.dim(),
        });
    }
    let ext = s.shape().extents();
    let lo = s.shape().min_corner();
    if p < ext[0] || q < ext[1] {
        return Err(Error::Precondition("tile smaller than the window".into()));
    }
    let idx = |x: i64, y: i64| -> usize {
        (y.rem_euclid(q as i64) as usize) * p + x.rem_euclid(p as i64) as usize
    };
    let mut csp = Csp::new(s.alphabet().len() as u32, p * q);
    let table: Arc<CodeTable> = Arc::clone(s.table());
    for y in 0..q as i64 {
        for x in 0..p as i64 {
            let vars = s
                .shape()
                .offsets()
                .iter()
                .map(|o| idx(x + o.0[0] - lo.0[0], y + o.0[1] - lo.0[1]))
                .collect();
            csp.add(Constraint {
                vars,
                table: table.clone(),
            });
        }
    }
    let reach = [ext[0] as i64 - 1, ext[1] as i64 - 1];
    let frame: Vec<usize> = (0..q as i64)
        .flat_map(|y| (0..p as i64).map(move |x| (x, y)))
        .filter(|&(x, y)| {
            x < reach[0] || x >= p as i64 - reach[0] || y < reach[1] || y >= q as i64 - reach[1]
        })
        .map(|(x, y)| idx(x, y))
        .collect();
    let mut groups: HashMap<Vec<u32>, u64> = HashMap::new();
    csp.search(limits.node_limit, |v| {
        *groups.entry(frame.iter().map(|&i| v[i]).collect()).or_default() += 1;
        Flow::Continue
    })?;
    let Some((_, &best)) = groups.iter().max_by_key(|(k, c)| (**c, std::cmp::Reverse((*k).clone()))) else {
        return Ok(None);
    };
    let bound = log2_biguint(&BigUint::from(best))
        .scale(&BigRational::new(1.into(), ((p * q) as u64).into()));
    Ok(Some(TileBound {
        p,
        q,
        tiles: best,
        bound,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileBound {
    pub p: usize,
    pub q: usize,
    /// Size of the largest frame class.
    pub tiles: u64,
    /// Enclosure of `log2(tiles) / (p q)`; its lower end is a valid bound.
    pub bound: Enclosure,
}

/// Per-site log of a count over `sites` cells as a float; for display only.
pub fn per_site_f64(count: &BigUint, sites: usize) -> f64 {
    if count.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = count.bits();
    let shift = bits.saturating_sub(60);
    let top = (count >> shift).to_f64().unwrap_or(f64::NAN);
    (top.log2() + shift as f64) / sites as f64
}

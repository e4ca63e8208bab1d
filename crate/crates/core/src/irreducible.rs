//! Global admissibility for irreducible syntaxes, the lower terms `s(n)`
//! and the squeeze between lower and upper terms.
//!
//! "Globally admissible" inside compatibility checks means: extends to a
//! locally admissible coloring of the probe cube. Two ways to settle the
//! universally quantified condition are tried in order: a safe boundary
//! (one filling that works against every outside coloring) and, failing
//! that, an exact enumeration of the collar that the filling can see.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use parking_lot::Mutex;
use rayon::prelude::*;

use crate::counting::{upper_term, Limits, UpperTerm};
use crate::csp::{code_space, CodeTable, Constraint, Csp, Flow};
use crate::error::{Error, Result};
use crate::exact::{log2_biguint, Enclosure};
use crate::lattice::{Pattern, Point, Shape};
use crate::region::{RegionProblem, DEFAULT_NODE_LIMIT};
use crate::syntax::Syntax;

/// Largest window code space expanded when quantifying over outside cells.
const MAX_QUANTIFIED_SPACE: u64 = 1 << 22;

/// Default cap on collars examined per admissibility step.
pub const DEFAULT_COLLAR_LIMIT: usize = 1 << 12;

/// `ceil(sqrt(n))`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// `Q_n = {-n..n}^d`.
pub fn sym_cube(dim: usize, n: usize) -> Shape {
    Shape::symmetric_cube(dim, n as i64).expect("dimension is positive")
}

/// Least `k` with the pattern's cells inside `Q_k`.
pub fn cube_radius(p: &Pattern) -> usize {
    p.cells().map(|(q, _)| q.sup_norm()).max().unwrap_or(0) as usize
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Known(u32),
    Var(usize),
    Any,
}

/// Fill problem: `region` cells not in `known` are free; every window in
/// `placements` must hold, for every value of its cells outside both.
struct Fill<'a> {
    s: &'a Syntax,
    vars: Vec<Vec<i64>>,
    var_index: HashMap<Vec<i64>, usize>,
    known: &'a HashMap<Vec<i64>, u32>,
    tables: HashMap<Vec<Option<u32>>, Option<Arc<CodeTable>>>,
}

impl<'a> Fill<'a> {
    fn new(s: &'a Syntax, region: &Shape, known: &'a HashMap<Vec<i64>, u32>) -> Self {
        let mut vars: Vec<Vec<i64>> = region
            .offsets()
            .iter()
            .filter(|p| !known.contains_key(&p.0))
            .map(|p| p.0.clone())
            .collect();
        vars.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        let var_index = vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Fill {
            s,
            vars,
            var_index,
            known,
            tables: HashMap::new(),
        }
    }

    /// Table over the free cells of one window signature, or `None` when
    /// no assignment works.
    fn table(&mut self, sig: &[Slot]) -> Result<Option<Arc<CodeTable>>> {
        // key: known value, or None for a free cell, or Some(u32::MAX) for any
        let key: Vec<Option<u32>> = sig
            .iter()
            .map(|s| match s {
                Slot::Known(v) => Some(*v),
                Slot::Var(_) => None,
                Slot::Any => Some(u32::MAX),
            })
            .collect();
        if let Some(t) = self.tables.get(&key) {
            return Ok(t.clone());
        }
        let k = self.s.alphabet().len() as u64;
        let nv = sig.iter().filter(|s| matches!(s, Slot::Var(_))).count();
        let nu = sig.iter().filter(|s| matches!(s, Slot::Any)).count();
        let vspace = code_space(k, nv).filter(|&x| x <= MAX_QUANTIFIED_SPACE);
        let uspace = code_space(k, nu).filter(|&x| x <= MAX_QUANTIFIED_SPACE);
        let (Some(vspace), Some(uspace)) = (vspace, uspace) else {
            return Err(Error::budget("quantified window space", MAX_QUANTIFIED_SPACE as u128));
        };
        if code_space(k, sig.len()).map_or(true, |w| w.saturating_mul(uspace) > MAX_QUANTIFIED_SPACE) {
            return Err(Error::budget("quantified window space", MAX_QUANTIFIED_SPACE as u128));
        }
        // outside values that no allowed window completes never occur
        let fixed_space = code_space(k, sig.len() - nu).expect("window fits a code");
        let mut window = vec![0u32; sig.len()];
        let occurring: Vec<u64> = (0..uspace)
            .filter(|&uc| {
                (0..fixed_space).any(|fc| {
                    let (mut f, mut u) = (fc, uc);
                    for (slot, w) in sig.iter().zip(window.iter_mut()) {
                        let src = if matches!(slot, Slot::Any) { &mut u } else { &mut f };
                        *w = (*src % k) as u32;
                        *src /= k;
                    }
                    self.s.allows_values(&window)
                })
            })
            .collect();
        let mut table = CodeTable::new(k, nv, false)?;
        let mut any = false;
        for vc in 0..vspace {
            let ok = occurring.iter().all(|&uc| {
                let (mut v, mut u) = (vc, uc);
                for (slot, w) in sig.iter().zip(window.iter_mut()) {
                    *w = match slot {
                        Slot::Known(x) => *x,
                        Slot::Var(_) => {
                            let d = (v % k) as u32;
                            v /= k;
                            d
                        }
                        Slot::Any => {
                            let d = (u % k) as u32;
                            u /= k;
                            d
                        }
                    };
                }
                self.s.allows_values(&window)
            });
            if ok {
                table.insert(vc);
                any = true;
            }
        }
        let t = any.then(|| Arc::new(table));
        self.tables.insert(key, t.clone());
        Ok(t)
    }

    fn solve(mut self, placements: &[Point], node_limit: u64) -> Result<bool> {
        let mut csp = Csp::new(self.s.alphabet().len() as u32, self.vars.len());
        let shape = self.s.shape().clone();
        for u in placements {
            let mut sig = Vec::with_capacity(shape.len());
            let mut vars = Vec::new();
            for o in shape.offsets() {
                let c = (o + u).0;
                if let Some(v) = self.known.get(&c) {
                    sig.push(Slot::Known(*v));
                } else if let Some(&i) = self.var_index.get(&c) {
                    sig.push(Slot::Var(i));
                    vars.push(i);
                } else {
                    sig.push(Slot::Any);
                }
            }
            match self.table(&sig)? {
                None => return Ok(false),
                Some(_) if vars.is_empty() => {}
                Some(table) => csp.add(Constraint { vars, table }),
            }
        }
        csp.is_satisfiable(node_limit)
    }
}

fn known_of(p: &Pattern) -> HashMap<Vec<i64>, u32> {
    p.cells().map(|(q, s)| (q.0.clone(), s.0)).collect()
}

/// Window placements meeting `region`, optionally kept inside `Q_bound`.
fn placements_meeting(s: &Syntax, region: &Shape, bound: Option<usize>) -> Vec<Point> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in region.offsets() {
        for o in s.shape().offsets() {
            let u = p - o;
            if !seen.insert(u.0.clone()) {
                continue;
            }
            let inside = bound.map_or(true, |b| {
                s.shape()
                    .offsets()
                    .iter()
                    .all(|w| (w + &u).sup_norm() <= b as i64)
            });
            if inside {
                out.push(u);
            }
        }
    }
    out.sort();
    out
}

/// Whether `p` extends to a locally admissible coloring of `Q_n`.
pub fn extends_to_cube(s: &Syntax, p: &Pattern, n: usize, node_limit: u64) -> Result<bool> {
    let cube = sym_cube(s.dim(), n);
    let known = known_of(p);
    if p.cells().any(|(q, _)| !cube.contains(q)) {
        return Err(Error::Precondition(format!("pattern does not fit Q_{n}")));
    }
    Fill::new(s, &cube, &known).solve(&placements_meeting(s, &cube, Some(n)), node_limit)
}

/// Whether `a ∪ b|(Q_n \ Q_{k+r})` extends to a locally admissible
/// coloring of `Q_probe`.
#[allow(clippy::too_many_arguments)]
pub fn is_r_compatible(
    s: &Syntax,
    a: &Pattern,
    k: usize,
    b: &Pattern,
    n: usize,
    r: usize,
    probe: usize,
    node_limit: u64,
) -> Result<bool> {
    if n < k + r + 1 {
        return Err(Error::Precondition(format!(
            "compatibility needs n >= k + r + 1, got n={n}, k={k}, r={r}"
        )));
    }
    if probe < n {
        return Err(Error::Precondition("probe must contain Q_n".into()));
    }
    if cube_radius(a) > k || cube_radius(b) > n {
        return Err(Error::Precondition("patterns exceed their cubes".into()));
    }
    let inner = sym_cube(s.dim(), k + r);
    let outer = sym_cube(s.dim(), n);
    let ring = outer.difference(&inner);
    let union = match ring.and_then(|ring| b.restrict(&ring)) {
        Some(rest) => match a.union(&rest) {
            Ok(u) => u,
            Err(_) => return Ok(false),
        },
        None => a.clone(),
    };
    extends_to_cube(s, &union, probe, node_limit)
}

/// How an admissible verdict was reached.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// One filling of the gap works against every outside coloring.
    SafeBoundary,
    /// Every locally admissible collar was checked.
    CollarEnumeration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    /// No locally admissible `Q_n` coloring contains the pattern.
    Inadmissible { n: usize },
    /// Every locally admissible `Q_n` coloring is `r`-compatible with it.
    Admissible { n: usize, r: usize, evidence: Evidence },
    Undecided { n_max: usize },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// Memoized global-admissibility decisions for one syntax and budget.
pub struct AdmissibilityOracle {
    s: Syntax,
    n_max: usize,
    node_limit: u64,
    collar_limit: usize,
    memo: Mutex<HashMap<Pattern, Admissibility>>,
}

impl AdmissibilityOracle {
    pub fn new(s: Syntax, n_max: usize, node_limit: u64, collar_limit: usize) -> Self {
        AdmissibilityOracle {
            s,
            n_max,
            node_limit,
            collar_limit,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn syntax(&self) -> &Syntax {
        &self.s
    }

    pub fn decide(&self, a: &Pattern) -> Admissibility {
        if let Some(v) = self.memo.lock().get(a) {
            return v.clone();
        }
        let v = decide_uncached(&self.s, a, self.n_max, self.node_limit, self.collar_limit);
        self.memo.lock().insert(a.clone(), v.clone());
        v
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().len()
    }
}

/// Searches `N = k+2 ..= n_max` for either an obstruction (no locally
/// admissible `Q_N` coloring extends `a`) or a size at which every locally
/// admissible `Q_N` coloring is `ceil(sqrt N)`-compatible with `a`.
pub fn decide_globally_admissible(s: &Syntax, a: &Pattern, n_max: usize) -> Admissibility {
    decide_uncached(s, a, n_max, DEFAULT_NODE_LIMIT, DEFAULT_COLLAR_LIMIT)
}

fn decide_uncached(
    s: &Syntax,
    a: &Pattern,
    n_max: usize,
    node_limit: u64,
    collar_limit: usize,
) -> Admissibility {
    let k = cube_radius(a);
    for n in k + 2..=n_max {
        match extends_to_cube(s, a, n, node_limit) {
            Ok(false) => return Admissibility::Inadmissible { n },
            Ok(true) => {}
            Err(_) => continue,
        }
        let r = ceil_sqrt(n);
        if n < k + r + 1 {
            continue;
        }
        if let Ok(Some(evidence)) = every_collar_compatible(s, a, k + r, n, node_limit, collar_limit) {
            return Admissibility::Admissible { n, r, evidence };
        }
    }
    Admissibility::Undecided { n_max }
}

/// Reach of the window past its anchor, in sup norm.
fn window_reach(s: &Syntax) -> usize {
    s.shape().diameter() as usize
}

/// Whether every locally admissible `b` on `Q_n` leaves `a ∪ b|(Q_n \ Q_inner)`
/// extendable to `Q_n`. `None` when a locally admissible collar blocks it.
fn every_collar_compatible(
    s: &Syntax,
    a: &Pattern,
    inner: usize,
    n: usize,
    node_limit: u64,
    collar_limit: usize,
) -> Result<Option<Evidence>> {
    let dim = s.dim();
    let core = sym_cube(dim, inner);
    let known = known_of(a);
    let placements = placements_meeting(s, &core, Some(n));
    if Fill::new(s, &core, &known).solve(&placements, node_limit)? {
        return Ok(Some(Evidence::SafeBoundary));
    }
    let reach = (inner + window_reach(s)).min(n);
    let Some(collar) = sym_cube(dim, reach).difference(&core) else {
        // nothing outside the core: `a` alone decides
        return Ok(None);
    };
    let prob = RegionProblem::new(s, &collar);
    let mut blocked = false;
    let mut failure = None;
    let mut seen = 0usize;
    prob.csp.search(node_limit, |v| {
        seen += 1;
        if seen > collar_limit {
            failure = Some(Error::budget("collars", collar_limit as u128));
            return Flow::Stop;
        }
        let beta = prob.to_pattern(s, v);
        let mut known = known.clone();
        known.extend(beta.cells().map(|(q, x)| (q.0.clone(), x.0)));
        let joint = Fill::new(s, &core, &known).solve(&placements, node_limit);
        match joint {
            Ok(true) => Flow::Continue,
            Ok(false) => match extends_to_cube(s, &beta, n, node_limit) {
                Ok(true) => {
                    blocked = true;
                    Flow::Stop
                }
                Ok(false) => Flow::Continue,
                Err(e) => {
                    failure = Some(e);
                    Flow::Stop
                }
            },
            Err(e) => {
                failure = Some(e);
                Flow::Stop
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((!blocked).then_some(Evidence::CollarEnumeration))
}

/// Resource caps for the lower terms and the squeeze.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleLimits {
    /// Largest cube radius `N` tried by admissibility decisions.
    pub n_max: usize,
    pub node_limit: u64,
    /// Lower terms are skipped when `Q_n` has more locally admissible
    /// colorings than this.
    pub max_patterns: usize,
    /// Largest term index tried by the squeeze.
    pub max_terms: usize,
    /// Collars examined per admissibility step.
    pub collar_limit: usize,
    pub count: Limits,
}

impl Default for IrreducibleLimits {
    fn default() -> Self {
        IrreducibleLimits {
            n_max: 10,
            node_limit: DEFAULT_NODE_LIMIT,
            max_patterns: 20_000,
            max_terms: 12,
            collar_limit: DEFAULT_COLLAR_LIMIT,
            count: Limits::default(),
        }
    }
}

/// `s(n) = log2 k(n) / |Q_{n+r'}|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerTerm {
    pub n: usize,
    /// Globally admissible `Q_n` colorings.
    pub k_n: BigUint,
    pub r_prime: usize,
    /// False when some smaller `r'` could be neither confirmed nor refuted.
    pub r_prime_minimal: bool,
    pub bound: Enclosure,
}

fn locally_admissible_capped(
    s: &Syntax,
    region: &Shape,
    cap: usize,
    node_limit: u64,
) -> Result<Vec<Pattern>> {
    let prob = RegionProblem::new(s, region);
    let mut out = Vec::new();
    let mut over = false;
    prob.csp.search(node_limit, |v| {
        if out.len() == cap {
            over = true;
            return Flow::Stop;
        }
        out.push(prob.to_pattern(s, v));
        Flow::Continue
    })?;
    if over {
        return Err(Error::budget("locally admissible patterns", cap as u128));
    }
    Ok(out)
}

enum RCheck {
    Valid,
    Invalid,
    Unknown,
}

/// Is every globally admissible coloring of `Q_{n+r+1}` `r`-compatible
/// with each of `pats`?
fn check_r_prime(
    oracle: &AdmissibilityOracle,
    pats: &[Pattern],
    n: usize,
    r: usize,
    limits: &IrreducibleLimits,
) -> Result<RCheck> {
    let s = oracle.syntax();
    let dim = s.dim();
    let core = sym_cube(dim, n + r);
    let outer = n + r + 1;
    let free_placements = placements_meeting(s, &core, None);
    let hard: Vec<&Pattern> = pats
        .par_iter()
        .map(|a| {
            let known = known_of(a);
            Fill::new(s, &core, &known)
                .solve(&free_placements, limits.node_limit)
                .map(|ok| (!ok).then_some(a))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if hard.is_empty() {
        return Ok(RCheck::Valid);
    }
    let ring = sym_cube(dim, outer)
        .difference(&core)
        .expect("the outer cube is larger");
    let placements = placements_meeting(s, &core, Some(outer));
    let prob = RegionProblem::new(s, &ring);
    let mut verdict = RCheck::Valid;
    let mut failure = None;
    let mut seen = 0usize;
    let res = prob.csp.search(limits.node_limit, |v| {
        seen += 1;
        if seen > limits.collar_limit {
            verdict = RCheck::Unknown;
            return Flow::Stop;
        }
        let c = prob.to_pattern(s, v);
        let base: HashMap<Vec<i64>, u32> = known_of(&c);
        for a in &hard {
            let mut known = base.clone();
            known.extend(known_of(a));
            match Fill::new(s, &core, &known).solve(&placements, limits.node_limit) {
                Ok(true) => {}
                Ok(false) => match oracle.decide(&c) {
                    Admissibility::Admissible { .. } => {
                        verdict = RCheck::Invalid;
                        return Flow::Stop;
                    }
                    Admissibility::Inadmissible { .. } => return Flow::Continue,
                    Admissibility::Undecided { .. } => {
                        verdict = RCheck::Unknown;
                        return Flow::Continue;
                    }
                },
                Err(e) => {
                    failure = Some(e);
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    });
    if let Some(e) = failure {
        return Err(e);
    }
    match res {
        Ok(_) => Ok(verdict),
        Err(e) if e.is_budget() => Ok(match verdict {
            RCheck::Invalid => RCheck::Invalid,
            _ => RCheck::Unknown,
        }),
        Err(e) => Err(e),
    }
}

/// Counts the globally admissible `Q_n` colorings and finds the least `r'`
/// for which every globally admissible `Q_{n+r'+1}` coloring is
/// `r'`-compatible with each of them.
pub fn lower_entropy_term(s: &Syntax, n: usize, limits: &IrreducibleLimits) -> Result<LowerTerm> {
    let oracle = AdmissibilityOracle::new(s.clone(), limits.n_max, limits.node_limit, limits.collar_limit);
    lower_term_with(&oracle, n, limits)
}

pub fn lower_term_with(
    oracle: &AdmissibilityOracle,
    n: usize,
    limits: &IrreducibleLimits,
) -> Result<LowerTerm> {
    let s = oracle.syntax();
    let cube = sym_cube(s.dim(), n);
    let local = locally_admissible_capped(s, &cube, limits.max_patterns, limits.node_limit)?;
    let verdicts: Vec<Admissibility> = local.par_iter().map(|p| oracle.decide(p)).collect();
    if verdicts.iter().any(|v| matches!(v, Admissibility::Undecided { .. })) {
        return Err(Error::budget("admissibility radius", limits.n_max as u128));
    }
    let pats: Vec<Pattern> = local
        .into_iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.is_admissible())
        .map(|(p, _)| p)
        .collect();
    let k_n = BigUint::from(pats.len());
    if pats.is_empty() {
        return Err(Error::Precondition(format!(
            "no globally admissible pattern on Q_{n}"
        )));
    }
    let mut minimal = true;
    for r in 0..limits.n_max.saturating_sub(n) {
        match check_r_prime(oracle, &pats, n, r, limits)? {
            RCheck::Valid => {
                let side = (2 * (n + r) + 1) as u64;
                let sites = side.pow(s.dim() as u32);
                let bound = log2_biguint(&k_n).scale(&BigRational::new(1.into(), sites.into()));
                return Ok(LowerTerm {
                    n,
                    k_n,
                    r_prime: r,
                    r_prime_minimal: minimal,
                    bound,
                });
            }
            RCheck::Invalid => {}
            RCheck::Unknown => minimal = false,
        }
    }
    Err(Error::budget("compatibility gap r'", limits.n_max as u128))
}

/// One row of the squeeze.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqueezeStep {
    pub k: usize,
    pub upper: Option<UpperTerm>,
    /// `None` when skipped for budget.
    pub lower: Option<LowerTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqueezeResult {
    pub precision: usize,
    /// Best lower endpoint and the term giving it.
    pub lower: BigRational,
    pub lower_from: Option<(usize, usize)>,
    pub upper: BigRational,
    pub upper_from: usize,
    pub width: BigRational,
    /// False when the budget ran out first.
    pub reached: bool,
    pub steps: Vec<SqueezeStep>,
}

/// Interleaves upper terms `u_k` with lower terms `s(k)` until the best
/// upper endpoint minus the best lower endpoint drops below `1/precision`.
pub fn entropy_to_precision(
    s: &Syntax,
    precision: usize,
    limits: &IrreducibleLimits,
) -> Result<SqueezeResult> {
    if precision == 0 {
        return Err(Error::Precondition("precision must be at least 1".into()));
    }
    let target = BigRational::new(1.into(), (precision as u64).into());
    let oracle = AdmissibilityOracle::new(s.clone(), limits.n_max, limits.node_limit, limits.collar_limit);
    let mut lower = BigRational::from_integer(0.into());
    let mut lower_from = None;
    let mut best_upper: Option<(BigRational, usize)> = None;
    let mut steps = Vec::new();
    let done = |lo: &BigRational, up: &Option<(BigRational, usize)>| {
        up.as_ref().is_some_and(|(u, _)| u - lo < target)
    };
    for k in 1..=limits.max_terms {
        let mut step = SqueezeStep {
            k,
            upper: None,
            lower: None,
        };
        match upper_term(s, k, &limits.count) {
            Ok(u) => {
                if let Some(hi) = u.bound.hi() {
                    if best_upper.as_ref().map_or(true, |(b, _)| hi < b) {
                        best_upper = Some((hi.clone(), k));
                    }
                }
                step.upper = Some(u);
            }
            Err(e) if e.is_budget() => {}
            Err(e) => return Err(e),
        }
        if !done(&lower, &best_upper) {
            match lower_term_with(&oracle, k, limits) {
                Ok(t) => {
                    if let Some(lo) = t.bound.lo() {
                        if *lo > lower || lower_from.is_none() {
                            lower = lo.clone();
                            lower_from = Some((k, t.r_prime));
                        }
                    }
                    step.lower = Some(t);
                }
                Err(e) if e.is_budget() => {}
                Err(e) => return Err(e),
            }
        }
        steps.push(step);
        if done(&lower, &best_upper) {
            break;
        }
        if step_is_hopeless(&steps) {
            break;
        }
    }
    let Some((upper, upper_from)) = best_upper else {
        return Err(Error::budget("upper terms", limits.max_terms as u128));
    };
    let width = &upper - &lower;
    Ok(SqueezeResult {
        precision,
        reached: width < target,
        lower,
        lower_from,
        upper,
        upper_from,
        width,
        steps,
    })
}

/// Both sequences stalled on budget for the last step.
fn step_is_hopeless(steps: &[SqueezeStep]) -> bool {
    steps
        .last()
        .is_some_and(|s| s.upper.is_none() && s.lower.is_none())
}

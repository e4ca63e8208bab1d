//! Certified spectral radius of 1D transfer graphs.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::exact::{log2_rational, pow2_neg, Enclosure};
use crate::recode::recode_one_step;
use crate::syntax::Syntax;

const FLOAT_ITERS: usize = 4000;
const EXACT_ITERS: usize = 20_000;
const KEEP_BITS: u64 = 256;

/// Bracket `[lo, hi]` on the spectral radius of a directed graph given by
/// adjacency lists, computed on its recurrent part. `None` when no cycle.
pub fn spectral_radius_bracket(
    succ: &[Vec<usize>],
    rel_tol: &BigRational,
) -> Result<Option<(BigRational, BigRational)>> {
    let n = succ.len();
    let alive = recurrent_part(succ);
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for (a, out) in succ.iter().enumerate() {
        for &b in out {
            if alive[a] && alive[b] {
                g.add_edge(nodes[a], nodes[b], ());
            }
        }
    }
    let mut best: Option<(BigRational, BigRational)> = None;
    for comp in tarjan_scc(&g) {
        let members: Vec<usize> = comp.iter().map(|ix| g[*ix]).filter(|&v| alive[v]).collect();
        if members.is_empty() {
            continue;
        }
        let cyclic = members.len() > 1 || succ[members[0]].contains(&members[0]);
        if !cyclic {
            continue;
        }
        let (lo, hi) = component_bracket(succ, &members, rel_tol)?;
        best = Some(match best {
            None => (lo, hi),
            Some((blo, bhi)) => (blo.max(lo), bhi.max(hi)),
        });
    }
    Ok(best)
}

/// Repeatedly removes vertices without incoming or outgoing edges.
pub fn recurrent_part(succ: &[Vec<usize>]) -> Vec<bool> {
    let n = succ.len();
    let mut alive = vec![true; n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, out) in succ.iter().enumerate() {
        for &b in out {
            outdeg[a] += 1;
            indeg[b] += 1;
            pred[b].push(a);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0 || outdeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &b in &succ[v] {
            if alive[b] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        for &a in &pred[v] {
            if alive[a] {
                outdeg[a] -= 1;
                if outdeg[a] == 0 {
                    stack.push(a);
                }
            }
        }
    }
    alive
}

/// Collatz-Wielandt bracket for an irreducible component, iterating `A + I`.
fn component_bracket(
    succ: &[Vec<usize>],
    members: &[usize],
    rel_tol: &BigRational,
) -> Result<(BigRational, BigRational)> {
    let m = members.len();
    let mut local = vec![usize::MAX; succ.len()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| {
            succ[v]
                .iter()
                .filter(|&&b| local[b] != usize::MAX)
                .map(|&b| local[b])
                .collect()
        })
        .collect();
    // Float warm start.
    let mut v = vec![1.0f64; m];
    for _ in 0..FLOAT_ITERS {
        let mut w = v.clone();
        for (i, out) in adj.iter().enumerate() {
            for &j in out {
                w[i] += v[j];
            }
        }
        let max = w.iter().cloned().fold(0.0, f64::max);
        let delta: f64 = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a / max - b).abs())
            .fold(0.0, f64::max);
        v = w.into_iter().map(|x| x / max).collect();
        if delta < 1e-15 {
            break;
        }
    }
    let scale = (1u64 << 60) as f64;
    let mut x: Vec<BigUint> = v
        .iter()
        .map(|&f| BigUint::from(((f * scale).round() as u128).max(1)))
        .collect();
    let one = BigRational::one();
    for _ in 0..EXACT_ITERS {
        let mut y = x.clone();
        for (i, out) in adj.iter().enumerate() {
            for &j in out {
                y[i] += &x[j];
            }
        }
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (a, b) in y.iter().zip(&x) {
            let r = BigRational::new(BigInt::from(a.clone()), BigInt::from(b.clone()));
            if lo.as_ref().is_none_or(|l| &r < l) {
                lo = Some(r.clone());
            }
            if hi.as_ref().is_none_or(|h| &r > h) {
                hi = Some(r);
            }
        }
        let lo = lo.unwrap() - &one;
        let hi = hi.unwrap() - &one;
        if lo.is_positive() && (&hi - &lo) <= &lo * rel_tol {
            return Ok((lo, hi));
        }
        let bits = y.iter().map(|b| b.bits()).max().unwrap_or(0);
        if bits > KEEP_BITS {
            let sh = bits - KEEP_BITS;
            x = y
                .into_iter()
                .map(|b| {
                    let s: BigUint = b >> sh;
                    if s.is_zero() {
                        BigUint::one()
                    } else {
                        s
                    }
                })
                .collect();
        } else {
            x = y;
        }
    }
    Err(Error::budget("spectral iterations", EXACT_ITERS as u128))
}

/// `log2` of the spectral radius of the recurrent transfer graph of a 1D
/// syntax, as an interval of width at most `tol`.
///
/// Returns the `-inf` marker when the recurrent part is empty.
pub fn spectral_entropy_1d(s: &Syntax, tol: &BigRational) -> Result<Enclosure> {
    if s.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.dim(),
        });
    }
    if tol <= &pow2_neg(38) {
        return Err(Error::Precondition(
            "tolerance must exceed 2^-38 (log2 enclosure resolution)".into(),
        ));
    }
    let (one_step, _) = recode_one_step(s)?;
    spectral_entropy_one_step(&one_step, tol)
}

pub(crate) fn spectral_entropy_one_step(one_step: &Syntax, tol: &BigRational) -> Result<Enclosure> {
    let k = one_step.alphabet().len();
    let mut succ = vec![Vec::new(); k];
    for w in one_step.allowed_windows(u64::MAX)? {
        succ[w[0] as usize].push(w[1] as usize);
    }
    // A relative error e on the radius moves log2 by at most e / ln 2 < 1.5 e.
    let rel = tol / BigRational::from_integer(BigInt::from(4));
    let Some((lo, hi)) = spectral_radius_bracket(&succ, &rel)? else {
        return Ok(Enclosure::NegInfinity);
    };
    let l = log2_rational(&lo)?;
    let h = log2_rational(&hi)?;
    let out = Enclosure::new(l.lo().unwrap().clone(), h.hi().unwrap().clone());
    debug_assert!(out.width().unwrap() <= *tol, "width {:?}", out.width().unwrap().to_f64());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::exact::ratio;

    #[test]
    fn full_shift_is_exact_for_powers_of_two() {
        let f = builtin::full_shift(4, 1).unwrap();
        let e = spectral_entropy_1d(&f, &ratio(1, 1_000_000)).unwrap();
        assert_eq!(e, Enclosure::exact(ratio(2, 1)));
        let f3 = builtin::full_shift(3, 1).unwrap();
        let e3 = spectral_entropy_1d(&f3, &ratio(1, 1_000_000)).unwrap();
        assert!(e3.lo_f64() <= 3f64.log2() && 3f64.log2() <= e3.hi_f64());
    }

    #[test]
    fn golden_mean_brackets_closed_form() {
        let g = builtin::golden_mean();
        let tol = ratio(1, 1_000_000_000);
        let e = spectral_entropy_1d(&g, &tol).unwrap();
        let phi = ((1.0 + 5f64.sqrt()) / 2.0).log2();
        assert!(e.lo_f64() <= phi + 1e-15 && phi - 1e-15 <= e.hi_f64());
        assert!(e.width().unwrap() <= tol);
    }

    #[test]
    fn empty_recurrent_part_is_marker() {
        use crate::syntax::{Mode, Syntax};
        let g = builtin::golden_mean();
        let all: Vec<_> = (0..4u32)
            .map(|c| vec![crate::Symbol(c & 1), crate::Symbol(c >> 1)])
            .collect();
        let s = Syntax::new(g.alphabet().clone(), g.shape().clone(), Mode::Forbidden, all).unwrap();
        assert!(spectral_entropy_1d(&s, &ratio(1, 1000)).unwrap().is_neg_infinity());
        // a path 0 -> 1 with no cycle is trimmed away too
        let path = Syntax::new(
            g.alphabet().clone(),
            g.shape().clone(),
            Mode::Allowed,
            vec![vec![crate::Symbol(0), crate::Symbol(1)]],
        )
        .unwrap();
        assert!(spectral_entropy_1d(&path, &ratio(1, 1000)).unwrap().is_neg_infinity());
    }

    #[test]
    fn reducible_graph_takes_max_component() {
        // component {0} with self-loop (radius 1) feeding component {1,2} complete (radius 2)
        let succ = vec![vec![0, 1], vec![1, 2], vec![1, 2]];
        let (lo, hi) = spectral_radius_bracket(&succ, &ratio(1, 1_000_000)).unwrap().unwrap();
        assert!(lo <= ratio(2, 1) && ratio(2, 1) <= hi);
    }
}

//! Row-state dynamic programs for one-step syntaxes in dimensions 1 and 2.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::syntax::Syntax;

/// Exact accumulator; `add` reports overflow so `u128` can fall back to big integers.
pub(crate) trait Acc: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&mut self, other: &Self) -> bool;
}

impl Acc for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&mut self, other: &Self) -> bool {
        match self.checked_add(*other) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
}

impl Acc for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&mut self, other: &Self) -> bool {
        *self += other;
        true
    }
}

fn with_fallback(
    mut run_small: impl FnMut() -> Result<Option<u128>>,
    run_big: impl FnOnce() -> Result<Option<BigUint>>,
) -> Result<BigUint> {
    match run_small()? {
        Some(v) => Ok(BigUint::from(v)),
        None => Ok(run_big()?.expect("big integers never overflow")),
    }
}

/// Number of words of length `len` over a one-step 1D syntax.
pub(crate) fn count_path(s: &Syntax, len: usize) -> Result<BigUint> {
    debug_assert_eq!(s.dim(), 1);
    with_fallback(|| path_dp::<u128>(s, len), || path_dp::<BigUint>(s, len))
}

fn path_dp<A: Acc>(s: &Syntax, len: usize) -> Result<Option<A>> {
    let k = s.alphabet().len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    for a in 0..k {
        for b in 0..k {
            if s.allows_values(&[a as u32, b as u32]) {
                succ[a].push(b);
            }
        }
    }
    let mut cur: Vec<A> = vec![A::one(); k];
    for _ in 1..len {
        let mut next = vec![A::zero(); k];
        for (a, c) in cur.iter().enumerate() {
            for &b in &succ[a] {
                if !next[b].add(c) {
                    return Ok(None);
                }
            }
        }
        cur = next;
    }
    let mut total = A::zero();
    for c in &cur {
        if !total.add(c) {
            return Ok(None);
        }
    }
    Ok(Some(total))
}

/// Number of locally admissible `width x height` colorings of a one-step 2D
/// syntax, by a broken-profile DP over the last `width + 1` cells.
pub(crate) fn count_profile(
    s: &Syntax,
    width: usize,
    height: usize,
    max_states: u64,
) -> Result<BigUint> {
    debug_assert_eq!(s.dim(), 2);
    let k = s.alphabet().len() as u128;
    let mut modulus: u128 = 1;
    for _ in 0..=width {
        modulus = modulus
            .checked_mul(k)
            .ok_or_else(|| Error::budget("row-state code width", u128::MAX))?;
    }
    with_fallback(
        || profile_dp::<u128>(s, width, height, modulus, max_states),
        || profile_dp::<BigUint>(s, width, height, modulus, max_states),
    )
}

fn profile_dp<A: Acc>(
    s: &Syntax,
    width: usize,
    height: usize,
    modulus: u128,
    max_states: u64,
) -> Result<Option<A>> {
    let k = s.alphabet().len() as u128;
    let kw = k.pow(width as u32 - 1);
    let kw1 = kw * k;
    let mut cur: HashMap<u128, A> = HashMap::new();
    cur.insert(0, A::one());
    for y in 0..height {
        for x in 0..width {
            let t = y * width + x;
            let mut next: HashMap<u128, A> = HashMap::with_capacity(cur.len() * 2);
            for (code, c) in &cur {
                let (a, b, left) = if x >= 1 && y >= 1 {
                    (
                        ((code / kw1) % k) as u32,
                        ((code / kw) % k) as u32,
                        (code % k) as u32,
                    )
                } else {
                    (0, 0, 0)
                };
                for v in 0..k as u32 {
                    // unit cube order: (0,0) (0,1) (1,0) (1,1)
                    if x >= 1 && y >= 1 && !s.allows_values(&[a, left, b, v]) {
                        continue;
                    }
                    let mut nc = code * k + v as u128;
                    if t >= width + 1 {
                        nc %= modulus;
                    }
                    let slot = next.entry(nc).or_insert_with(A::zero);
                    if !slot.add(c) {
                        return Ok(None);
                    }
                }
            }
            if next.len() as u64 > max_states {
                return Err(Error::budget("row states", max_states as u128));
            }
            cur = next;
        }
    }
    let mut total = A::zero();
    for c in cur.values() {
        if !total.add(c) {
            return Ok(None);
        }
    }
    Ok(Some(total))
}

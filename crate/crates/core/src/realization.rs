//! Entropy brackets around a target `h`: survivors of the pruning loop
//! give witness patterns whose free-bit layer counts `2^(f n^2)` ways.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::basex::{column_frequency, delta_exact, LevelColoring};
use crate::error::{Error, Result};
use crate::exact::pow2_neg;
use crate::machine::{prune_run_with, PruneTable, RSeq};

/// Largest coloring length enumerated by [`surviving_levels`].
pub const MAX_SURVIVOR_LEVELS: usize = 18;

/// A target sequence plus, when known, its limit. `r(N) >= h` and
/// convergence are taken on trust.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSpec {
    pub r: RSeq,
    pub h: Option<BigRational>,
}

impl TargetSpec {
    pub fn new(r: RSeq, h: Option<BigRational>) -> Self {
        TargetSpec { r, h }
    }

    /// Constant target with `h` equal to it.
    pub fn constant(h: BigRational) -> Self {
        TargetSpec {
            r: RSeq::Const(h.clone()),
            h: Some(h),
        }
    }
}

/// Colorings of length `0..=max_len` that survive `big_n` iterations.
/// Contains every `ρ` with `δ(ρ) <= h` and lies inside
/// `{ρ : δ(ρ) <= r(N) + 2^(1-N)}`.
pub fn surviving_levels(
    max_len: usize,
    t: &TargetSpec,
    big_n: u32,
) -> Result<BTreeSet<LevelColoring>> {
    if max_len > MAX_SURVIVOR_LEVELS {
        return Err(Error::budget("coloring length", MAX_SURVIVOR_LEVELS as u128));
    }
    let table = PruneTable::new(big_n)?;
    // fail on a short list before fanning out
    for n in 1..=big_n {
        t.r.r(n)?;
    }
    let survivors: Result<Vec<Option<LevelColoring>>> = (0..=max_len)
        .into_par_iter()
        .flat_map_iter(|len| (0..1u64 << len).map(move |code| LevelColoring::from_code(code, len)))
        .map(|rho| Ok((!prune_run_with(&table, &rho, &t.r)?.halted()).then_some(rho)))
        .collect();
    Ok(survivors?.into_iter().flatten().collect())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Counted on an explicit surviving pattern.
    WitnessCertified,
    /// The asymptotic `h + 2^(1-n)` form, taken as given.
    CitedAsymptotic,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::WitnessCertified => "witness-certified",
            BoundKind::CitedAsymptotic => "cited-asymptotic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyBracket {
    pub n: u64,
    pub lower: BigRational,
    pub upper: BigRational,
    pub lower_kind: BoundKind,
    pub upper_kind: BoundKind,
    /// Coloring attaining `lower`, if any survived.
    pub witness: Option<LevelColoring>,
    pub survivors: usize,
}

fn bracket_from(
    survivors: &BTreeSet<LevelColoring>,
    t: &TargetSpec,
    n: u64,
    big_n: u32,
) -> Result<EntropyBracket> {
    if n == 0 || n > 64 {
        return Err(Error::Precondition("n must lie in 1..=64".into()));
    }
    let mut best: Option<(BigRational, &LevelColoring)> = None;
    for rho in survivors {
        let f = column_frequency(rho, n)?;
        if best.as_ref().map_or(true, |(b, _)| f > *b) {
            best = Some((f, rho));
        }
    }
    let eps = pow2_neg(n as u32 - 1);
    let upper = match &t.h {
        Some(h) => h + &eps,
        None => t.r.r(big_n)? + eps + pow2_neg(big_n - 1),
    };
    let (lower, witness) = match best {
        Some((f, rho)) => (f, Some(rho.clone())),
        None => (BigRational::zero(), None),
    };
    Ok(EntropyBracket {
        n,
        lower,
        upper,
        lower_kind: BoundKind::WitnessCertified,
        upper_kind: BoundKind::CitedAsymptotic,
        witness,
        survivors: survivors.len(),
    })
}

/// Lower end: best column frequency over survivors, which is the per-site
/// count of free bits on that witness. Upper end: `h + 2^(1-n)`, or
/// `r(N) + 2^(1-n) + 2^(1-N)` without a claimed `h`.
pub fn entropy_bracket(t: &TargetSpec, n: u64, max_len: usize, big_n: u32) -> Result<EntropyBracket> {
    let survivors = surviving_levels(max_len, t, big_n)?;
    bracket_from(&survivors, t, n, big_n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub bracket: EntropyBracket,
    /// `h - lower` when `h` is known.
    pub gap: Option<BigRational>,
    /// Largest `δ(ρ)` among survivors.
    pub max_delta: BigRational,
}

/// One bracket per `n`, sharing a single survivor enumeration.
pub fn density_realization_report(
    t: &TargetSpec,
    n_list: &[u64],
    max_len: usize,
    big_n: u32,
) -> Result<Vec<ReportRow>> {
    let survivors = surviving_levels(max_len, t, big_n)?;
    let max_delta = survivors
        .iter()
        .map(delta_exact)
        .max()
        .unwrap_or_else(BigRational::zero);
    n_list
        .iter()
        .map(|&n| {
            let bracket = bracket_from(&survivors, t, n, big_n)?;
            Ok(ReportRow {
                gap: t.h.as_ref().map(|h| h - &bracket.lower),
                bracket,
                max_delta: max_delta.clone(),
            })
        })
        .collect()
}

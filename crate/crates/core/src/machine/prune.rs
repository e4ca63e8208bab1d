//! The pruning loop in exact arithmetic: at iteration `N`, read the column
//! bits at the residue positions for `2^N` and stop once their share
//! exceeds `r(N) + 2^-N`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basex::{delta_exact, LevelColoring};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, pow2_neg};
use crate::geometry::residue_levels;

/// A target sequence `r(1), r(2), ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RSeq {
    Const(BigRational),
    /// `r(N)` is the `N`-th entry.
    List(Vec<BigRational>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RSeqDef {
    Const { p: i64, q: i64 },
    List { values: Vec<String> },
}

impl RSeq {
    pub fn r(&self, big_n: u32) -> Result<BigRational> {
        match self {
            RSeq::Const(c) => Ok(c.clone()),
            RSeq::List(v) => v.get(big_n as usize - 1).cloned().ok_or_else(|| {
                Error::Precondition(format!(
                    "target sequence has {} terms, r({big_n}) requested",
                    v.len()
                ))
            }),
        }
    }

    /// `{"kind":"const","p":1,"q":2}` or `{"kind":"list","values":["3/4",...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<RSeqDef>(text)? {
            RSeqDef::Const { p, q } => {
                if q == 0 {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Ok(RSeq::Const(BigRational::new(p.into(), q.into())))
            }
            RSeqDef::List { values } => Ok(RSeq::List(
                values.iter().map(|v| parse_rational(v)).collect::<Result<_>>()?,
            )),
        }
    }
}

impl FromStr for RSeq {
    type Err = Error;

    /// `const:P/Q` or `list:A,B,...`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(v) = s.strip_prefix("const:") {
            return Ok(RSeq::Const(parse_rational(v)?));
        }
        if let Some(v) = s.strip_prefix("list:") {
            let vals = v
                .split(',')
                .map(|x| parse_rational(x.trim()))
                .collect::<Result<Vec<_>>>()?;
            if vals.is_empty() {
                return Err(Error::Parse("empty list".into()));
            }
            return Ok(RSeq::List(vals));
        }
        Err(Error::Parse(format!(
            "target `{s}`: expected const:P/Q or list:A,B,..."
        )))
    }
}

impl fmt::Display for RSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RSeq::Const(c) => write!(f, "const:{}", format_rational(c)),
            RSeq::List(v) => {
                let parts: Vec<String> = v.iter().map(format_rational).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

/// One pass of the loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterTrace {
    pub big_n: u32,
    pub r: BigRational,
    /// Share of 1s among the `2^N` residue positions.
    pub delta: BigRational,
    /// Bit of the one position whose residue is 0 mod `2^N`.
    pub rho_prime: bool,
    /// Highest level read in this pass.
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneVerdict {
    Halted { at: u32 },
    Survived { through: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneOutcome {
    pub verdict: PruneVerdict,
    pub trace: Vec<IterTrace>,
}

impl PruneOutcome {
    pub fn halted(&self) -> bool {
        matches!(self.verdict, PruneVerdict::Halted { .. })
    }
}

/// Levels of the residue positions for `N = 1..=n_max`, computed once and
/// shared across colorings.
#[derive(Clone, Debug)]
pub struct PruneTable {
    /// `levels[N-1]` lists `(level, residue is 0)` per position.
    levels: Vec<Vec<(u32, bool)>>,
}

impl PruneTable {
    pub fn new(n_max: u32) -> Result<Self> {
        let levels = (1..=n_max)
            .map(|big_n| {
                Ok(residue_levels(big_n)?
                    .into_iter()
                    .map(|(level, residue)| (level, residue == 0))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(PruneTable { levels })
    }

    pub fn n_max(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Highest net level read by any iteration.
    pub fn levels_read(&self) -> u32 {
        self.levels.iter().flatten().map(|l| l.0).max().unwrap_or(0)
    }
}

/// Runs iterations `N = 1..=n_max`. Each iteration also checks
/// `δ_N = sum_{n<=N} ρ_n 2^-n + ρ' 2^-N` exactly and fails loudly if it
/// does not hold.
pub fn prune_run(rho: &LevelColoring, r: &RSeq, n_max: u32) -> Result<PruneOutcome> {
    prune_run_with(&PruneTable::new(n_max)?, rho, r)
}

pub fn prune_run_with(table: &PruneTable, rho: &LevelColoring, r: &RSeq) -> Result<PruneOutcome> {
    let mut trace = Vec::new();
    let n_max = table.n_max();
    for (big_n, positions) in (1..=n_max).zip(&table.levels) {
        let rn = r.r(big_n)?;
        let mut ones = 0u64;
        let mut rho_prime = None;
        let mut max_level = 0;
        for &(level, zero) in positions {
            max_level = max_level.max(level);
            let bit = rho.bit(level);
            ones += bit as u64;
            if zero {
                rho_prime = Some(bit);
            }
        }
        let rho_prime = rho_prime.expect("every residue is hit");
        let scale = BigInt::from(1u64) << big_n as usize;
        let delta = BigRational::new(BigInt::from(ones), scale.clone());
        let mut prefix = BigRational::zero();
        for n in 1..=big_n.min(rho.len() as u32) {
            if rho.bit(n) {
                prefix += pow2_neg(n);
            }
        }
        let rhs = prefix + BigRational::new(BigInt::from(rho_prime as u8), scale);
        if delta != rhs {
            return Err(Error::Precondition(format!(
                "share identity failed at N={big_n}: {} != {}",
                format_rational(&delta),
                format_rational(&rhs)
            )));
        }
        let halt = delta > &rn + pow2_neg(big_n);
        trace.push(IterTrace {
            big_n,
            r: rn,
            delta,
            rho_prime,
            max_level,
        });
        if halt {
            return Ok(PruneOutcome {
                verdict: PruneVerdict::Halted { at: big_n },
                trace,
            });
        }
    }
    Ok(PruneOutcome {
        verdict: PruneVerdict::Survived { through: n_max },
        trace,
    })
}

/// Highest net level read by iterations `1..=n_max`.
pub fn levels_read(n_max: u32) -> Result<u32> {
    Ok(PruneTable::new(n_max)?.levels_read())
}

/// `|δ_N - δ(ρ)|`, for reporting.
pub fn delta_gap(rho: &LevelColoring, t: &IterTrace) -> BigRational {
    let d = delta_exact(rho);
    if t.delta > d {
        &t.delta - d
    } else {
        d - &t.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn lc(s: &str) -> LevelColoring {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let half = RSeq::Const(ratio(1, 2));
        let o = prune_run(&lc("11"), &half, 8).unwrap();
        assert_eq!(o.verdict, PruneVerdict::Halted { at: 3 });
        assert_eq!(o.trace[1].delta, ratio(3, 4));
        assert_eq!(o.trace[2].delta, ratio(3, 4));
        assert!(!o.trace[1].rho_prime && !o.trace[2].rho_prime);

        for r in [ratio(0, 1), ratio(1, 3), ratio(1, 1)] {
            let o = prune_run(&lc("0"), &RSeq::Const(r), 8).unwrap();
            assert_eq!(o.verdict, PruneVerdict::Survived { through: 8 });
        }
        let o = prune_run(&lc("1"), &half, 8).unwrap();
        assert_eq!(o.verdict, PruneVerdict::Survived { through: 8 });
    }

    #[test]
    fn short_list_is_an_error() {
        let r: RSeq = "list:3/4,5/8".parse().unwrap();
        assert!(prune_run(&lc("0"), &r, 2).is_ok());
        assert!(prune_run(&lc("0"), &r, 3).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("const:1/2".parse::<RSeq>().unwrap(), RSeq::Const(ratio(1, 2)));
        assert_eq!(RSeq::from_json(r#"{"kind":"const","p":1,"q":2}"#).unwrap(), RSeq::Const(ratio(1, 2)));
        let l = RSeq::from_json(r#"{"kind":"list","values":["3/4","5/8"]}"#).unwrap();
        assert_eq!(l, RSeq::List(vec![ratio(3, 4), ratio(5, 8)]));
        assert_eq!(l.to_string(), "list:3/4,5/8");
        assert!("half".parse::<RSeq>().is_err());
    }

    #[test]
    fn exhaustive_identity_small() {
        for rho in LevelColoring::all_up_to(6) {
            let o = prune_run(&rho, &RSeq::Const(ratio(1, 1)), 5).unwrap();
            for t in &o.trace {
                assert!(delta_gap(&rho, t) <= pow2_neg(t.big_n) + pow2_neg(rho.len() as u32));
            }
        }
    }

    #[test]
    fn trace_ignores_unread_levels() {
        let n_max = 4;
        let top = levels_read(n_max).unwrap() as usize;
        let r = RSeq::Const(ratio(3, 8));
        for code in 0..1u64 << 5 {
            let base = LevelColoring::from_code(code, 5.min(top));
            let mut bits = base.bits().to_vec();
            bits.resize(top, false);
            bits.extend([true, true, false, true]);
            let extended = LevelColoring::new(bits);
            assert_eq!(
                prune_run(&base, &r, n_max).unwrap(),
                prune_run(&extended, &r, n_max).unwrap()
            );
        }
    }

    #[test]
    fn small_gap_halts_late() {
        // delta - h = 1/16 needs 2^-N < 1/16, so the halt waits for N = 5
        let o = prune_run(&lc("1"), &RSeq::Const(ratio(7, 16)), 8).unwrap();
        assert_eq!(o.verdict, PruneVerdict::Halted { at: 5 });
    }
}

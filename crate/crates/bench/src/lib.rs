//! Shared fixtures for the criterion benches.

use num_bigint::BigInt;
use num_rational::BigRational;
use shiftlab_core::{LevelColoring, RSeq};

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Level coloring with `rho_l = 1` on every third level.
pub fn sparse_levels(len: usize) -> LevelColoring {
    LevelColoring::new((0..len).map(|l| l % 3 == 0).collect())
}

/// Constant target sitting just above the density of [`sparse_levels`].
pub fn target_above(len: usize) -> RSeq {
    let rho = sparse_levels(len);
    let d = shiftlab_core::basex::delta_exact(&rho);
    RSeq::Const(d + ratio(1, 1 << 20))
}

//! Built-in syntaxes used by the CLI and the tests.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::lattice::Shape;
use crate::syntax::{Mode, Syntax};

/// 1D golden mean shift: the word `11` is forbidden.
pub fn golden_mean() -> Syntax {
    let a = Arc::new(Alphabet::numeric(2));
    let shape = Shape::boxed(&[0], &[1]).unwrap();
    Syntax::new(a, shape, Mode::Forbidden, vec![vec![Symbol(1), Symbol(1)]]).unwrap()
}

/// 2D hard squares on the 2x2 window: no two orthogonally adjacent `1`s.
pub fn hard_squares() -> Syntax {
    let a = Arc::new(Alphabet::numeric(2));
    let shape = Shape::boxed(&[0, 0], &[1, 1]).unwrap();
    // Offsets in order: (0,0) (0,1) (1,0) (1,1).
    let mut forbidden = Vec::new();
    for code in 0u32..16 {
        let v: Vec<u32> = (0..4).map(|i| (code >> i) & 1).collect();
        let clash = (v[0] & v[1]) | (v[0] & v[2]) | (v[1] & v[3]) | (v[2] & v[3]);
        if clash == 1 {
            forbidden.push(v.into_iter().map(Symbol).collect());
        }
    }
    Syntax::new(a, shape, Mode::Forbidden, forbidden).unwrap()
}

/// Full shift on `k` numeric symbols in dimension `dim`.
pub fn full_shift(k: usize, dim: usize) -> Result<Syntax> {
    if k == 0 || dim == 0 {
        return Err(Error::InvalidDefinition("full shift needs k >= 1 and dim >= 1".into()));
    }
    Ok(Syntax::full_shift(Arc::new(Alphabet::numeric(k)), dim))
}

/// Resolves `golden`, `hard-squares`, `full:K` or `full:K:D`.
pub fn by_name(name: &str) -> Result<Syntax> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad number `{s}` in builtin `{name}`")))
    };
    match parts.as_slice() {
        ["golden"] => Ok(golden_mean()),
        ["hard-squares"] => Ok(hard_squares()),
        ["full", k] => full_shift(num(k)?, 1),
        ["full", k, d] => full_shift(num(k)?, num(d)?),
        _ => Err(Error::Parse(format!("unknown builtin syntax `{name}`"))),
    }
}

//! Exact rational helpers and certified `log2` enclosures.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Fractional bits produced by the squaring method; the enclosure width of
/// `log2 n` is at most `2^-FRACTION_BITS` plus rounding slack.
pub const FRACTION_BITS: u32 = 44;
const FIXED_POINT: u64 = 160;

/// Closed rational interval, or the marker for `log2 0`.
#[derive(Clone, PartialEq, Eq)]
pub enum Enclosure {
    NegInfinity,
    Interval { lo: BigRational, hi: BigRational },
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Enclosure::NegInfinity => write!(f, "-inf"),
            Enclosure::Interval { lo, hi } => write!(
                f,
                "[{}, {}]",
                decimal(lo, 12, Rounding::Floor),
                decimal(hi, 12, Rounding::Ceil)
            ),
        }
    }
}

impl Enclosure {
    pub fn exact(r: BigRational) -> Self {
        Enclosure::Interval { lo: r.clone(), hi: r }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure::Interval { lo, hi }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Enclosure::NegInfinity)
    }

    pub fn lo(&self) -> Option<&BigRational> {
        match self {
            Enclosure::Interval { lo, .. } => Some(lo),
            Enclosure::NegInfinity => None,
        }
    }

    pub fn hi(&self) -> Option<&BigRational> {
        match self {
            Enclosure::Interval { hi, .. } => Some(hi),
            Enclosure::NegInfinity => None,
        }
    }

    /// Width of the interval; `None` for the marker.
    pub fn width(&self) -> Option<BigRational> {
        match self {
            Enclosure::Interval { lo, hi } => Some(hi - lo),
            Enclosure::NegInfinity => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Enclosure::Interval { lo, hi } if lo == hi)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        matches!(self, Enclosure::Interval { lo, hi } if lo <= x && x <= hi)
    }

    /// Multiplies by a positive rational.
    pub fn scale(&self, factor: &BigRational) -> Enclosure {
        assert!(factor.is_positive(), "scale factor must be positive");
        match self {
            Enclosure::NegInfinity => Enclosure::NegInfinity,
            Enclosure::Interval { lo, hi } => Enclosure::new(lo * factor, hi * factor),
        }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo().map_or(f64::NEG_INFINITY, to_f64)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi().map_or(f64::NEG_INFINITY, to_f64)
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_biguint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// `2^-k` as a rational.
pub fn pow2_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Certified enclosure of `log2 n`; exact for powers of two.
pub fn log2_biguint(n: &BigUint) -> Enclosure {
    if n.is_zero() {
        return Enclosure::NegInfinity;
    }
    let e = n.bits() - 1;
    let er = BigRational::from_integer(BigInt::from(e));
    if n.trailing_zeros() == Some(e) {
        return Enclosure::exact(er);
    }
    let p = FIXED_POINT;
    // x = n / 2^e in [1, 2), as a fixed point with p fractional bits.
    let (mut lo, mut hi) = if e >= p {
        let lo: BigUint = n >> (e - p);
        let exact = (&lo << (e - p)) == *n;
        let hi = if exact { lo.clone() } else { &lo + 1u32 };
        (lo, hi)
    } else {
        let v: BigUint = n << (p - e);
        (v.clone(), v)
    };
    let two: BigUint = BigUint::one() << (p + 1);
    let mut lo_bits = BigUint::zero();
    let mut hi_bits = BigUint::zero();
    for _ in 0..FRACTION_BITS {
        lo = (&lo * &lo) >> p;
        let sq = &hi * &hi;
        hi = ceil_shift(&sq, p);
        lo_bits <<= 1;
        hi_bits <<= 1;
        if lo >= two {
            lo_bits += 1u32;
            lo >>= 1;
        }
        if hi >= two {
            hi_bits += 1u32;
            hi = ceil_shift(&hi, 1);
        }
    }
    let denom = BigInt::one() << FRACTION_BITS as usize;
    let lo_r = &er + BigRational::new(BigInt::from(lo_bits), denom.clone());
    let hi_r = &er + BigRational::new(BigInt::from(hi_bits) + 1, denom);
    Enclosure::new(lo_r, hi_r)
}

fn ceil_shift(x: &BigUint, k: u64) -> BigUint {
    let q: BigUint = x >> k;
    if (&q << k) == *x {
        q
    } else {
        q + 1u32
    }
}

/// Certified enclosure of `log2 r` for `r >= 0`.
pub fn log2_rational(r: &BigRational) -> Result<Enclosure> {
    if r.is_negative() {
        return Err(Error::Precondition("log2 of a negative number".into()));
    }
    if r.is_zero() {
        return Ok(Enclosure::NegInfinity);
    }
    let p = r.numer().magnitude();
    let q = r.denom().magnitude();
    let lp = log2_biguint(p);
    let lq = log2_biguint(q);
    match (lp, lq) {
        (Enclosure::Interval { lo: a, hi: b }, Enclosure::Interval { lo: c, hi: d }) => {
            Ok(Enclosure::new(a - d, b - c))
        }
        _ => unreachable!("both positive"),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

/// Decimal rendering with a fixed number of places.
pub fn decimal(r: &BigRational, places: usize, rounding: Rounding) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = r * BigRational::from_integer(scale.clone());
    let v = match rounding {
        Rounding::Floor => scaled.floor().to_integer(),
        Rounding::Ceil => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let neg = v.is_negative();
    let (int, frac) = v.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places)
    }
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let r = BigRational::new(n, BigInt::from(10u32).pow(frac.len() as u32));
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_width() -> BigRational {
        pow2_neg(40)
    }

    #[test]
    fn powers_of_two_are_exact() {
        for k in 0..70u32 {
            let e = log2_biguint(&(BigUint::one() << k));
            assert!(e.is_exact());
            assert_eq!(e.lo().unwrap(), &ratio(k as i64, 1));
        }
        assert!(log2_biguint(&BigUint::zero()).is_neg_infinity());
    }

    #[test]
    fn known_values_are_enclosed() {
        let e = log2_biguint(&BigUint::from(1234u32));
        assert!(e.lo_f64() <= 1234f64.log2() + 1e-12 && 1234f64.log2() - 1e-12 <= e.hi_f64());
        assert!(e.width().unwrap() <= max_width());
        let r = log2_rational(&ratio(3, 7)).unwrap();
        assert!(r.lo_f64() < (3.0f64 / 7.0).log2() + 1e-12);
        assert!(r.hi_f64() > (3.0f64 / 7.0).log2() - 1e-12);
    }

    #[test]
    fn decimal_and_parse_round_trip() {
        assert_eq!(decimal(&ratio(1, 3), 4, Rounding::Floor), "0.3333");
        assert_eq!(decimal(&ratio(1, 3), 4, Rounding::Ceil), "0.3334");
        assert_eq!(decimal(&ratio(-1, 8), 2, Rounding::Nearest), "-0.13");
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-2").unwrap(), ratio(-2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
    }

    proptest! {
        #[test]
        fn enclosure_brackets_float_log(n in 1u64..u64::MAX) {
            let e = log2_biguint(&BigUint::from(n));
            let f = (n as f64).log2();
            prop_assert!(e.lo_f64() <= f + 1e-9);
            prop_assert!(e.hi_f64() >= f - 1e-9);
            prop_assert!(e.width().unwrap() <= max_width());
        }

        #[test]
        fn big_numbers_keep_narrow(a in 1u64.., b in 1u64.., c in 1u64..) {
            let n = BigUint::from(a) * BigUint::from(b) * BigUint::from(c) * BigUint::from(a);
            let e = log2_biguint(&n);
            prop_assert!(e.width().unwrap() <= max_width());
            // log2 of a product is the sum of logs, within both widths
            let ea = log2_biguint(&(BigUint::from(a) * BigUint::from(a)));
            let rest = log2_biguint(&(BigUint::from(b) * BigUint::from(c)));
            prop_assert!(e.lo().unwrap() <= &(ea.hi().unwrap() + rest.hi().unwrap()));
            prop_assert!(e.hi().unwrap() >= &(ea.lo().unwrap() + rest.lo().unwrap()));
        }
    }
}

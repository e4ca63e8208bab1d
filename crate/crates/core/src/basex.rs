//! The layered base patterns: net bullets, 0/1 column marks chosen per
//! net level, and row arrows that carry each level's bit.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::pow2_neg;
use crate::geometry::{standard_level, TwoNet};

/// Bits `ρ_1..ρ_L`; levels past `L` read as 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelColoring {
    bits: Vec<bool>,
}

impl LevelColoring {
    pub fn new(bits: Vec<bool>) -> Self {
        LevelColoring { bits }
    }

    /// From the low `len` bits of `code`, level 1 first.
    pub fn from_code(code: u64, len: usize) -> Self {
        LevelColoring {
            bits: (0..len).map(|i| code >> i & 1 == 1).collect(),
        }
    }

    /// All colorings of each length `0..=max_len`, shortest first.
    pub fn all_up_to(max_len: usize) -> Vec<LevelColoring> {
        (0..=max_len)
            .flat_map(|l| (0..1u64 << l).map(move |c| LevelColoring::from_code(c, l)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `ρ_level`, 1-based.
    pub fn bit(&self, level: u32) -> bool {
        level >= 1 && self.bits.get(level as usize - 1).copied().unwrap_or(false)
    }
}

impl FromStr for LevelColoring {
    type Err = Error;

    /// Reads `"101"` as `ρ_1 = 1, ρ_2 = 0, ρ_3 = 1`; `""` or `"-"` is empty.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(LevelColoring::default());
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("level bits must be 0 or 1, got `{c}`"))),
            })
            .collect::<Result<_>>()?;
        Ok(LevelColoring { bits })
    }
}

impl fmt::Display for LevelColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "-");
        }
        for b in &self.bits {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// Carries a 0.
    Single,
    /// Carries a 1.
    Double,
    Blank,
}

impl Arrow {
    pub fn for_bit(bit: bool) -> Arrow {
        if bit {
            Arrow::Double
        } else {
            Arrow::Single
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct XCell {
    pub bullet: bool,
    pub bit: bool,
    pub arrow: Arrow,
}

/// An `n x n` layered pattern on `{1..n}^2`, bottom row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPattern {
    pub n: usize,
    cells: Vec<XCell>,
}

/// Largest side built by [`build_x_pattern`].
pub const MAX_X_SIDE: usize = 1 << 12;

pub fn build_x_pattern(rho: &LevelColoring, n: usize) -> Result<XPattern> {
    if n == 0 {
        return Err(Error::Precondition("side must be at least 1".into()));
    }
    if n > MAX_X_SIDE {
        return Err(Error::budget("pattern side", MAX_X_SIDE as u128));
    }
    let levels: Vec<u32> = (1..=n as i64).map(|c| standard_level(c).unwrap()).collect();
    let mut cells = Vec::with_capacity(n * n);
    for y in 0..n {
        let ly = levels[y];
        // The row meets a net point inside F_n iff its level has a column there.
        let arrow = if 1usize << (ly - 1) <= n {
            Arrow::for_bit(rho.bit(ly))
        } else {
            Arrow::Blank
        };
        for &lx in &levels {
            cells.push(XCell {
                bullet: lx == ly,
                bit: rho.bit(lx),
                arrow,
            });
        }
    }
    Ok(XPattern { n, cells })
}

impl XPattern {
    pub fn from_cells(n: usize, cells: Vec<XCell>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::InvalidPattern(format!(
                "{} cells for a {n}x{n} pattern",
                cells.len()
            )));
        }
        Ok(XPattern { n, cells })
    }

    /// Cell at 1-based `(x, y)`.
    pub fn get(&self, x: usize, y: usize) -> XCell {
        self.cells[(y - 1) * self.n + x - 1]
    }

    pub fn set(&mut self, x: usize, y: usize, c: XCell) {
        self.cells[(y - 1) * self.n + x - 1] = c;
    }

    pub fn cells(&self) -> &[XCell] {
        &self.cells
    }

    /// Three text lines per row, top row first: bullets, bits, arrows.
    pub fn render(&self, unicode: bool) -> String {
        let (on, off, single, double, blank) = if unicode {
            ('•', '∘', '↔', '⇔', '·')
        } else {
            ('*', 'o', '-', '=', '.')
        };
        let mut out = String::new();
        for y in (1..=self.n).rev() {
            let row: Vec<XCell> = (1..=self.n).map(|x| self.get(x, y)).collect();
            out.extend(row.iter().map(|c| if c.bullet { on } else { off }));
            out.push('\n');
            out.extend(row.iter().map(|c| if c.bit { '1' } else { '0' }));
            out.push('\n');
            out.extend(row.iter().map(|c| match c.arrow {
                Arrow::Single => single,
                Arrow::Double => double,
                Arrow::Blank => blank,
            }));
            out.push('\n');
        }
        out
    }
}

/// First violated local rule, if any.
pub fn x_violation(p: &XPattern) -> Option<String> {
    let n = p.n;
    for y in 1..=n {
        for x in 1..=n {
            let c = p.get(x, y);
            if y < n && p.get(x, y + 1).bit != c.bit {
                return Some(format!("bits differ vertically at ({x},{y})"));
            }
            if x < n && p.get(x + 1, y).arrow != c.arrow {
                return Some(format!("arrows differ horizontally at ({x},{y})"));
            }
            if c.bullet && c.arrow != Arrow::for_bit(c.bit) {
                return Some(format!("arrow does not match the bit under the bullet at ({x},{y})"));
            }
        }
    }
    None
}

pub fn check_x_constraints(p: &XPattern) -> bool {
    x_violation(p).is_none()
}

/// Whether the bullet layer equals the net restricted to `{1..n}^2`.
pub fn bullets_match_net(p: &XPattern, net: &TwoNet) -> Result<bool> {
    for y in 1..=p.n {
        for x in 1..=p.n {
            if p.get(x, y).bullet != net.contains(x as i64, y as i64)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `sum_n ρ_n 2^-n`.
pub fn delta_exact(rho: &LevelColoring) -> BigRational {
    let mut d = BigRational::zero();
    for (i, b) in rho.bits.iter().enumerate() {
        if *b {
            d += pow2_neg(i as u32 + 1);
        }
    }
    d
}

/// Share of columns `1..=n` marked 1.
pub fn column_frequency(rho: &LevelColoring, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let ones = ones_in_columns(rho, n);
    Ok(BigRational::new(BigInt::from(ones), BigInt::from(n)))
}

/// Number of columns `c <= n` with `ρ_{level(c)} = 1`: level `l` holds the
/// columns `2^(l-1) (2j+1)`, of which `floor((n / 2^(l-1) + 1) / 2)` are at
/// most `n`.
pub fn ones_in_columns(rho: &LevelColoring, n: u64) -> u64 {
    rho.bits
        .iter()
        .enumerate()
        .filter(|(i, b)| **b && *i < 64)
        .map(|(i, _)| ((n >> i) + 1) / 2)
        .sum()
}

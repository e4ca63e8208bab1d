//! Nets of dyadic grids and base-5 boards.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Levels `1..=L` of a net. `I_n = 2^n Z + col`, `J_n = 2^n Z + row`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoNet {
    /// `I_n = J_n = 2^n Z + 2^(n-1)` for every level.
    Standard,
    /// Finite prefix of levels, given as `(col offset, row offset)` per level.
    Finite(Vec<(i64, i64)>),
}

impl TwoNet {
    /// Checks that the column classes (and the row classes) of different
    /// levels are disjoint.
    pub fn finite(levels: Vec<(i64, i64)>) -> Result<Self> {
        for i in 0..levels.len() {
            for j in 0..i {
                let m = 1i64 << (j + 1);
                if (levels[i].0 - levels[j].0).rem_euclid(m) == 0 {
                    return Err(Error::InvalidDefinition(format!(
                        "column classes of levels {} and {} meet",
                        j + 1,
                        i + 1
                    )));
                }
                if (levels[i].1 - levels[j].1).rem_euclid(m) == 0 {
                    return Err(Error::InvalidDefinition(format!(
                        "row classes of levels {} and {} meet",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        if levels.len() > 62 {
            return Err(Error::InvalidDefinition("at most 62 levels".into()));
        }
        Ok(TwoNet::Finite(levels))
    }

    /// Level of column coordinate `c`.
    pub fn col_level(&self, c: i64) -> Result<Option<u32>> {
        self.level(c, |l| l.0)
    }

    /// Level of row coordinate `c`.
    pub fn row_level(&self, c: i64) -> Result<Option<u32>> {
        self.level(c, |l| l.1)
    }

    fn level(&self, c: i64, pick: impl Fn(&(i64, i64)) -> i64) -> Result<Option<u32>> {
        match self {
            TwoNet::Standard => standard_level(c).map(Some),
            TwoNet::Finite(levels) => Ok(levels
                .iter()
                .enumerate()
                .find(|(i, l)| (c - pick(l)).rem_euclid(1i64 << (i + 1)) == 0)
                .map(|(i, _)| i as u32 + 1)),
        }
    }

    /// Whether `(a, b)` lies on `I_m x J_m` for some level `m`.
    pub fn contains(&self, a: i64, b: i64) -> Result<bool> {
        let (x, y) = (self.col_level(a)?, self.row_level(b)?);
        Ok(x.is_some() && x == y)
    }
}

/// Level of `c` in the standard net: the 2-adic valuation plus one.
pub fn standard_level(c: i64) -> Result<u32> {
    if c == 0 {
        return Err(Error::Precondition(
            "coordinate 0 lies in every level of the standard net".into(),
        ));
    }
    Ok(c.trailing_zeros() + 1)
}

pub fn net_level(c: i64, net: &TwoNet) -> Result<Option<u32>> {
    net.col_level(c)
}

/// Largest board level whose index set is materialized.
pub const MAX_I_SET_LEVEL: u32 = 11;

/// `I_n`, sorted: `I_1 = {1,2,4,5}` and
/// `I_{n+1} = I_n ∪ (I_n + 5^n) ∪ (I_n + 3*5^n) ∪ (I_n + 4*5^n)`.
pub fn i_set(n: u32) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Precondition("board level starts at 1".into()));
    }
    if n > MAX_I_SET_LEVEL {
        return Err(Error::budget("index set level", MAX_I_SET_LEVEL as u128));
    }
    let mut set = vec![1u64, 2, 4, 5];
    let mut p = 5u64;
    for _ in 1..n {
        let mut next = Vec::with_capacity(set.len() * 4);
        for shift in [0, p, 3 * p, 4 * p] {
            next.extend(set.iter().map(|x| x + shift));
        }
        set = next;
        p *= 5;
    }
    Ok(set)
}

/// Membership in `I = ∪ I_n`: `x - 1` has no base-5 digit 2.
pub fn in_i(x: u64) -> bool {
    if x == 0 {
        return false;
    }
    let mut v = x - 1;
    while v > 0 {
        if v % 5 == 2 {
            return false;
        }
        v /= 5;
    }
    true
}

const DIGIT_UP: [u32; 4] = [0, 1, 3, 4];

/// The `k`-th smallest element of `I` (1-based).
pub fn i_enum(k: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Precondition("enumeration starts at 1".into()));
    }
    let mut v = k - 1;
    let mut out = BigUint::zero();
    let mut p = BigUint::one();
    while v > 0 {
        out += &p * DIGIT_UP[(v % 4) as usize];
        p *= 5u32;
        v /= 4;
    }
    Ok(out + 1u32)
}

/// Inverse of [`i_enum`]; `None` when `x` is not in `I`.
pub fn i_index(x: &BigUint) -> Option<BigUint> {
    if x.is_zero() {
        return None;
    }
    let mut v = x - 1u32;
    let mut out = BigUint::zero();
    let mut p = BigUint::one();
    let five = BigUint::from(5u32);
    while !v.is_zero() {
        let (q, r) = v.div_rem(&five);
        let d = match r.to_u32().unwrap() {
            0 => 0u32,
            1 => 1,
            3 => 2,
            4 => 3,
            _ => return None,
        };
        out += &p * d;
        p *= 4u32;
        v = q;
    }
    Some(out + 1u32)
}

/// Lines leaving a board cell, as a bit set.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dirs(u8);

impl Dirs {
    pub const UP: Dirs = Dirs(1);
    pub const DOWN: Dirs = Dirs(2);
    pub const LEFT: Dirs = Dirs(4);
    pub const RIGHT: Dirs = Dirs(8);

    pub fn empty() -> Dirs {
        Dirs(0)
    }

    pub fn has(self, d: Dirs) -> bool {
        self.0 & d.0 == d.0
    }

    pub fn with(self, d: Dirs) -> Dirs {
        Dirs(self.0 | d.0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// Box-drawing glyph.
    pub fn glyph(self) -> char {
        const G: [char; 16] = [
            ' ', '╵', '╷', '│', '╴', '┘', '┐', '┤', '╶', '└', '┌', '├', '─', '┴', '┬', '┼',
        ];
        G[self.0 as usize]
    }

    /// `|`, `-`, or `+` for junctions.
    pub fn ascii(self) -> char {
        let vert = self.has(Dirs::UP) || self.has(Dirs::DOWN);
        let horiz = self.has(Dirs::LEFT) || self.has(Dirs::RIGHT);
        match (vert, horiz) {
            (true, true) => '+',
            (true, false) => '|',
            (false, true) => '-',
            (false, false) => ' ',
        }
    }

    /// The eleven board symbols: two straight lines, four corners, four
    /// tees and the cross.
    pub fn board_alphabet() -> Vec<Dirs> {
        (0..16u8)
            .map(Dirs)
            .filter(|d| {
                let v = d.has(Dirs::UP) || d.has(Dirs::DOWN);
                let h = d.has(Dirs::LEFT) || d.has(Dirs::RIGHT);
                let straight = *d == Dirs(3) || *d == Dirs(12);
                straight || (v && h)
            })
            .collect()
    }
}

impl fmt::Debug for Dirs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.glyph())
    }
}

/// Largest board level that [`board`] builds.
pub const MAX_BOARD_LEVEL: u32 = 4;

/// The `n`-board `B_n = (I_n x [1,5^n]) ∪ ([1,5^n] x I_n)`.
#[derive(Clone, Debug)]
pub struct BoardSpec {
    pub n: u32,
    pub side: u64,
    /// `I_n`, sorted.
    pub index: Vec<u64>,
    member: Vec<bool>,
}

pub fn board(n: u32) -> Result<BoardSpec> {
    if n == 0 {
        return Err(Error::Precondition("board level starts at 1".into()));
    }
    if n > MAX_BOARD_LEVEL {
        return Err(Error::budget("board level", MAX_BOARD_LEVEL as u128));
    }
    let index = i_set(n)?;
    let side = 5u64.pow(n);
    let mut member = vec![false; side as usize + 2];
    for &i in &index {
        member[i as usize] = true;
    }
    Ok(BoardSpec {
        n,
        side,
        index,
        member,
    })
}

impl BoardSpec {
    pub fn in_index(&self, c: u64) -> bool {
        (c as usize) < self.member.len() && self.member[c as usize]
    }

    fn in_range(&self, c: u64) -> bool {
        (1..=self.side).contains(&c)
    }

    pub fn is_cell(&self, x: u64, y: u64) -> bool {
        self.in_range(x) && self.in_range(y) && (self.in_index(x) || self.in_index(y))
    }

    pub fn is_node(&self, x: u64, y: u64) -> bool {
        self.in_range(x) && self.in_range(y) && self.in_index(x) && self.in_index(y)
    }

    /// Cells in raster order, bottom row first.
    pub fn cells(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (1..=self.side).flat_map(move |y| {
            (1..=self.side)
                .filter(move |&x| self.is_cell(x, y))
                .map(move |x| (x, y))
        })
    }

    pub fn cell_count(&self) -> u64 {
        let m = self.index.len() as u64;
        2 * m * self.side - m * m
    }

    pub fn nodes(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.index
            .iter()
            .flat_map(move |&y| self.index.iter().map(move |&x| (x, y)))
    }

    /// Lines at a cell: vertical along columns in `I_n`, horizontal along
    /// rows in `I_n`, cut at the board edge. `None` off the board.
    pub fn symbol(&self, x: u64, y: u64) -> Option<Dirs> {
        if !self.is_cell(x, y) {
            return None;
        }
        let mut d = Dirs::empty();
        if self.in_index(x) {
            if y < self.side {
                d = d.with(Dirs::UP);
            }
            if y > 1 {
                d = d.with(Dirs::DOWN);
            }
        }
        if self.in_index(y) {
            if x < self.side {
                d = d.with(Dirs::RIGHT);
            }
            if x > 1 {
                d = d.with(Dirs::LEFT);
            }
        }
        Some(d)
    }

    /// Character grid, top row first; `.` off the board.
    pub fn render(&self, unicode: bool) -> String {
        let mut out = String::with_capacity(((self.side + 1) * self.side) as usize);
        for y in (1..=self.side).rev() {
            for x in 1..=self.side {
                out.push(match self.symbol(x, y) {
                    None => '.',
                    Some(d) if unicode => d.glyph(),
                    Some(d) => d.ascii(),
                });
            }
            out.push('\n');
        }
        out
    }
}

/// `|B_n| / 25^n`.
pub fn board_density(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Precondition("board level starts at 1".into()));
    }
    let four = BigUint::from(4u32).pow(n);
    let five = BigUint::from(5u32).pow(n);
    let cells = BigUint::from(2u32) * &four * &five - &four * &four;
    Ok(BigRational::new(cells.into(), (&five * &five).into()))
}

/// One element of a residue position set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePosition {
    /// `t` in `1 + 5^q + ... + 5^(tq)`.
    pub t: u64,
    pub position: BigUint,
    /// Index of `position` in the enumeration of `I`.
    pub index: BigUint,
    pub residue: u64,
}

/// Largest `N` accepted by [`residue_positions`].
pub const MAX_RESIDUE_LEVEL: u32 = 12;

/// Least `q >= 1` with `5^q ≡ 1 (mod 2^N)`.
pub fn order_of_five(big_n: u32) -> u64 {
    let m = 1u128 << big_n;
    let mut q = 1;
    let mut p = 5u128 % m;
    while p != 1 % m {
        p = p * 5 % m;
        q += 1;
    }
    q
}

/// Positions `1 + 5^q + ... + 5^(tq)`, `t = 1..2^N`, with the least valid
/// `q`. Their residues mod `2^N` are all distinct.
pub fn residue_positions(big_n: u32) -> Result<Vec<ResiduePosition>> {
    residue_positions_with_q(big_n, order_of_five(big_n.max(1)))
}

/// As [`residue_positions`] with an explicit `q`, which must satisfy
/// `5^q ≡ 1 (mod 2^N)`.
pub fn residue_positions_with_q(big_n: u32, q: u64) -> Result<Vec<ResiduePosition>> {
    if big_n == 0 {
        return Err(Error::Precondition("N starts at 1".into()));
    }
    if big_n > MAX_RESIDUE_LEVEL {
        return Err(Error::budget("residue level N", MAX_RESIDUE_LEVEL as u128));
    }
    let m = 1u64 << big_n;
    let modulus = BigUint::from(m);
    if q == 0 || BigUint::from(5u32).modpow(&BigUint::from(q), &modulus) != BigUint::one() % &modulus {
        return Err(Error::Precondition(format!("5^{q} is not 1 mod 2^{big_n}")));
    }
    let step = BigUint::from(5u32).pow(q as u32);
    let step4 = BigUint::from(4u32).pow(q as u32);
    let mut out = Vec::with_capacity(m as usize);
    let (mut pw, mut pw4) = (BigUint::one(), BigUint::one());
    let (mut pos, mut index) = (BigUint::one(), BigUint::one());
    // base-5 digits of pos - 1 are all 0 or 1, so they read the same in base 4
    for t in 1..=m {
        pw *= &step;
        pw4 *= &step4;
        pos += &pw;
        index += &pw4;
        let residue = (&pos % &modulus).to_u64().unwrap();
        out.push(ResiduePosition {
            t,
            position: pos.clone(),
            index: index.clone(),
            residue,
        });
    }
    Ok(out)
}

/// Largest `N` accepted by [`residue_levels`].
pub const MAX_RESIDUE_LEVEL_FAST: u32 = 24;

/// Net level (2-adic valuation plus one) and residue mod `2^N` of each
/// residue position, without forming the positions. Arithmetic is mod
/// `2^128`, which pins valuations below 128.
pub fn residue_levels(big_n: u32) -> Result<Vec<(u32, u64)>> {
    if big_n == 0 {
        return Err(Error::Precondition("N starts at 1".into()));
    }
    if big_n > MAX_RESIDUE_LEVEL_FAST {
        return Err(Error::budget("residue level N", MAX_RESIDUE_LEVEL_FAST as u128));
    }
    let q = order_of_five(big_n);
    let step = 5u128.wrapping_pow(q as u32);
    let mask = (1u128 << big_n) - 1;
    let mut pw = 1u128;
    let mut pos = 1u128;
    let mut out = Vec::with_capacity(1 << big_n);
    for _ in 0..1u64 << big_n {
        pw = pw.wrapping_mul(step);
        pos = pos.wrapping_add(pw);
        if pos == 0 {
            return Err(Error::budget("position valuation", 128));
        }
        out.push((pos.trailing_zeros() + 1, (pos & mask) as u64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn levels() {
        assert_eq!(net_level(6, &TwoNet::Standard).unwrap(), Some(2));
        assert_eq!(net_level(1, &TwoNet::Standard).unwrap(), Some(1));
        assert_eq!(net_level(-4, &TwoNet::Standard).unwrap(), Some(3));
        assert!(net_level(0, &TwoNet::Standard).is_err());
        let one = TwoNet::finite(vec![(0, 0)]).unwrap();
        assert_eq!(net_level(3, &one).unwrap(), None);
        assert_eq!(net_level(4, &one).unwrap(), Some(1));
        assert!(TwoNet::finite(vec![(1, 1), (3, 2)]).is_err());
    }

    #[test]
    fn index_sets() {
        assert_eq!(i_set(1).unwrap(), vec![1, 2, 4, 5]);
        assert_eq!(
            i_set(2).unwrap(),
            vec![1, 2, 4, 5, 6, 7, 9, 10, 16, 17, 19, 20, 21, 22, 24, 25]
        );
        assert_eq!(i_set(3).unwrap().len(), 64);
        for n in 1..=6 {
            let s = i_set(n).unwrap();
            assert_eq!(s.len(), 4usize.pow(n));
            assert_eq!(s[0], 1);
            assert_eq!(*s.last().unwrap(), 5u64.pow(n));
            // disjoint recursion means the concatenation is already sorted
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            for (k, x) in s.iter().enumerate() {
                assert_eq!(i_enum(k as u64 + 1).unwrap(), BigUint::from(*x));
                assert!(in_i(*x));
            }
        }
        assert!(!in_i(3));
        assert!(!in_i(8));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(i_enum(1).unwrap(), BigUint::from(1u32));
        assert_eq!(i_enum(5).unwrap(), BigUint::from(6u32));
        assert_eq!(i_enum(16).unwrap(), BigUint::from(25u32));
        assert_eq!(i_index(&BigUint::from(25u32)), Some(BigUint::from(16u32)));
        assert_eq!(i_index(&BigUint::from(3u32)), None);
    }

    #[test]
    fn board_one() {
        let b = board(1).unwrap();
        assert_eq!(b.cells().count(), 24);
        assert_eq!(b.cell_count(), 24);
        assert_eq!(b.symbol(1, 1), Some(Dirs::UP.with(Dirs::RIGHT)));
        assert_eq!(b.symbol(1, 1).unwrap().glyph(), '└');
        assert_eq!(b.symbol(3, 3), None);
        assert_eq!(b.symbol(3, 1).unwrap().ascii(), '-');
        assert_eq!(b.symbol(1, 3).unwrap().ascii(), '|');
        assert_eq!(b.symbol(2, 2).unwrap().glyph(), '┼');
        let art = b.render(false);
        assert_eq!(art.lines().nth(2).unwrap(), "||.||");
        assert_eq!(art.lines().next().unwrap(), "++-++");
    }

    #[test]
    fn board_counts_and_symbols() {
        let alphabet = Dirs::board_alphabet();
        assert_eq!(alphabet.len(), 11);
        for n in 1..=3 {
            let b = board(n).unwrap();
            let expect = 2 * 4u64.pow(n) * 5u64.pow(n) - 16u64.pow(n);
            assert_eq!(b.cells().count() as u64, expect);
            assert_eq!(b.nodes().count() as u64, 16u64.pow(n));
            for (x, y) in b.cells() {
                let d = b.symbol(x, y).unwrap();
                assert!(alphabet.contains(&d), "{x},{y} {d:?}");
                assert_eq!(b.is_node(x, y), d.count() >= 2 && d != Dirs(3) && d != Dirs(12));
            }
        }
    }

    #[test]
    fn residues() {
        let one = residue_positions(1).unwrap();
        let pos: Vec<u64> = one.iter().map(|r| r.position.to_u64().unwrap()).collect();
        assert_eq!(pos, vec![6, 31]);
        assert_eq!(one.iter().map(|r| r.residue).collect::<Vec<_>>(), vec![0, 1]);
        // least order for N = 2 is q = 1
        assert_eq!(order_of_five(2), 1);
        let two = residue_positions(2).unwrap();
        let pos: Vec<u64> = two.iter().map(|r| r.position.to_u64().unwrap()).collect();
        assert_eq!(pos, vec![6, 31, 156, 781]);
        let q2 = residue_positions_with_q(2, 2).unwrap();
        let pos: Vec<u64> = q2.iter().map(|r| r.position.to_u64().unwrap()).collect();
        assert_eq!(pos, vec![26, 651, 16276, 406901]);
        assert_eq!(q2.iter().map(|r| r.residue).collect::<Vec<_>>(), vec![2, 3, 0, 1]);
        assert!(residue_positions_with_q(3, 1).is_err());
        for n in 1..=6 {
            let rs = residue_positions(n).unwrap();
            let mut seen: Vec<u64> = rs.iter().map(|r| r.residue).collect();
            seen.sort();
            assert_eq!(seen, (0..1u64 << n).collect::<Vec<_>>());
            let fast = residue_levels(n).unwrap();
            for (r, &(level, residue)) in rs.iter().zip(&fast) {
                assert_eq!(residue, r.residue);
                assert_eq!(level as u64, r.position.trailing_zeros().unwrap() + 1);
            }
            if n <= 4 {
                for r in &rs {
                    assert_eq!(i_index(&r.position).as_ref(), Some(&r.index));
                }
            }
            for r in rs.iter().filter(|r| r.index.bits() < 64) {
                assert_eq!(i_enum(r.index.to_u64().unwrap()).unwrap(), r.position);
            }
        }
    }

    #[test]
    fn densities() {
        use crate::exact::ratio;
        assert_eq!(board_density(1).unwrap(), ratio(24, 25));
        assert_eq!(board_density(2).unwrap(), ratio(544, 625));
        for n in 1..=10 {
            assert!(board_density(n + 1).unwrap() < board_density(n).unwrap());
        }
    }

    proptest! {
        #[test]
        fn enum_round_trips(k in 1u64..1_000_000) {
            let x = i_enum(k).unwrap();
            prop_assert_eq!(i_index(&x), Some(BigUint::from(k)));
            prop_assert!(in_i(x.to_u64().unwrap()));
        }

        #[test]
        fn standard_levels_partition(c in 1i64..1_000_000) {
            let l = standard_level(c).unwrap();
            prop_assert_eq!((c - (1 << (l - 1))).rem_euclid(1 << l), 0);
            prop_assert!((l as f64) <= (2.0 * c as f64).log2());
        }
    }
}

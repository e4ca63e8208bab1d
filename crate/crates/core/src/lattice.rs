//! Points, finite shapes and finite patterns on the integer lattice.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

/// A point of `Z^d`. Axis 0 is horizontal (columns), axis 1 vertical (rows).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Appends one coordinate (used when lifting to a higher dimension).
    pub fn extended(&self, c: i64) -> Point {
        let mut v = self.0.clone();
        v.push(c);
        Point(v)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add<&Point> for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Point> for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// A finite nonempty subset of `Z^d`, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dim: usize,
    offsets: Vec<Point>,
}

impl Shape {
    pub fn new(dim: usize, offsets: impl IntoIterator<Item = Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidShape("dimension must be at least 1".into()));
        }
        let set: BTreeSet<Point> = offsets.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidShape("shape is empty".into()));
        }
        if let Some(p) = set.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Shape {
            dim,
            offsets: set.into_iter().collect(),
        })
    }

    /// The box `{lo_0..=hi_0} x ... x {lo_{d-1}..=hi_{d-1}}`.
    pub fn boxed(lo: &[i64], hi: &[i64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidShape("empty box".into()));
        }
        let mut pts = vec![Vec::with_capacity(lo.len())];
        for (l, h) in lo.iter().zip(hi) {
            let mut next = Vec::with_capacity(pts.len() * (h - l + 1) as usize);
            for p in &pts {
                for c in *l..=*h {
                    let mut q: Vec<i64> = p.clone();
                    q.push(c);
                    next.push(q);
                }
            }
            pts = next;
        }
        Shape::new(lo.len(), pts.into_iter().map(Point))
    }

    /// `F_n = {1..n}^d`.
    pub fn cube_from_one(dim: usize, n: i64) -> Result<Self> {
        Shape::boxed(&vec![1; dim], &vec![n; dim])
    }

    /// Rectangle `{1..dims[0]} x ... `.
    pub fn rect(dims: &[usize]) -> Result<Self> {
        let hi: Vec<i64> = dims.iter().map(|&d| d as i64).collect();
        Shape::boxed(&vec![1; dims.len()], &hi)
    }

    /// Symmetric cube `Q_n = {-n..n}^d`.
    pub fn symmetric_cube(dim: usize, n: i64) -> Result<Self> {
        Shape::boxed(&vec![-n; dim], &vec![n; dim])
    }

    pub fn single(dim: usize) -> Self {
        Shape {
            dim,
            offsets: vec![Point::zero(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.offsets.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.offsets.binary_search(p).ok()
    }

    pub fn min_corner(&self) -> Point {
        Point(
            (0..self.dim)
                .map(|i| self.offsets.iter().map(|p| p.0[i]).min().unwrap())
                .collect(),
        )
    }

    pub fn max_corner(&self) -> Point {
        Point(
            (0..self.dim)
                .map(|i| self.offsets.iter().map(|p| p.0[i]).max().unwrap())
                .collect(),
        )
    }

    /// Side lengths of the bounding box.
    pub fn extents(&self) -> Vec<usize> {
        let lo = self.min_corner();
        let hi = self.max_corner();
        lo.0.iter()
            .zip(&hi.0)
            .map(|(l, h)| (h - l + 1) as usize)
            .collect()
    }

    /// Sup-norm diameter.
    pub fn diameter(&self) -> i64 {
        self.extents().iter().map(|&e| e as i64 - 1).max().unwrap_or(0)
    }

    pub fn translate(&self, v: &Point) -> Shape {
        Shape {
            dim: self.dim,
            offsets: self.offsets.iter().map(|p| p + v).collect(),
        }
    }

    /// Translate so the bounding box starts at the origin.
    pub fn normalized(&self) -> (Shape, Point) {
        let lo = self.min_corner();
        let neg = Point(lo.0.iter().map(|c| -c).collect());
        (self.translate(&neg), lo)
    }

    pub fn minkowski_sum(&self, other: &Shape) -> Result<Shape> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut set = BTreeSet::new();
        for a in &self.offsets {
            for b in &other.offsets {
                set.insert(a + b);
            }
        }
        Shape::new(self.dim, set)
    }

    pub fn union(&self, other: &Shape) -> Result<Shape> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Shape::new(
            self.dim,
            self.offsets.iter().chain(&other.offsets).cloned(),
        )
    }

    pub fn difference(&self, other: &Shape) -> Option<Shape> {
        let rest: Vec<Point> = self
            .offsets
            .iter()
            .filter(|p| !other.contains(p))
            .cloned()
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(Shape {
                dim: self.dim,
                offsets: rest,
            })
        }
    }

    pub fn is_subset_of(&self, other: &Shape) -> bool {
        self.offsets.iter().all(|p| other.contains(p))
    }

    /// All `u` with `window + u ⊆ self`.
    pub fn placements_of(&self, window: &Shape) -> Vec<Point> {
        let anchor = &window.offsets[0];
        let mut out = Vec::new();
        for c in &self.offsets {
            let u = c - anchor;
            if window.offsets.iter().all(|w| self.contains(&(w + &u))) {
                out.push(u);
            }
        }
        out
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.offsets).finish()
    }
}

/// A coloring of a finite domain by symbols of an alphabet.
#[derive(Clone)]
pub struct Pattern {
    alphabet: Arc<Alphabet>,
    dim: usize,
    cells: BTreeMap<Point, Symbol>,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.cells == other.cells && *self.alphabet == *other.alphabet
    }
}

impl Eq for Pattern {}

impl std::hash::Hash for Pattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.cells.hash(state);
    }
}

impl Pattern {
    pub fn new(
        alphabet: Arc<Alphabet>,
        dim: usize,
        cells: impl IntoIterator<Item = (Point, Symbol)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, s) in cells {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if s.index() >= alphabet.len() {
                return Err(Error::InvalidPattern(format!(
                    "symbol id {} outside alphabet of size {}",
                    s.0,
                    alphabet.len()
                )));
            }
            if map.insert(p.clone(), s).is_some() {
                return Err(Error::InvalidPattern(format!("cell {p:?} colored twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidPattern("pattern has empty domain".into()));
        }
        Ok(Pattern {
            alphabet,
            dim,
            cells: map,
        })
    }

    /// Colors `shape` with `symbols` listed in the shape's offset order.
    pub fn from_shape(alphabet: Arc<Alphabet>, shape: &Shape, symbols: &[Symbol]) -> Result<Self> {
        if symbols.len() != shape.len() {
            return Err(Error::InvalidPattern(format!(
                "expected {} symbols, got {}",
                shape.len(),
                symbols.len()
            )));
        }
        Pattern::new(
            alphabet,
            shape.dim(),
            shape.offsets().iter().cloned().zip(symbols.iter().copied()),
        )
    }

    /// Constant pattern on a shape.
    pub fn constant(alphabet: Arc<Alphabet>, shape: &Shape, s: Symbol) -> Result<Self> {
        Pattern::from_shape(alphabet, shape, &vec![s; shape.len()])
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, p: &Point) -> Option<Symbol> {
        self.cells.get(p).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Point, Symbol)> {
        self.cells.iter().map(|(p, s)| (p, *s))
    }

    pub fn domain(&self) -> Shape {
        Shape {
            dim: self.dim,
            offsets: self.cells.keys().cloned().collect(),
        }
    }

    /// Symbols in the domain's sorted order.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.cells.values().copied().collect()
    }

    pub fn with_cell(&self, p: Point, s: Symbol) -> Result<Pattern> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        let mut cells = self.cells.clone();
        cells.insert(p, s);
        Ok(Pattern {
            alphabet: self.alphabet.clone(),
            dim: self.dim,
            cells,
        })
    }

    pub fn translate(&self, v: &Point) -> Pattern {
        Pattern {
            alphabet: self.alphabet.clone(),
            dim: self.dim,
            cells: self.cells.iter().map(|(p, s)| (p + v, *s)).collect(),
        }
    }

    /// Restriction to `shape ∩ domain`; `None` when the intersection is empty.
    pub fn restrict(&self, shape: &Shape) -> Option<Pattern> {
        let cells: BTreeMap<Point, Symbol> = shape
            .offsets()
            .iter()
            .filter_map(|p| self.cells.get(p).map(|s| (p.clone(), *s)))
            .collect();
        if cells.is_empty() {
            None
        } else {
            Some(Pattern {
                alphabet: self.alphabet.clone(),
                dim: self.dim,
                cells,
            })
        }
    }

    /// Union with another pattern; fails if they disagree on a common cell.
    pub fn union(&self, other: &Pattern) -> Result<Pattern> {
        self.check_compatible(other)?;
        let mut cells = self.cells.clone();
        for (p, s) in &other.cells {
            if let Some(old) = cells.insert(p.clone(), *s) {
                if old != *s {
                    return Err(Error::InvalidPattern(format!(
                        "patterns disagree at {p:?}"
                    )));
                }
            }
        }
        Ok(Pattern {
            alphabet: self.alphabet.clone(),
            dim: self.dim,
            cells,
        })
    }

    /// If `other` is a translate of `self`, the vector `v` with `other = self + v`.
    pub fn congruence(&self, other: &Pattern) -> Option<Point> {
        if self.dim != other.dim || self.cells.len() != other.cells.len() {
            return None;
        }
        let (p0, _) = self.cells.iter().next()?;
        let (q0, _) = other.cells.iter().next()?;
        // Both maps are sorted lexicographically, and translation preserves that order.
        let v = q0 - p0;
        let ok = self
            .cells
            .iter()
            .zip(&other.cells)
            .all(|((p, s), (q, t))| s == t && &(p + &v) == q);
        ok.then_some(v)
    }

    pub fn is_congruent(&self, other: &Pattern) -> bool {
        self.congruence(other).is_some()
    }

    /// Whether `self` appears in `big` at translation `u`, i.e. `big|_{dom+u} = self + u`.
    pub fn appears_at(&self, big: &Pattern, u: &Point) -> bool {
        self.cells
            .iter()
            .all(|(p, s)| big.cells.get(&(p + u)) == Some(s))
    }

    pub fn check_compatible(&self, other: &Pattern) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if *self.alphabet != *other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet, other.alphabet
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.cells
                    .iter()
                    .map(|(p, s)| (p, self.alphabet.name(*s).to_string())),
            )
            .finish()
    }
}

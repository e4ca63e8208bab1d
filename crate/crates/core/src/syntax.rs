//! Syntaxes: a finite shape with an allowed or forbidden set of window
//! patterns, plus products, dimension lift and one-block maps.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::csp::{code_space, CodeTable};
use crate::error::{Error, Result};
use crate::lattice::{Pattern, Point, Shape};

/// Maximum number of window patterns materialized by derived syntaxes.
pub const WINDOW_LIMIT: u64 = 1 << 22;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Allowed,
    Forbidden,
}

/// Shape plus a set of shape-patterns, read as allowed or forbidden.
///
/// Patterns are stored as symbol lists in the shape's sorted offset order.
#[derive(Clone)]
pub struct Syntax {
    alphabet: Arc<Alphabet>,
    shape: Shape,
    mode: Mode,
    patterns: Vec<Vec<Symbol>>,
    table: Arc<CodeTable>,
}

impl std::fmt::Debug for Syntax {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Syntax")
            .field("alphabet", &self.alphabet)
            .field("shape", &self.shape)
            .field("mode", &self.mode)
            .field("patterns", &self.patterns.len())
            .finish()
    }
}

impl Syntax {
    pub fn new(
        alphabet: Arc<Alphabet>,
        shape: Shape,
        mode: Mode,
        patterns: impl IntoIterator<Item = Vec<Symbol>>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in patterns {
            if p.len() != shape.len() {
                return Err(Error::InvalidDefinition(format!(
                    "pattern has {} cells, shape has {}",
                    p.len(),
                    shape.len()
                )));
            }
            if let Some(s) = p.iter().find(|s| s.index() >= alphabet.len()) {
                return Err(Error::InvalidDefinition(format!(
                    "symbol id {} outside alphabet",
                    s.0
                )));
            }
            set.insert(p);
        }
        let mut table = CodeTable::new(
            alphabet.len() as u64,
            shape.len(),
            mode == Mode::Forbidden,
        )?;
        for p in &set {
            table.insert(table.encode(p.iter().map(|s| s.0)));
        }
        Ok(Syntax {
            alphabet,
            shape,
            mode,
            patterns: set.into_iter().collect(),
            table: Arc::new(table),
        })
    }

    /// Builds a syntax from patterns whose domains are translates of `shape`.
    pub fn from_patterns(
        alphabet: Arc<Alphabet>,
        shape: Shape,
        mode: Mode,
        patterns: &[Pattern],
    ) -> Result<Self> {
        let (norm, lo) = shape.normalized();
        let mut rows = Vec::with_capacity(patterns.len());
        for p in patterns {
            if *p.alphabet() != alphabet {
                return Err(Error::AlphabetMismatch("pattern alphabet differs".into()));
            }
            let dom = p.domain();
            let (pn, plo) = dom.normalized();
            if pn != norm {
                return Err(Error::InvalidDefinition(format!(
                    "pattern domain {dom:?} is not a translate of the shape"
                )));
            }
            let v = &plo - &lo;
            rows.push(
                shape
                    .offsets()
                    .iter()
                    .map(|o| p.get(&(o + &v)).expect("domain checked"))
                    .collect(),
            );
        }
        Syntax::new(alphabet, shape, mode, rows)
    }

    /// The full shift: single-cell shape, nothing forbidden.
    pub fn full_shift(alphabet: Arc<Alphabet>, dim: usize) -> Self {
        Syntax::new(alphabet, Shape::single(dim), Mode::Forbidden, Vec::new())
            .expect("single cell always fits")
    }

    /// The empty SFT: single-cell shape, nothing allowed.
    pub fn empty(alphabet: Arc<Alphabet>, dim: usize) -> Self {
        Syntax::new(alphabet, Shape::single(dim), Mode::Allowed, Vec::new())
            .expect("single cell always fits")
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn patterns(&self) -> &[Vec<Symbol>] {
        &self.patterns
    }

    pub(crate) fn table(&self) -> &Arc<CodeTable> {
        &self.table
    }

    /// Whether a window coloring (shape order) is allowed.
    pub fn allows(&self, window: &[Symbol]) -> bool {
        self.table.accepts(self.table.encode(window.iter().map(|s| s.0)))
    }

    pub(crate) fn allows_values(&self, window: &[u32]) -> bool {
        self.table.accepts(self.table.encode(window.iter().copied()))
    }

    /// True when no window is ever rejected.
    pub fn is_full(&self) -> bool {
        match self.mode {
            Mode::Forbidden => self.patterns.is_empty(),
            Mode::Allowed => {
                code_space(self.alphabet.len() as u64, self.shape.len())
                    == Some(self.patterns.len() as u64)
            }
        }
    }

    /// All allowed windows as value lists, failing above `limit` entries.
    pub fn allowed_windows(&self, limit: u64) -> Result<Vec<Vec<u32>>> {
        match self.mode {
            Mode::Allowed => Ok(self
                .patterns
                .iter()
                .map(|p| p.iter().map(|s| s.0).collect())
                .collect()),
            Mode::Forbidden => {
                let k = self.alphabet.len() as u64;
                let space = code_space(k, self.shape.len())
                    .filter(|&s| s <= limit.saturating_mul(2))
                    .ok_or_else(|| Error::budget("window enumeration", limit as u128))?;
                let mut out = Vec::new();
                for code in 0..space {
                    if self.table.accepts(code) {
                        if out.len() as u64 >= limit {
                            return Err(Error::budget("window enumeration", limit as u128));
                        }
                        let mut c = code;
                        out.push(
                            (0..self.shape.len())
                                .map(|_| {
                                    let v = (c % k) as u32;
                                    c /= k;
                                    v
                                })
                                .collect(),
                        );
                    }
                }
                Ok(out)
            }
        }
    }

    fn check_pattern(&self, p: &Pattern) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        if **p.alphabet() != *self.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "pattern over {:?}, syntax over {:?}",
                p.alphabet(),
                self.alphabet
            )));
        }
        Ok(())
    }

    /// Every translate of the shape inside the pattern's domain carries an
    /// allowed (or non-forbidden) window.
    pub fn is_locally_admissible(&self, p: &Pattern) -> Result<bool> {
        self.check_pattern(p)?;
        let dom = p.domain();
        let mut buf = Vec::with_capacity(self.shape.len());
        for u in dom.placements_of(&self.shape) {
            buf.clear();
            buf.extend(
                self.shape
                    .offsets()
                    .iter()
                    .map(|o| p.get(&(o + &u)).expect("placement inside domain").0),
            );
            if !self.allows_values(&buf) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reorders axes: new axis `i` is old axis `perm[i]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Syntax> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&a| a >= d || std::mem::replace(&mut seen[a], true)) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
        let map = |p: &Point| Point(perm.iter().map(|&a| p.0[a]).collect());
        let shape = Shape::new(d, self.shape.offsets().iter().map(map))?;
        let rows: Vec<Vec<Symbol>> = self.patterns.iter().map(|row| {
            shape
                .offsets()
                .iter()
                .map(|q| {
                    // invert: old coordinate a sits at new position i with perm[i]=a
                    let mut old = vec![0; d];
                    for (i, &a) in perm.iter().enumerate() {
                        old[a] = q.0[i];
                    }
                    row[self.shape.index_of(&Point(old)).expect("same set")]
                })
                .collect()
        }).collect();
        Syntax::new(self.alphabet.clone(), shape, self.mode, rows)
    }

    /// Removes an axis along which the shape is flat.
    pub fn drop_axis(&self, axis: usize) -> Result<Syntax> {
        if self.dim() < 2 || axis >= self.dim() || self.shape.extents()[axis] != 1 {
            return Err(Error::Precondition(format!(
                "cannot drop axis {axis} of a shape with extents {:?}",
                self.shape.extents()
            )));
        }
        let offsets: Vec<Point> = self
            .shape
            .offsets()
            .iter()
            .map(|p| {
                let mut v = p.0.clone();
                v.remove(axis);
                Point(v)
            })
            .collect();
        // Order is preserved because the dropped coordinate is constant.
        let shape = Shape::new(self.dim() - 1, offsets)?;
        Syntax::new(self.alphabet.clone(), shape, self.mode, self.patterns.clone())
    }

    /// Product system over the pair alphabet `(a,b)`.
    ///
    /// The window is the union of both shapes; a window is allowed when each
    /// projection is allowed on its own shape.
    pub fn product(&self, other: &Syntax) -> Result<Syntax> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let k2 = other.alphabet.len() as u32;
        let mut names = Vec::new();
        for a in self.alphabet.names() {
            for b in other.alphabet.names() {
                names.push(format!("({a},{b})"));
            }
        }
        let alphabet = Arc::new(Alphabet::new(names)?);
        let union = self.shape.union(&other.shape)?;
        let left = spread(self, &union, WINDOW_LIMIT)?;
        let right = spread(other, &union, WINDOW_LIMIT)?;
        let total = (left.len() as u64).saturating_mul(right.len() as u64);
        if total > WINDOW_LIMIT {
            return Err(Error::budget("product windows", WINDOW_LIMIT as u128));
        }
        let mut rows = Vec::with_capacity(total as usize);
        for l in &left {
            for r in &right {
                rows.push(l.iter().zip(r).map(|(a, b)| Symbol(a * k2 + b)).collect());
            }
        }
        Syntax::new(alphabet, union, Mode::Allowed, rows)
    }

    /// `(d+1)`-dimensional syntax whose layers along the new axis are
    /// independent copies of this one.
    pub fn lift_dimension(&self) -> Syntax {
        let shape = Shape::new(
            self.dim() + 1,
            self.shape.offsets().iter().map(|p| p.extended(0)),
        )
        .expect("nonempty");
        Syntax::new(self.alphabet.clone(), shape, self.mode, self.patterns.clone())
            .expect("same window size")
    }
}

/// Allowed windows of `s` extended by every coloring of `union \ shape`,
/// listed in `union` order.
fn spread(s: &Syntax, union: &Shape, limit: u64) -> Result<Vec<Vec<u32>>> {
    let base = s.allowed_windows(limit)?;
    let k = s.alphabet.len() as u64;
    let pos: Vec<Option<usize>> = union
        .offsets()
        .iter()
        .map(|p| s.shape.index_of(p))
        .collect();
    let free = pos.iter().filter(|p| p.is_none()).count();
    let fill = code_space(k, free)
        .filter(|&f| f.saturating_mul(base.len() as u64) <= limit)
        .ok_or_else(|| Error::budget("product windows", limit as u128))?;
    let mut out = Vec::with_capacity(base.len() * fill as usize);
    for w in &base {
        for mut code in 0..fill {
            out.push(
                pos.iter()
                    .map(|p| match p {
                        Some(i) => w[*i],
                        None => {
                            let v = (code % k) as u32;
                            code /= k;
                            v
                        }
                    })
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// One-block map `phi_0: source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    map: Vec<Symbol>,
}

impl BlockMap {
    pub fn new(source: Arc<Alphabet>, target: Arc<Alphabet>, map: Vec<Symbol>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidDefinition(format!(
                "block map covers {} of {} source symbols",
                map.len(),
                source.len()
            )));
        }
        if map.iter().any(|s| s.index() >= target.len()) {
            return Err(Error::InvalidDefinition("block map image outside target".into()));
        }
        Ok(BlockMap { source, target, map })
    }

    /// From `(source name, target name)` pairs; must be total.
    pub fn from_names<'a>(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut map = vec![None; source.len()];
        for (a, b) in pairs {
            let i = source.symbol(a)?;
            let j = target.symbol(b)?;
            if map[i.index()].replace(j).is_some_and(|old| old != j) {
                return Err(Error::InvalidDefinition(format!("symbol `{a}` mapped twice")));
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::InvalidDefinition(format!(
                        "block map missing source symbol `{}`",
                        source.name(Symbol(i as u32))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlockMap::new(source, target, map)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let map = alphabet.symbols().collect();
        BlockMap {
            source: alphabet.clone(),
            target: alphabet,
            map,
        }
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn image(&self, s: Symbol) -> Symbol {
        self.map[s.index()]
    }

    pub fn apply(&self, p: &Pattern) -> Result<Pattern> {
        if **p.alphabet() != *self.source {
            return Err(Error::AlphabetMismatch(format!(
                "pattern over {:?}, map from {:?}",
                p.alphabet(),
                self.source
            )));
        }
        Pattern::new(
            self.target.clone(),
            p.dim(),
            p.cells().map(|(q, s)| (q.clone(), self.image(s))),
        )
    }
}

pub fn apply_block_map(p: &Pattern, m: &BlockMap) -> Result<Pattern> {
    m.apply(p)
}

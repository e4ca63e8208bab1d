//! Code tables for window constraints and a small backtracking search over
//! finite lattice regions.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};

const DENSE_LIMIT: u64 = 1 << 24;

/// Set of mixed-radix codes; dense bitmap when the code space is small.
#[derive(Clone, Debug)]
pub(crate) enum CodeSet {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl CodeSet {
    pub(crate) fn with_space(space: u64) -> Self {
        if space <= DENSE_LIMIT {
            CodeSet::Dense(vec![0; space.div_ceil(64) as usize])
        } else {
            CodeSet::Sparse(HashSet::new())
        }
    }

    pub(crate) fn insert(&mut self, code: u64) {
        match self {
            CodeSet::Dense(bits) => bits[(code >> 6) as usize] |= 1 << (code & 63),
            CodeSet::Sparse(s) => {
                s.insert(code);
            }
        }
    }

    #[inline]
    pub(crate) fn contains(&self, code: u64) -> bool {
        match self {
            CodeSet::Dense(bits) => bits
                .get((code >> 6) as usize)
                .is_some_and(|w| w & (1 << (code & 63)) != 0),
            CodeSet::Sparse(s) => s.contains(&code),
        }
    }
}

/// Membership test over codes `sum v_i * radix^i` of fixed length.
#[derive(Clone, Debug)]
pub(crate) struct CodeTable {
    pub radix: u64,
    members: CodeSet,
    negate: bool,
}

pub(crate) fn code_space(radix: u64, len: usize) -> Option<u64> {
    let mut s: u64 = 1;
    for _ in 0..len {
        s = s.checked_mul(radix)?;
    }
    Some(s)
}

impl CodeTable {
    pub(crate) fn new(radix: u64, len: usize, negate: bool) -> Result<Self> {
        let space = code_space(radix, len).ok_or_else(|| {
            Error::InvalidDefinition(format!(
                "window of {len} cells over {radix} symbols does not fit a 64-bit code"
            ))
        })?;
        Ok(CodeTable {
            radix,
            members: CodeSet::with_space(space),
            negate,
        })
    }

    pub(crate) fn insert(&mut self, code: u64) {
        self.members.insert(code);
    }

    #[inline]
    pub(crate) fn accepts(&self, code: u64) -> bool {
        self.members.contains(code) != self.negate
    }

    pub(crate) fn encode(&self, values: impl IntoIterator<Item = u32>) -> u64 {
        let mut code = 0u64;
        let mut w = 1u64;
        for v in values {
            code += v as u64 * w;
            w = w.wrapping_mul(self.radix);
        }
        code
    }
}

/// A constraint over a list of variables, checked once all of them are set.
#[derive(Clone)]
pub(crate) struct Constraint {
    pub vars: Vec<usize>,
    pub table: Arc<CodeTable>,
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Outcome of a search that may have been cut short by the node budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Finished {
    Exhausted,
    Stopped,
}

/// Finite constraint satisfaction problem with a common symbol domain.
pub(crate) struct Csp {
    radix: u32,
    fixed: Vec<Option<u32>>,
    constraints: Vec<Constraint>,
}

impl Csp {
    pub(crate) fn new(radix: u32, n_vars: usize) -> Self {
        Csp {
            radix,
            fixed: vec![None; n_vars],
            constraints: Vec::new(),
        }
    }

    pub(crate) fn fix(&mut self, var: usize, value: u32) {
        self.fixed[var] = Some(value);
    }

    pub(crate) fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Depth-first search over the free variables in index order. `visit`
    /// receives every full solution. Errors when more than `node_limit`
    /// partial assignments are tried.
    pub(crate) fn search<F>(&self, node_limit: u64, mut visit: F) -> Result<Finished>
    where
        F: FnMut(&[u32]) -> Flow,
    {
        let n = self.fixed.len();
        let mut order: Vec<usize> = (0..n).filter(|&v| self.fixed[v].is_some()).collect();
        let n_fixed = order.len();
        order.extend((0..n).filter(|&v| self.fixed[v].is_none()));
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut trigger: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
        for (ci, c) in self.constraints.iter().enumerate() {
            let last = c.vars.iter().map(|&v| pos[v]).max().unwrap_or(0);
            trigger[last].push(ci);
        }
        let mut assign = vec![0u32; n];
        for (v, f) in self.fixed.iter().enumerate() {
            if let Some(x) = f {
                assign[v] = *x;
            }
        }
        let check = |assign: &[u32], at: usize| -> bool {
            trigger[at].iter().all(|&ci| {
                let c = &self.constraints[ci];
                let code = c.table.encode(c.vars.iter().map(|&v| assign[v]));
                c.table.accepts(code)
            })
        };
        for at in 0..n_fixed {
            if !check(&assign, at) {
                return Ok(Finished::Exhausted);
            }
        }
        if n == 0 {
            // Constraints over no variables are vacuous.
            return Ok(match visit(&assign) {
                Flow::Stop => Finished::Stopped,
                Flow::Continue => Finished::Exhausted,
            });
        }
        let free = n - n_fixed;
        if free == 0 {
            return Ok(match visit(&assign) {
                Flow::Stop => Finished::Stopped,
                Flow::Continue => Finished::Exhausted,
            });
        }
        let mut next = vec![0u32; free];
        let mut d = 0usize;
        let mut nodes = 0u64;
        loop {
            if next[d] == self.radix {
                if d == 0 {
                    return Ok(Finished::Exhausted);
                }
                d -= 1;
                continue;
            }
            let val = next[d];
            next[d] += 1;
            nodes += 1;
            if nodes > node_limit {
                return Err(Error::budget("search nodes", node_limit as u128));
            }
            let var = order[n_fixed + d];
            assign[var] = val;
            if check(&assign, n_fixed + d) {
                if d + 1 == free {
                    if let Flow::Stop = visit(&assign) {
                        return Ok(Finished::Stopped);
                    }
                } else {
                    d += 1;
                    next[d] = 0;
                }
            }
        }
    }

    pub(crate) fn first_solution(&self, node_limit: u64) -> Result<Option<Vec<u32>>> {
        let mut found = None;
        self.search(node_limit, |a| {
            found = Some(a.to_vec());
            Flow::Stop
        })?;
        Ok(found)
    }

    pub(crate) fn is_satisfiable(&self, node_limit: u64) -> Result<bool> {
        Ok(self.first_solution(node_limit)?.is_some())
    }
}

/// Index of lattice cells used to build region-based problems.
pub(crate) struct CellIndex {
    pub cells: Vec<Vec<i64>>,
    pub index: HashMap<Vec<i64>, usize>,
}

impl CellIndex {
    /// Cells in raster order: highest axis slowest, axis 0 fastest.
    pub(crate) fn raster(mut cells: Vec<Vec<i64>>) -> Self {
        cells.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        cells.dedup();
        let index = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        CellIndex { cells, index }
    }

    pub(crate) fn len(&self) -> usize {
        self.cells.len()
    }

    pub(crate) fn get(&self, c: &[i64]) -> Option<usize> {
        self.index.get(c).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_adjacent_ones() -> Arc<CodeTable> {
        // forbid code 3 = (1,1)
        let mut t = CodeTable::new(2, 2, true).unwrap();
        t.insert(3);
        Arc::new(t)
    }

    #[test]
    fn counts_golden_mean_paths() {
        for (n, expect) in [(1usize, 2u64), (2, 3), (3, 5), (4, 8), (10, 144)] {
            let mut csp = Csp::new(2, n);
            for i in 0..n.saturating_sub(1) {
                csp.add(Constraint {
                    vars: vec![i, i + 1],
                    table: no_adjacent_ones(),
                });
            }
            let mut count = 0u64;
            csp.search(u64::MAX, |_| {
                count += 1;
                Flow::Continue
            })
            .unwrap();
            assert_eq!(count, expect, "n={n}");
        }
    }

    #[test]
    fn fixed_values_are_respected_and_budget_trips() {
        let mut csp = Csp::new(2, 3);
        csp.fix(1, 1);
        csp.add(Constraint { vars: vec![0, 1], table: no_adjacent_ones() });
        csp.add(Constraint { vars: vec![1, 2], table: no_adjacent_ones() });
        assert_eq!(csp.first_solution(100).unwrap(), Some(vec![0, 1, 0]));
        csp.fix(2, 1);
        assert_eq!(csp.first_solution(100).unwrap(), None);
        let big = Csp::new(2, 30);
        let r = big.search(10, |_| Flow::Continue);
        assert!(matches!(r, Err(Error::Budget { .. })));
    }
}

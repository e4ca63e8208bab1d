//! Constraint problems for "locally admissible coloring of a finite region".

use std::sync::Arc;

use crate::alphabet::Symbol;
use crate::csp::{CellIndex, Constraint, Csp, Flow};
use crate::error::Result;
use crate::lattice::{Pattern, Point, Shape};
use crate::syntax::Syntax;

/// Default cap on backtracking nodes for region searches.
pub const DEFAULT_NODE_LIMIT: u64 = 1 << 26;

/// A region with one constraint per placement of the syntax window.
pub(crate) struct RegionProblem {
    pub cells: CellIndex,
    pub csp: Csp,
}

impl RegionProblem {
    pub(crate) fn new(s: &Syntax, region: &Shape) -> Self {
        let cells = CellIndex::raster(region.offsets().iter().map(|p| p.0.clone()).collect());
        let mut csp = Csp::new(s.alphabet().len() as u32, cells.len());
        let table = Arc::clone(s.table());
        for u in region.placements_of(s.shape()) {
            let vars = s
                .shape()
                .offsets()
                .iter()
                .map(|o| cells.get(&(o + &u).0).expect("placement inside region"))
                .collect();
            csp.add(Constraint {
                vars,
                table: table.clone(),
            });
        }
        RegionProblem { cells, csp }
    }

    /// Fixes the cells of `p` that lie in the region; cells outside are ignored.
    pub(crate) fn fix(&mut self, p: &Pattern) {
        for (q, s) in p.cells() {
            if let Some(i) = self.cells.get(&q.0) {
                self.csp.fix(i, s.0);
            }
        }
    }

    pub(crate) fn to_pattern(&self, s: &Syntax, values: &[u32]) -> Pattern {
        Pattern::new(
            s.alphabet().clone(),
            s.dim(),
            self.cells
                .cells
                .iter()
                .zip(values)
                .map(|(c, v)| (Point(c.clone()), Symbol(*v))),
        )
        .expect("valid cells")
    }
}

/// All locally admissible colorings of `region`, in raster-lexicographic order.
pub fn enumerate_locally_admissible(
    s: &Syntax,
    region: &Shape,
    node_limit: u64,
) -> Result<Vec<Pattern>> {
    let prob = RegionProblem::new(s, region);
    let mut out = Vec::new();
    prob.csp.search(node_limit, |v| {
        out.push(prob.to_pattern(s, v));
        Flow::Continue
    })?;
    Ok(out)
}

/// Whether `p` extends to a locally admissible coloring of `region`.
pub fn extends_to(s: &Syntax, p: &Pattern, region: &Shape, node_limit: u64) -> Result<bool> {
    let mut prob = RegionProblem::new(s, region);
    prob.fix(p);
    prob.csp.is_satisfiable(node_limit)
}

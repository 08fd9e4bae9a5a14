//! Perfect matchings of cubic planar graphs, the orbifolds they define, and
//! statistics of weak orderability over random order assignments.

mod graph;
mod matching;
mod ordering;
mod stats;

pub use graph::{CubicGraph, Deletion};
pub use matching::{all_perfect_matchings, find_factor, is_perfect_matching, Matching};
pub use ordering::{check_labels, construct_weak_order, is_valid_weak_order};
pub use stats::{
    estimate_wo_fraction, wilson_interval, ExactCounts, IdentityCheck, SampleCounts, SamplingMode, WeakOrderStats,
    EXACT_EDGE_BUDGET,
};

use crate::error::{Error, Result};
use crate::orbifold::CoxeterOrbifold;
use crate::polytope::Polytope;

/// Puts order `k` on the ridges dual to the edges of `factor` and right
/// angles everywhere else.
///
/// `factor` indexes the edges of [`CubicGraph::from_polytope`], which are
/// the ridges of `p` in order. The polytope may have no prismatic 3-circuit
/// and at most one prismatic 4-circuit, and `factor` must meet that circuit.
pub fn orbifold_from_factor(p: &Polytope, factor: &Matching, k: u32) -> Result<CoxeterOrbifold> {
    let graph = CubicGraph::from_polytope(p)?;
    if !is_perfect_matching(&graph, &factor.edges) {
        return Err(Error::GraphPrecondition("edges do not form a perfect matching".into()));
    }
    if k < 3 {
        return Err(Error::CircuitPrecondition(format!("order {k} on the factor leaves a right-angled orbifold")));
    }
    if let Some(c) = p.prismatic_circuits(3)?.first() {
        return Err(Error::CircuitPrecondition(format!("prismatic 3-circuit {c:?}")));
    }
    let quads = p.prismatic_circuits(4)?;
    if quads.len() > 1 {
        return Err(Error::CircuitPrecondition(format!("{} prismatic 4-circuits", quads.len())));
    }
    if let Some(c) = quads.first() {
        let meets = (0..4).any(|t| {
            let (a, b) = (c[t].min(c[(t + 1) % 4]), c[t].max(c[(t + 1) % 4]));
            p.ridges().iter().position(|&r| r == (a, b)).is_some_and(|x| factor.contains(x))
        });
        if !meets {
            return Err(Error::CircuitPrecondition(format!("factor misses the prismatic 4-circuit {c:?}")));
        }
    }
    let orders = p.ridges().iter().enumerate().map(|(x, &r)| (r, if factor.contains(x) { k } else { 2 }));
    let q = CoxeterOrbifold::new(p.clone(), orders)?;
    let report = q.andreev_necessary_check()?;
    if !report.passed() {
        return Err(Error::CircuitPrecondition(format!("angle conditions fail: {report:?}")));
    }
    Ok(q)
}

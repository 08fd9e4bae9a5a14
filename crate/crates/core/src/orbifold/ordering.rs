//! Weak orderability: orderings of the facets in which every facet has at most
//! `n` order-2 ridges with later facets, those later facets having linearly
//! independent covectors.

use std::collections::HashSet;

use nalgebra::DVector;
use serde::Serialize;

use super::CoxeterOrbifold;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, rows_matrix, RankPolicy};

/// Whether a qualifying set is known to be in general position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneralPosition {
    Unknown,
    Verified,
    Failed,
}

/// A facet ordering with its qualifying sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakOrdering {
    /// `order[k]` is the facet placed at position `k`.
    pub order: Vec<usize>,
    /// `qualifying[k]`: order-2 neighbours of `order[k]` placed after it.
    pub qualifying: Vec<Vec<usize>>,
    /// General-position status of each qualifying set, by position.
    pub status: Vec<GeneralPosition>,
}

impl WeakOrdering {
    fn from_order(adj: &[Vec<usize>], order: Vec<usize>, status: GeneralPosition) -> Self {
        let mut position = vec![0; order.len()];
        for (k, &facet) in order.iter().enumerate() {
            position[facet] = k;
        }
        let qualifying: Vec<Vec<usize>> = order
            .iter()
            .map(|&facet| {
                let mut later: Vec<usize> =
                    adj[facet].iter().copied().filter(|&x| position[x] > position[facet]).collect();
                later.sort_unstable();
                later
            })
            .collect();
        let status = qualifying
            .iter()
            .map(|q| if q.is_empty() { GeneralPosition::Verified } else { status })
            .collect();
        WeakOrdering { order, qualifying, status }
    }

    /// Recomputes the qualifying sets from scratch and checks that each has at
    /// most `limit` members.
    pub fn is_valid(&self, adj: &[Vec<usize>], limit: usize) -> bool {
        let f = adj.len();
        let mut seen = vec![false; f];
        for &facet in &self.order {
            if facet >= f || seen[facet] {
                return false;
            }
            seen[facet] = true;
        }
        if self.order.len() != f {
            return false;
        }
        let fresh = WeakOrdering::from_order(adj, self.order.clone(), GeneralPosition::Unknown);
        fresh.qualifying == self.qualifying && fresh.qualifying.iter().all(|q| q.len() <= limit)
    }
}

/// Result of a weak-orderability decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WeakOrderOutcome {
    Ordered { ordering: WeakOrdering },
    /// Every facet in `certificate` has more than `n` order-2 ridges to other
    /// members of `certificate`.
    Stuck { certificate: Vec<usize> },
    /// A combinatorial ordering exists, but no ordering found has all its
    /// qualifying sets in general position. `ordering` marks the failures of
    /// the greedy ordering.
    NotGeneralPosition { ordering: WeakOrdering },
}

impl WeakOrderOutcome {
    pub fn is_ordered(&self) -> bool {
        matches!(self, WeakOrderOutcome::Ordered { .. })
    }

    pub fn ordering(&self) -> Option<&WeakOrdering> {
        match self {
            WeakOrderOutcome::Ordered { ordering } => Some(ordering),
            _ => None,
        }
    }
}

/// Greedy peeling: repeatedly removes the lowest-id vertex with at most
/// `limit` remaining neighbours. Returns the removal order, or the stuck
/// remainder when no vertex qualifies.
pub fn degeneracy_order(adj: &[Vec<usize>], limit: usize) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = adj.len();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let Some(next) = (0..n).find(|&x| alive[x] && degree[x] <= limit) else {
            return Err((0..n).filter(|&x| alive[x]).collect());
        };
        alive[next] = false;
        order.push(next);
        for &y in &adj[next] {
            if alive[y] {
                degree[y] -= 1;
            }
        }
    }
    Ok(order)
}

impl CoxeterOrbifold {
    /// Decides weak orderability from the order-2 ridge graph alone.
    ///
    /// In dimension three the general-position requirement holds automatically,
    /// so qualifying sets are reported as verified; otherwise their status is
    /// unknown until [`CoxeterOrbifold::weak_order_geometric`] is run.
    pub fn weak_order_combinatorial(&self) -> WeakOrderOutcome {
        let adj = self.right_angled_graph();
        let status = if self.dim() == 3 { GeneralPosition::Verified } else { GeneralPosition::Unknown };
        match degeneracy_order(&adj, self.dim()) {
            Ok(order) => WeakOrderOutcome::Ordered { ordering: WeakOrdering::from_order(&adj, order, status) },
            Err(certificate) => WeakOrderOutcome::Stuck { certificate },
        }
    }

    /// Decides weak orderability including general position of the covectors
    /// `alphas` attached to the facets, backtracking over greedy choices.
    pub fn weak_order_geometric(&self, alphas: &[DVector<f64>], policy: RankPolicy) -> Result<WeakOrderOutcome> {
        let f = self.facet_count();
        if alphas.len() != f {
            return Err(Error::Shape(format!("expected {f} covectors, got {}", alphas.len())));
        }
        let n = self.dim();
        let adj = self.right_angled_graph();
        let independent = |set: &[usize]| -> bool {
            if set.len() <= 1 || n == 3 {
                return set.iter().all(|&j| alphas[j].norm() > 0.0);
            }
            let rows: Vec<_> = set.iter().map(|&j| alphas[j].clone()).collect();
            numerical_rank(&rows_matrix(&rows), policy).rank == set.len()
        };

        let combinatorial = match degeneracy_order(&adj, n) {
            Ok(order) => WeakOrdering::from_order(&adj, order, GeneralPosition::Unknown),
            Err(certificate) => return Ok(WeakOrderOutcome::Stuck { certificate }),
        };

        let mut failed = HashSet::new();
        let mut alive = vec![true; f];
        let mut order = Vec::with_capacity(f);
        if search(&adj, n, &independent, &mut alive, &mut order, &mut failed) {
            let ordering = WeakOrdering::from_order(&adj, order, GeneralPosition::Verified);
            return Ok(WeakOrderOutcome::Ordered { ordering });
        }

        let mut ordering = combinatorial;
        ordering.status = ordering
            .qualifying
            .iter()
            .map(|q| if independent(q) { GeneralPosition::Verified } else { GeneralPosition::Failed })
            .collect();
        Ok(WeakOrderOutcome::NotGeneralPosition { ordering })
    }
}

fn search(
    adj: &[Vec<usize>],
    limit: usize,
    independent: &dyn Fn(&[usize]) -> bool,
    alive: &mut Vec<bool>,
    order: &mut Vec<usize>,
    failed: &mut HashSet<Vec<bool>>,
) -> bool {
    if order.len() == adj.len() {
        return true;
    }
    if failed.contains(alive) {
        return false;
    }
    for x in 0..adj.len() {
        if !alive[x] {
            continue;
        }
        let later: Vec<usize> = adj[x].iter().copied().filter(|&y| alive[y]).collect();
        if later.len() > limit || !independent(&later) {
            continue;
        }
        alive[x] = false;
        order.push(x);
        if search(adj, limit, independent, alive, order, failed) {
            return true;
        }
        order.pop();
        alive[x] = true;
    }
    failed.insert(alive.clone());
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cube, esselmann_polytope};

    #[test]
    fn hyperbolic_cube_orbifold_is_weakly_orderable() {
        let q = CoxeterOrbifold::with_orders(cube(), |i, j| match (i, j) {
            (0, 1) => 3,
            (2, 4) => 4,
            (3, 5) => 5,
            _ => 2,
        })
        .unwrap();
        let outcome = q.weak_order_combinatorial();
        let ordering = outcome.ordering().unwrap();
        assert!(ordering.is_valid(&q.right_angled_graph(), 3));
    }

    #[test]
    fn right_angled_cube_is_stuck() {
        // The order-2 graph is the octahedron, 4-regular.
        let q = CoxeterOrbifold::with_orders(cube(), |_, _| 2).unwrap();
        assert_eq!(q.weak_order_combinatorial(), WeakOrderOutcome::Stuck { certificate: (0..6).collect() });
    }

    #[test]
    fn no_right_angles_orders_trivially() {
        let adj = vec![Vec::new(); 6];
        assert_eq!(degeneracy_order(&adj, 3), Ok((0..6).collect()));
    }

    #[test]
    fn degeneracy_order_reports_stuck_core() {
        // K5 with limit 3: every vertex has degree 4.
        let adj: Vec<Vec<usize>> = (0..5).map(|a| (0..5).filter(|&b| b != a).collect()).collect();
        assert_eq!(degeneracy_order(&adj, 3), Err(vec![0, 1, 2, 3, 4]));
        assert!(degeneracy_order(&adj, 4).is_ok());
    }

    fn esselmann() -> CoxeterOrbifold {
        CoxeterOrbifold::with_orders(esselmann_polytope(), |i, j| match (i, j) {
            (0, 1) | (1, 2) | (4, 5) => 5,
            (2, 3) | (3, 4) | (0, 3) | (3, 5) => 3,
            _ => 2,
        })
        .unwrap()
    }

    #[test]
    fn identical_covectors_fail_general_position() {
        let q = esselmann();
        let alphas = vec![DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]); 6];
        let outcome = q.weak_order_geometric(&alphas, RankPolicy::default()).unwrap();
        let WeakOrderOutcome::NotGeneralPosition { ordering } = outcome else {
            panic!("expected a general-position failure");
        };
        assert!(ordering.status.contains(&GeneralPosition::Failed));
    }

    #[test]
    fn generic_covectors_pass() {
        let q = esselmann();
        let alphas: Vec<_> = (0..6)
            .map(|i| DVector::from_fn(5, |k, _| ((i * 7 + k * 3) as f64).sin() + if k == i % 5 { 2.0 } else { 0.0 }))
            .collect();
        let outcome = q.weak_order_geometric(&alphas, RankPolicy::default()).unwrap();
        assert!(outcome.is_ordered());
        assert!(outcome.ordering().unwrap().status.iter().all(|&s| s == GeneralPosition::Verified));
    }
}

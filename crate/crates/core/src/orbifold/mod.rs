//! Coxeter orbifolds: a simple polytope with an order `n_ij >= 2` on every
//! ridge, together with derived counts, necessary hyperbolicity conditions and
//! weak orderability.

pub(crate) mod andreev;
mod ordering;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{ridge, Polytope, RawPolytope, Ridge};

pub use andreev::{AndreevReport, CircuitViolation, VertexViolation};
pub use ordering::{
    degeneracy_order, GeneralPosition, WeakOrderOutcome, WeakOrdering,
};

/// `cos(pi / m)`, exact for right angles and order 3.
pub fn cos_pi_over(m: u32) -> f64 {
    match m {
        2 => 0.0,
        3 => 0.5,
        _ => (PI / m as f64).cos(),
    }
}

/// Orbifold description as read from JSON: a polytope plus `[i, j, m]` order
/// triples with one-based facet ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawOrbifold {
    #[serde(flatten)]
    pub polytope: RawPolytope,
    pub orders: Vec<[usize; 3]>,
}

/// Integer invariants of an orbifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbifoldCounts {
    pub n: usize,
    pub f: usize,
    pub e: usize,
    pub e2: usize,
    pub e_plus: usize,
    /// Number of scalar Vinberg equations, `f + e + e2`.
    pub equations: usize,
    pub delta: i64,
}

impl OrbifoldCounts {
    /// `e+ - n - 2 delta`.
    pub fn formula_dimension(&self) -> i64 {
        self.e_plus as i64 - self.n as i64 - 2 * self.delta
    }

    /// Dimension of the gauge group: `f + (n+1)^2 - 1`.
    pub fn gauge_dimension(&self) -> usize {
        self.f + (self.n + 1).pow(2) - 1
    }

    /// Unknowns minus equations minus gauge: `2(n+1)f - N - gauge`.
    pub fn naive_dimension(&self) -> i64 {
        (2 * (self.n + 1) * self.f) as i64 - self.equations as i64 - self.gauge_dimension() as i64
    }
}

/// A validated Coxeter orbifold.
#[derive(Clone, Debug, PartialEq)]
pub struct CoxeterOrbifold {
    polytope: Polytope,
    /// Orders aligned with `polytope.ridges()`.
    orders: Vec<u32>,
}

impl CoxeterOrbifold {
    /// Attaches orders to the ridges of `polytope` and checks that every vertex
    /// group is finite.
    pub fn new(polytope: Polytope, orders: impl IntoIterator<Item = (Ridge, u32)>) -> Result<Self> {
        let mut aligned: Vec<Option<u32>> = vec![None; polytope.ridge_count()];
        for ((i, j), m) in orders {
            let r = ridge(i, j);
            let Ok(slot) = polytope.ridges().binary_search(&r) else {
                return Err(Error::ExtraOrder(r.0, r.1));
            };
            if m < 2 {
                return Err(Error::OrderTooSmall(r.0, r.1, m));
            }
            aligned[slot] = Some(m);
        }
        let mut resolved = Vec::with_capacity(aligned.len());
        for (slot, m) in aligned.into_iter().enumerate() {
            let (i, j) = polytope.ridges()[slot];
            resolved.push(m.ok_or(Error::MissingOrder(i, j))?);
        }
        let orbifold = CoxeterOrbifold { polytope, orders: resolved };
        if let Some(vertices) = orbifold.polytope.vertices() {
            for v in vertices {
                if !orbifold.vertex_is_elliptic(v) {
                    return Err(Error::NonElliptic {
                        vertex: v.clone(),
                        orders: orbifold.vertex_orders(v),
                    });
                }
            }
        }
        Ok(orbifold)
    }

    /// Builds an orbifold with orders given by a function of the ridge.
    pub fn with_orders(polytope: Polytope, order: impl Fn(usize, usize) -> u32) -> Result<Self> {
        let orders: Vec<_> = polytope.ridges().iter().map(|&(i, j)| ((i, j), order(i, j))).collect();
        Self::new(polytope, orders)
    }

    /// Builds an orbifold from its one-based JSON description.
    pub fn from_raw(raw: &RawOrbifold) -> Result<Self> {
        let polytope = Polytope::from_raw(&raw.polytope)?;
        let f = polytope.facet_count();
        let mut orders = Vec::with_capacity(raw.orders.len());
        for &[i, j, m] in &raw.orders {
            for id in [i, j] {
                if id == 0 || id > f {
                    return Err(Error::DanglingFacet { id, count: f });
                }
            }
            if m < 2 {
                return Err(Error::OrderTooSmall(i, j, m as u32));
            }
            let m = u32::try_from(m).map_err(|_| Error::Shape(format!("order {m} is too large")))?;
            orders.push(((i - 1, j - 1), m));
        }
        Self::new(polytope, orders)
    }

    /// One-based JSON description.
    pub fn to_raw(&self) -> RawOrbifold {
        RawOrbifold {
            polytope: self.polytope.to_raw(),
            orders: self
                .polytope
                .ridges()
                .iter()
                .zip(&self.orders)
                .map(|(&(i, j), &m)| [i + 1, j + 1, m as usize])
                .collect(),
        }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn facet_count(&self) -> usize {
        self.polytope.facet_count()
    }

    /// Order of the ridge `(i, j)`, or `None` when the facets are not adjacent.
    pub fn order(&self, i: usize, j: usize) -> Option<u32> {
        self.polytope
            .ridges()
            .binary_search(&ridge(i, j))
            .ok()
            .map(|slot| self.orders[slot])
    }

    /// Ridges with their orders, in lexicographic ridge order.
    pub fn ridge_orders(&self) -> impl Iterator<Item = (Ridge, u32)> + '_ {
        self.polytope.ridges().iter().copied().zip(self.orders.iter().copied())
    }

    /// Order-2 ridges in lexicographic order.
    pub fn right_angled_ridges(&self) -> Vec<Ridge> {
        self.ridge_orders().filter(|&(_, m)| m == 2).map(|(r, _)| r).collect()
    }

    /// Ridges of order at least 3 in lexicographic order, with orders.
    pub fn higher_ridges(&self) -> Vec<(Ridge, u32)> {
        self.ridge_orders().filter(|&(_, m)| m > 2).collect()
    }

    pub fn counts(&self) -> OrbifoldCounts {
        let f = self.facet_count();
        let e = self.polytope.ridge_count();
        let e2 = self.orders.iter().filter(|&&m| m == 2).count();
        OrbifoldCounts {
            n: self.dim(),
            f,
            e,
            e2,
            e_plus: e - e2,
            equations: f + e + e2,
            delta: self.polytope.delta(),
        }
    }

    fn vertex_orders(&self, v: &[usize]) -> Vec<u32> {
        let mut out = Vec::new();
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                out.push(self.order(v[a], v[b]).expect("vertex facets are adjacent"));
            }
        }
        out
    }

    /// The cosine matrix `2 I - 2 cos(pi / n_ij)` over a set of pairwise
    /// adjacent facets.
    pub fn cosine_matrix(&self, facets: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(facets.len(), facets.len(), |a, b| {
            if a == b {
                2.0
            } else {
                let m = self.order(facets[a], facets[b]).expect("facets are adjacent");
                -2.0 * cos_pi_over(m)
            }
        })
    }

    fn vertex_is_elliptic(&self, v: &[usize]) -> bool {
        let eig = self.cosine_matrix(v).symmetric_eigenvalues();
        eig.iter().all(|&l| l > 1e-10)
    }

    /// The order-2 graph on facets as adjacency lists.
    pub fn right_angled_graph(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.facet_count()];
        for (i, j) in self.right_angled_ridges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cube, esselmann_polytope, simplex};

    fn tetrahedron() -> CoxeterOrbifold {
        CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
            (0, 1) | (2, 3) => 3,
            (1, 2) => 5,
            _ => 2,
        })
        .unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let c = tetrahedron().counts();
        assert_eq!((c.f, c.e, c.e2, c.e_plus, c.equations, c.delta), (4, 6, 3, 3, 13, 0));
        assert_eq!(c.formula_dimension(), 0);
        assert_eq!(c.naive_dimension(), 0);
    }

    #[test]
    fn right_angled_cube_is_valid() {
        let q = CoxeterOrbifold::with_orders(cube(), |_, _| 2).unwrap();
        assert_eq!(q.counts().e2, 12);
    }

    #[test]
    fn vertex_with_orders_334_is_rejected() {
        let err = CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
            (0, 1) | (0, 2) => 3,
            (1, 2) => 4,
            _ => 2,
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonElliptic { .. }));
    }

    #[test]
    fn order_keys_must_match_ridges() {
        let p = simplex(3);
        let mut orders: Vec<_> = p.ridges().iter().map(|&r| (r, 2)).collect();
        orders.pop();
        assert!(matches!(
            CoxeterOrbifold::new(p.clone(), orders.clone()),
            Err(Error::MissingOrder(2, 3))
        ));
        orders.push(((2, 3), 1));
        assert!(matches!(
            CoxeterOrbifold::new(p.clone(), orders),
            Err(Error::OrderTooSmall(2, 3, 1))
        ));
        let extra = cube().ridges().iter().map(|&r| (r, 2)).chain([((4, 5), 2)]).collect::<Vec<_>>();
        assert!(matches!(CoxeterOrbifold::new(cube(), extra), Err(Error::ExtraOrder(4, 5))));
    }

    #[test]
    fn esselmann_counts() {
        let q = CoxeterOrbifold::with_orders(esselmann_polytope(), |i, j| match (i, j) {
            (0, 1) | (1, 2) | (4, 5) => 5,
            (2, 3) | (3, 4) | (0, 3) | (3, 5) => 3,
            _ => 2,
        })
        .unwrap();
        let c = q.counts();
        assert_eq!((c.e2, c.e_plus, c.delta, c.equations), (8, 7, 1, 29));
        assert_eq!(c.formula_dimension(), 1);
        assert_eq!(c.naive_dimension(), 1);
    }

    #[test]
    fn raw_round_trip_and_one_based_orders() {
        let q = tetrahedron();
        let raw = q.to_raw();
        assert!(raw.orders.contains(&[2, 3, 5]));
        assert_eq!(CoxeterOrbifold::from_raw(&raw).unwrap(), q);
    }
}

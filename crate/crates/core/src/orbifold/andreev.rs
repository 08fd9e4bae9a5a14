//! The necessary angle conditions for a compact hyperbolic 3-orbifold.

use std::f64::consts::PI;

use serde::Serialize;

use super::CoxeterOrbifold;
use crate::error::{Error, Result};

/// A vertex whose orders `(a, b, c)` have `1/a + 1/b + 1/c <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexViolation {
    pub facets: Vec<usize>,
    pub orders: Vec<u32>,
}

/// A prismatic circuit whose angle sum is too large.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitViolation {
    pub facets: Vec<usize>,
    pub orders: Vec<u32>,
    pub angle_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AndreevReport {
    pub vertex_violations: Vec<VertexViolation>,
    pub triangle_violations: Vec<CircuitViolation>,
    pub quadrilateral_violations: Vec<CircuitViolation>,
    pub is_tetrahedron: bool,
}

impl AndreevReport {
    /// Whether every checked inequality holds. Tetrahedra are outside the
    /// scope of these conditions and never pass.
    pub fn passed(&self) -> bool {
        self.vertex_violations.is_empty()
            && self.triangle_violations.is_empty()
            && self.quadrilateral_violations.is_empty()
            && !self.is_tetrahedron
    }
}

/// Reciprocal sums are compared exactly on integers: `1/a + 1/b + 1/c > 1`
/// iff `bc + ac + ab > abc`.
pub(crate) fn vertex_is_spherical(a: u32, b: u32, c: u32) -> bool {
    let (a, b, c) = (a as u64, b as u64, c as u64);
    b * c + a * c + a * b > a * b * c
}

/// `sum pi / m_k < bound * pi`, decided on integers.
pub(crate) fn angle_sum_below(orders: &[u32], bound: u64) -> bool {
    let product: u64 = orders.iter().map(|&m| m as u64).product();
    let numerator: u64 = orders.iter().map(|&m| product / m as u64).sum();
    numerator < bound * product
}

impl CoxeterOrbifold {
    /// Checks the vertex and prismatic-circuit inequalities for a 3-orbifold.
    pub fn andreev_necessary_check(&self) -> Result<AndreevReport> {
        let p = self.polytope();
        if p.dim() != 3 {
            return Err(Error::NeedsDimensionThree);
        }
        let orders_along = |cycle: &[usize]| -> Vec<u32> {
            (0..cycle.len())
                .map(|k| self.order(cycle[k], cycle[(k + 1) % cycle.len()]).expect("adjacent"))
                .collect()
        };
        let angle_sum = |orders: &[u32]| orders.iter().map(|&m| PI / m as f64).sum::<f64>();

        let mut vertex_violations = Vec::new();
        for v in p.vertices().expect("3-polytopes carry vertices") {
            let orders = orders_along(v);
            if !vertex_is_spherical(orders[0], orders[1], orders[2]) {
                vertex_violations.push(VertexViolation { facets: v.clone(), orders });
            }
        }
        let mut triangle_violations = Vec::new();
        for cycle in p.prismatic_circuits(3)? {
            let orders = orders_along(&cycle);
            if !angle_sum_below(&orders, 1) {
                triangle_violations.push(CircuitViolation { angle_sum: angle_sum(&orders), facets: cycle, orders });
            }
        }
        let mut quadrilateral_violations = Vec::new();
        for cycle in p.prismatic_circuits(4)? {
            let orders = orders_along(&cycle);
            if !angle_sum_below(&orders, 2) {
                quadrilateral_violations.push(CircuitViolation { angle_sum: angle_sum(&orders), facets: cycle, orders });
            }
        }
        Ok(AndreevReport {
            vertex_violations,
            triangle_violations,
            quadrilateral_violations,
            is_tetrahedron: p.is_simplex(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cube, dodecahedron};

    #[test]
    fn integer_angle_tests() {
        assert!(vertex_is_spherical(2, 2, 100));
        assert!(vertex_is_spherical(2, 3, 5));
        assert!(!vertex_is_spherical(2, 3, 6));
        assert!(!vertex_is_spherical(3, 3, 4));
        assert!(!angle_sum_below(&[2, 2, 2, 2], 2));
        assert!(angle_sum_below(&[2, 2, 2, 3], 2));
        assert!(!angle_sum_below(&[2, 3, 6], 1));
        assert!(angle_sum_below(&[2, 3, 7], 1));
    }

    #[test]
    fn right_angled_cube_violates_every_equator() {
        let q = CoxeterOrbifold::with_orders(cube(), |_, _| 2).unwrap();
        let report = q.andreev_necessary_check().unwrap();
        assert_eq!(report.quadrilateral_violations.len(), 3);
        assert!((report.quadrilateral_violations[0].angle_sum - 2.0 * PI).abs() < 1e-12);
        assert!(!report.passed());
    }

    #[test]
    fn dodecahedron_circuit_checks_are_vacuous() {
        let q = CoxeterOrbifold::with_orders(dodecahedron(), |_, _| 2).unwrap();
        let report = q.andreev_necessary_check().unwrap();
        assert!(report.triangle_violations.is_empty());
        assert!(report.quadrilateral_violations.is_empty());
        assert!(report.passed());
    }

    #[test]
    fn tetrahedra_are_flagged() {
        let q = CoxeterOrbifold::with_orders(crate::polytope::simplex(3), |_, _| 2).unwrap();
        assert!(q.andreev_necessary_check().unwrap().is_tetrahedron);
    }
}

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog;
use crate::linalg::RankPolicy;
use crate::lorentz::{realize_simplex, RealizationChecks};

fn random_point(f: usize, w: usize, seed: u64) -> VinbergPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || DVector::from_fn(w, |_, _| rng.random_range(-1.0..1.0));
    let alphas = (0..f).map(|_| v()).collect();
    let vectors = (0..f).map(|_| v()).collect();
    VinbergPoint::new(alphas, vectors).unwrap()
}

/// Central differences of `phi_eval` in the stacked coordinates.
fn jacobian_by_differences(q: &CoxeterOrbifold, p: &VinbergPoint) -> DMatrix<f64> {
    let x = p.stacked();
    let (f, w) = (p.facet_count(), p.width());
    let h = 1e-6;
    let rows = phi_eval(q, p).unwrap().len();
    let mut jac = DMatrix::zeros(rows, x.len());
    for k in 0..x.len() {
        let (mut plus, mut minus) = (x.clone(), x.clone());
        plus[k] += h;
        minus[k] -= h;
        let fp = phi_eval(q, &VinbergPoint::from_stacked(f, w, &plus).unwrap()).unwrap();
        let fm = phi_eval(q, &VinbergPoint::from_stacked(f, w, &minus).unwrap()).unwrap();
        jac.set_column(k, &((fp - fm) / (2.0 * h)));
    }
    jac
}

fn tetrahedron_point() -> (CoxeterOrbifold, VinbergPoint) {
    let q = catalog::tetrahedron();
    let r = realize_simplex(&q, RealizationChecks::default()).unwrap();
    let p = hyperbolic_point(&r);
    (q, p)
}

#[test]
fn jacobian_matches_finite_differences() {
    for (q, seed) in [(catalog::tetrahedron(), 1), (catalog::esselmann(), 2), (catalog::cube_pattern('c').unwrap(), 3)] {
        let p = random_point(q.facet_count(), q.dim() + 1, seed);
        let exact = phi_jacobian(&q, &p).unwrap();
        let numeric = jacobian_by_differences(&q, &p);
        assert!((&exact - &numeric).amax() < 1e-7, "{}", (&exact - &numeric).amax());
        assert_eq!(exact.nrows(), q.counts().equations);
    }
}

#[test]
fn equation_rows_are_labeled_in_order() {
    let q = catalog::tetrahedron();
    let labels = EquationIndex::new(&q).labels();
    assert_eq!(
        labels,
        [
            "a(1,3)", "a(1,4)", "a(2,4)", "a(3,1)", "a(4,1)", "a(4,2)", "a(1,2)a(2,1)", "a(2,3)a(3,2)", "a(3,4)a(4,3)",
            "a(1,1)", "a(2,2)", "a(3,3)", "a(4,4)"
        ]
    );
}

#[test]
fn stacking_round_trips() {
    let p = random_point(5, 4, 9);
    assert_eq!(VinbergPoint::from_stacked(5, 4, &p.stacked()).unwrap(), p);
    assert!(VinbergPoint::from_stacked(5, 3, &p.stacked()).is_err());
}

#[test]
fn hyperbolic_points_solve_the_equations() {
    let (q, p) = tetrahedron_point();
    assert!(phi_eval(&q, &p).unwrap().amax() < 1e-12);
    assert!(check_u_membership(&q, &p, RankPolicy::default()).unwrap().passed());
}

#[test]
fn gauge_preserves_zeros_and_conjugates_the_cartan_matrix() {
    let (q, p) = tetrahedron_point();
    let d = [0.5, 2.0, 1.5, 3.0];
    let mut g = DMatrix::identity(4, 4);
    g[(0, 2)] = 0.7;
    g[(3, 1)] = -1.2;
    let moved = apply_gauge(&p, &d, &g).unwrap();
    assert!(phi_eval(&q, &moved).unwrap().amax() < 1e-12);
    let (a, b) = (p.cartan(), moved.cartan());
    for i in 0..4 {
        for j in 0..4 {
            assert!((b[(i, j)] - d[i] * a[(i, j)] / d[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn gauge_errors() {
    let p = random_point(4, 4, 4);
    let id = DMatrix::identity(4, 4);
    assert_eq!(apply_gauge(&p, &[1.0, -1.0, 1.0, 1.0], &id).unwrap_err(), Error::NonPositiveScaling);
    assert_eq!(apply_gauge(&p, &[1.0; 4], &DMatrix::zeros(4, 4)).unwrap_err(), Error::SingularGauge);
    assert!(matches!(apply_gauge(&p, &[1.0; 4], &(id.clone() * 2.0)), Err(Error::NotUnimodular(_))));
    assert!(matches!(apply_gauge(&p, &[1.0; 3], &id), Err(Error::Shape(_))));
}

#[test]
fn gauge_directions_are_derivatives_of_the_action() {
    let p = random_point(4, 4, 5);
    let directions = gauge_directions(&p);
    assert_eq!(directions.len(), 4 + 16);
    let h: f64 = 1e-6;
    let x = p.stacked();
    for i in 0..4 {
        let mut d = [1.0; 4];
        d[i] = h.exp();
        let moved = apply_gauge(&p, &d, &DMatrix::identity(4, 4)).unwrap();
        assert!(((moved.stacked() - &x) / h - &directions[i]).amax() < 1e-5);
    }
    for (k, l) in [(0, 1), (2, 3), (3, 0)] {
        let mut g = DMatrix::identity(4, 4);
        g[(k, l)] = h;
        let moved = apply_gauge(&p, &[1.0; 4], &g).unwrap();
        assert!(((moved.stacked() - &x) / h - &directions[4 + 4 * k + l]).amax() < 1e-5);
    }
}

#[test]
fn gauge_directions_lie_in_the_kernel_at_a_zero() {
    let (q, p) = tetrahedron_point();
    let jac = phi_jacobian(&q, &p).unwrap();
    for v in gauge_directions(&p) {
        assert!((&jac * v).amax() < 1e-10);
    }
}

#[test]
fn tetrahedron_rank_sum_and_replay() {
    let (q, p) = tetrahedron_point();
    let report = check_rank_sum(&q, &p, RankPolicy::default(), 1e-9).unwrap();
    assert!(report.holds && report.weakly_orderable && report.asserted);
    let replay = report.replay.unwrap();
    assert!(replay.block_triangular, "{replay:?}");
    assert_eq!(replay.upper_left_rank, q.counts().e2);
}

#[test]
fn rank_checks_refuse_non_zeros() {
    let q = catalog::tetrahedron();
    let p = random_point(4, 4, 6);
    assert!(matches!(check_rank_sum(&q, &p, RankPolicy::default(), 1e-9), Err(Error::NotAZero(_))));
    assert!(matches!(local_deformation_dimension(&q, &p, RankPolicy::default(), 1e-9), Err(Error::NotAZero(_))));
}

#[test]
fn tetrahedron_is_rigid() {
    let (q, p) = tetrahedron_point();
    let report = local_deformation_dimension(&q, &p, RankPolicy::default(), 1e-9).unwrap();
    assert!(report.full_rank);
    assert_eq!(report.gauge_rank, report.gauge_dimension);
    assert_eq!(report.dimension, 0);
    assert!(report.agrees_with_formula);
}

#[test]
fn u_membership_detects_wrong_signs() {
    let (q, mut p) = tetrahedron_point();
    // Reversing a covector puts the points on the wrong side of facet 0.
    p.alphas[0] = -&p.alphas[0];
    p.vectors[0] = -&p.vectors[0];
    let report = check_u_membership(&q, &p, RankPolicy::default()).unwrap();
    assert!(!report.passed());
    assert!(!report.sign_violations.is_empty());
}

#[test]
fn esselmann_determinant_matches_the_quintic() {
    let family = esselmann_family();
    let reference = family.reference.unwrap();
    for (x, y) in [(0.7, 1.3), (1.0, 1.0), (2.5, 0.4), (0.2, 3.0)] {
        let det = family.evaluate(&[x, y]).unwrap().entries().determinant();
        assert!((det * (reference.weight)(x, y) - esselmann_quintic(x, y)).abs() < 1e-10);
    }
    assert!(family.evaluate(&[1.0]).is_err());
    assert_eq!(family.evaluate(&[0.0, 1.0]).unwrap_err(), Error::NonPositiveScaling);
}

#[test]
fn quintic_gradient_matches_differences() {
    let h = 1e-6;
    for (x, y) in [(0.7, 1.3), (1.5, 0.5)] {
        let (gx, gy) = esselmann_quintic_gradient(x, y);
        let dx = (esselmann_quintic(x + h, y) - esselmann_quintic(x - h, y)) / (2.0 * h);
        let dy = (esselmann_quintic(x, y + h) - esselmann_quintic(x, y - h)) / (2.0 * h);
        assert!((gx - dx).abs() < 1e-6 && (gy - dy).abs() < 1e-6);
    }
}

#[test]
fn curve_points_lie_on_the_zero_set() {
    let grid = Grid::new((0.2, 3.0), (0.2, 3.0), 60, 60).unwrap();
    let curve = family_curve(&esselmann_family(), grid).unwrap();
    assert_eq!(curve.samples.len(), 3600);
    assert!(curve.reference_deviation.unwrap() < 1e-9);
    assert!(!curve.contour.is_empty());
    for line in &curve.contour {
        for &[x, y] in line {
            // Linear interpolation is accurate to a fraction of the spacing.
            let (gx, gy) = esselmann_quintic_gradient(x, y);
            let distance = esselmann_quintic(x, y).abs() / gx.hypot(gy);
            assert!(distance < 0.01, "{x} {y} {distance}");
        }
    }
    assert!(curve.to_csv().starts_with("x,y,det\n"));
    assert!(Grid::new((1.0, 0.0), (0.0, 1.0), 3, 3).is_err());
}

#[test]
fn branch_counts() {
    // Two lines crossing at the origin, and a single smooth curve.
    assert_eq!(branch_count(|x, y| x * y, (0.0, 0.0), 0.1, 64), 2);
    assert_eq!(branch_count(|x, y| x - y * y, (0.0, 0.0), 0.1, 64), 1);
    assert_eq!(branch_count(|x, y| x * x + y * y + 1.0, (0.0, 0.0), 0.1, 64), 0);
}

proptest! {
    #[test]
    fn gauge_action_is_free_at_random_points(seed in 0u64..1000) {
        let p = random_point(6, 4, seed);
        let rank = crate::linalg::numerical_rank(
            &crate::linalg::rows_matrix(&gauge_directions(&p)),
            RankPolicy::default(),
        ).rank;
        prop_assert_eq!(rank, 6 + 16 - 1);
    }

    #[test]
    fn phi_is_invariant_under_the_gauge(
        d in proptest::collection::vec(0.3f64..3.0, 4),
        shear in -2.0f64..2.0,
    ) {
        let (q, p) = tetrahedron_point();
        let mut g = DMatrix::identity(4, 4);
        g[(1, 2)] = shear;
        let moved = apply_gauge(&p, &d, &g).unwrap();
        prop_assert!(phi_eval(&q, &moved).unwrap().amax() < 1e-10);
    }
}

use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::lorentz::{realize_simplex, RealizationChecks};

fn tol() -> CartanTolerance {
    CartanTolerance::default()
}

fn cartan(rows: &[&[f64]]) -> CartanMatrix {
    CartanMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// Twice the Gram matrix of the realized tetrahedron.
fn tetrahedron_cartan() -> CartanMatrix {
    let q = crate::catalog::tetrahedron();
    let r = realize_simplex(&q, RealizationChecks::default()).unwrap();
    CartanMatrix::new(r.gram() * 2.0).unwrap().with_orbifold(&q).unwrap()
}

/// Smallest real eigenvalue from the full complex spectrum.
fn smallest_real_oracle(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-7 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn diagonal_is_snapped_or_rejected() {
    let a = cartan(&[&[2.0 + 1e-12, -1.0], &[-1.0, 2.0]]);
    assert_eq!(a.get(0, 0), 2.0);
    assert!(CartanMatrix::from_rows(&[vec![2.1, 0.0], vec![0.0, 2.0]]).is_err());
    assert!(CartanMatrix::from_rows(&[vec![2.0, 0.0]]).is_err());
}

#[test]
fn realized_tetrahedron_satisfies_every_condition() {
    let a = tetrahedron_cartan();
    let report = check_vinberg_conditions(&a, tol());
    assert!(report.checked_pattern);
    assert!(report.passed(), "{:?}", report.violations);
    let c = classify_group(&a, 3, tol(), RankPolicy::default());
    assert_eq!(c.class, GroupClass::NegativeIrreducible);
    assert_eq!(c.rank.rank, 4);
}

#[test]
fn sign_and_product_violations_are_named() {
    let a = cartan(&[&[2.0, 0.5, -1.0], &[-1.0, 2.0, 0.0], &[-1.0, -1.0, 2.0]]);
    let report = check_vinberg_conditions(&a, tol());
    let pairs: Vec<_> = report.violations.iter().map(|v| (v.pair, v.condition)).collect();
    assert_eq!(pairs, vec![((0, 1), Condition::SignPattern), ((1, 2), Condition::SignPattern)]);
    assert!(!report.sign_pattern_holds());

    let a = cartan(&[&[2.0, -1.0, -3.0], &[-1.0, 2.0, 0.0], &[-1.0, 0.0, 2.0]])
        .with_pairs(&[(0, 1, 4), (1, 2, 2)])
        .unwrap();
    let report = check_vinberg_conditions(&a, tol());
    let found: Vec<_> = report.violations.iter().map(|v| (v.pair, v.condition, v.expected)).collect();
    assert_eq!(found.len(), 2);
    assert_eq!(found[0].1, Condition::Product);
    assert!((found[0].2.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(found[1], ((0, 2), Condition::OpenProduct, Some(4.0)));
    assert!(report.sign_pattern_holds());
}

#[test]
fn classical_types_are_classified() {
    let a2 = cartan(&[&[2.0, -1.0], &[-1.0, 2.0]]);
    assert_eq!(classify_group(&a2, 1, tol(), RankPolicy::default()).class, GroupClass::Elliptic);

    let affine = cartan(&[&[2.0, -1.0, -1.0], &[-1.0, 2.0, -1.0], &[-1.0, -1.0, 2.0]]);
    let c = classify_group(&affine, 2, tol(), RankPolicy::default());
    assert_eq!(c.class, GroupClass::Parabolic);
    assert!(c.components[0].smallest_eigenvalue.abs() < 1e-12);

    // The (2, 3, 7) triangle group.
    let c7 = 2.0 * (std::f64::consts::PI / 7.0).cos();
    let hyperbolic = cartan(&[&[2.0, 0.0, -1.0], &[0.0, 2.0, -c7], &[-1.0, -c7, 2.0]]);
    assert_eq!(classify_group(&hyperbolic, 2, tol(), RankPolicy::default()).class, GroupClass::NegativeIrreducible);

    let split = cartan(&[&[2.0, 0.0, 0.0], &[0.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
    let c = classify_group(&split, 2, tol(), RankPolicy::default());
    assert_eq!(c.class, GroupClass::Elliptic);
    let parts: Vec<_> = c.components.iter().map(|c| c.indices.clone()).collect();
    assert_eq!(parts, vec![vec![0], vec![1, 2]]);
}

#[test]
fn non_symmetrizable_cycles_use_the_perron_root() {
    // A 3-cycle whose product of ratios around the cycle is not 1.
    let a = cartan(&[&[2.0, -2.0, -1.0], &[-0.5, 2.0, -3.0], &[-1.5, -1.0, 2.0]]);
    let c = decompose_components(&a, tol());
    assert_eq!(c.len(), 1);
    assert!(!c[0].symmetrized);
    assert!((c[0].smallest_eigenvalue - smallest_real_oracle(a.entries())).abs() < 1e-10);
    assert_eq!(c[0].sign, ComponentSign::Negative);
}

#[test]
fn normal_form_of_a_path_is_symmetric() {
    let a = cartan(&[&[2.0, -4.0, 0.0], &[-0.25, 2.0, -2.0], &[0.0, -0.5, 2.0]]);
    let nf = diagonal_normalize(&a, tol()).unwrap();
    assert!((&nf.matrix - nf.matrix.transpose()).amax() < 1e-12);
    assert!((nf.matrix[(0, 1)] + 1.0).abs() < 1e-12 && (nf.matrix[(1, 2)] + 1.0).abs() < 1e-12);
    assert_eq!(nf.tree, vec![(0, 1), (1, 2)]);
    assert!(nf.cycles.is_empty());
    assert_eq!(nf.scaling[0], 1.0);
}

#[test]
fn normal_form_errors() {
    let split = cartan(&[&[2.0, 0.0], &[0.0, 2.0]]);
    assert_eq!(diagonal_normalize(&split, tol()).unwrap_err(), Error::Decomposable);
    let bad = cartan(&[&[2.0, 1.0], &[-1.0, 2.0]]);
    assert_eq!(diagonal_normalize(&bad, tol()).unwrap_err(), Error::SignPattern(0, 1));
}

#[test]
fn cartan_factorization_recovers_the_matrix() {
    let a = tetrahedron_cartan();
    let p = realize_point_from_cartan(&a, 3, tol(), RankPolicy::default()).unwrap();
    assert_eq!((p.facet_count(), p.width()), (4, 4));
    assert!((p.cartan() - a.entries()).amax() < 1e-10);
}

#[test]
fn cartan_factorization_errors() {
    let a = tetrahedron_cartan();
    assert_eq!(
        realize_point_from_cartan(&a, 2, tol(), RankPolicy::default()).unwrap_err(),
        Error::CartanRank { found: 4, expected: 3 }
    );
    let zero_block = cartan(&[
        &[2.0, -1.0, -1.0, 0.0],
        &[-1.0, 2.0, -1.0, 0.0],
        &[-1.0, -1.0, 2.0, 0.0],
        &[0.0, 0.0, 0.0, 2.0],
    ]);
    assert_eq!(
        realize_point_from_cartan(&zero_block, 2, tol(), RankPolicy::default()).unwrap_err(),
        Error::ZeroTypeComponent(vec![0, 1, 2])
    );
    let bad = cartan(&[&[2.0, 1.0], &[-1.0, 2.0]]);
    assert_eq!(realize_point_from_cartan(&bad, 1, tol(), RankPolicy::default()).unwrap_err(), Error::SignPattern(0, 1));
}

/// Matrices with 2 on the diagonal and strictly negative off-diagonal
/// entries.
fn negative_matrix(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (2..=max).prop_flat_map(|k| {
        proptest::collection::vec(0.05f64..3.0, k * k)
            .prop_map(move |v| DMatrix::from_fn(k, k, |i, j| if i == j { 2.0 } else { -v[i * k + j] }))
    })
}

proptest! {
    #[test]
    fn smallest_eigenvalue_matches_the_spectrum(m in negative_matrix(6)) {
        let a = CartanMatrix::new(m.clone()).unwrap();
        let c = decompose_components(&a, tol());
        prop_assert_eq!(c.len(), 1);
        let oracle = smallest_real_oracle(&m);
        prop_assert!((c[0].smallest_eigenvalue - oracle).abs() < 1e-8 * (1.0 + oracle.abs()),
            "{} vs {}", c[0].smallest_eigenvalue, oracle);
    }

    #[test]
    fn symmetrizable_matrices_use_the_symmetric_solver(
        m in negative_matrix(5),
        d in proptest::collection::vec(0.2f64..5.0, 5),
    ) {
        let k = m.nrows();
        let s = DMatrix::from_fn(k, k, |i, j| if i == j { 2.0 } else { m[(i.min(j), i.max(j))] });
        let conjugated = DMatrix::from_fn(k, k, |i, j| d[i] * s[(i, j)] / d[j]);
        let a = CartanMatrix::new(conjugated).unwrap();
        let c = decompose_components(&a, tol());
        prop_assert!(c[0].symmetrized);
        let oracle = s.symmetric_eigenvalues().min();
        prop_assert!((c[0].smallest_eigenvalue - oracle).abs() < 1e-9 * (1.0 + oracle.abs()));
    }

    #[test]
    fn normal_form_is_invariant_under_diagonal_conjugation(
        m in negative_matrix(5),
        d in proptest::collection::vec(0.2f64..5.0, 5),
    ) {
        let k = m.nrows();
        let a = CartanMatrix::new(m.clone()).unwrap();
        let b = CartanMatrix::new(DMatrix::from_fn(k, k, |i, j| d[i] * m[(i, j)] / d[j])).unwrap();
        let (na, nb) = (diagonal_normalize(&a, tol()).unwrap(), diagonal_normalize(&b, tol()).unwrap());
        prop_assert!((&na.matrix - &nb.matrix).amax() < 1e-9 * na.matrix.amax());
        prop_assert_eq!(&na.tree, &nb.tree);
        for (x, y) in na.cycles.iter().zip(&nb.cycles) {
            prop_assert!((x.value - y.value).abs() < 1e-9 * x.value);
        }
        // The scaling really conjugates.
        let rebuilt = DMatrix::from_fn(k, k, |i, j| na.scaling[i] * m[(i, j)] / na.scaling[j]);
        prop_assert!((&rebuilt - &na.matrix).amax() < 1e-9 * na.matrix.amax());
    }
}

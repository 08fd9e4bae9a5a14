//! Lorentzian linear algebra and hyperbolic realizations of Coxeter orbifolds.
//!
//! Vectors live in `R^{n+1}` with the form `<x, y> = -x_0 y_0 + x_1 y_1 + ...`.
//! A facet is described by a unit spacelike normal `nu`; the polytope is the
//! set of timelike `x` with `x_0 > 0` and `<nu_i, x> >= 0` for every facet.

mod newton;
pub mod seeds;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{null_space, rows_matrix, RankPolicy};
use crate::orbifold::{cos_pi_over, CoxeterOrbifold};

pub use newton::{realize_by_continuation, solve_hyperbolic_newton, NewtonOptions};

/// The diagonal matrix `diag(-1, 1, ..., 1)` of size `size`.
pub fn form(size: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(size, size);
    j[(0, 0)] = -1.0;
    j
}

/// The Lorentzian inner product.
pub fn dot(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(y) - 2.0 * x[0] * y[0]
}

/// `J x`, the vector representing `<x, .>` as a Euclidean covector.
pub fn lower(x: &DVector<f64>) -> DVector<f64> {
    let mut out = x.clone();
    out[0] = -out[0];
    out
}

/// Whether `g` preserves the form, `g^T J g = J`, to `tol`.
pub fn is_lorentz(g: &DMatrix<f64>, tol: f64) -> bool {
    let j = form(g.nrows());
    (g.transpose() * &j * g - j).amax() < tol
}

/// Symmetric matrix of prescribed inner products; entries for non-adjacent
/// facets are unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub entries: DMatrix<f64>,
    pub known: DMatrix<bool>,
}

impl GramMatrix {
    pub fn is_complete(&self) -> bool {
        self.known.iter().all(|&k| k)
    }
}

/// Prescribed Gram matrix: `1` on the diagonal and `-cos(pi / n_ij)` on
/// ridges. Unknown entries are stored as zero.
pub fn gram_matrix(q: &CoxeterOrbifold) -> GramMatrix {
    let f = q.facet_count();
    let mut entries = DMatrix::identity(f, f);
    let mut known = DMatrix::from_element(f, f, false);
    for i in 0..f {
        known[(i, i)] = true;
    }
    for ((i, j), m) in q.ridge_orders() {
        let c = -cos_pi_over(m);
        entries[(i, j)] = c;
        entries[(j, i)] = c;
        known[(i, j)] = true;
        known[(j, i)] = true;
    }
    GramMatrix { entries, known }
}

/// Thresholds used to validate a realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealizationChecks {
    /// Allowed deviation in prescribed inner products.
    pub tolerance: f64,
    /// Non-adjacent facets must satisfy `<nu_i, nu_j> < divergence`.
    pub divergence: f64,
}

impl Default for RealizationChecks {
    fn default() -> Self {
        RealizationChecks { tolerance: 1e-8, divergence: -1.0 }
    }
}

/// Position of one vertex of the realized polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexFlag {
    pub facets: Vec<usize>,
    /// Intersection of the facet hyperplanes scaled to `x_0 = 1`, when finite.
    pub point: Option<Vec<f64>>,
    /// `<x, x>` of that point.
    pub norm: f64,
    /// Whether `<x, x> < 0`.
    pub compact: bool,
    /// Whether the point lies strictly inside every other facet's half-space.
    pub inside: bool,
}

impl VertexFlag {
    pub fn ok(&self) -> bool {
        self.compact && self.inside
    }
}

/// Unit normals of a compact hyperbolic Coxeter polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicRealization {
    #[serde(serialize_with = "crate::serde_util::vectors")]
    pub normals: Vec<DVector<f64>>,
    /// Euclidean norm of the residual of the hyperbolic equations.
    pub residual: f64,
    pub iterations: usize,
    pub vertex_flags: Vec<VertexFlag>,
}

impl HyperbolicRealization {
    pub fn dim(&self) -> usize {
        self.normals[0].len() - 1
    }

    /// The matrix of inner products `<nu_i, nu_j>`.
    pub fn gram(&self) -> DMatrix<f64> {
        let f = self.normals.len();
        DMatrix::from_fn(f, f, |i, j| dot(&self.normals[i], &self.normals[j]))
    }

    /// Applies a Lorentz transformation to every normal.
    pub fn transformed(&self, g: &DMatrix<f64>) -> HyperbolicRealization {
        HyperbolicRealization {
            normals: self.normals.iter().map(|nu| g * nu).collect(),
            ..self.clone()
        }
    }
}

/// Ordered pair lists for the hyperbolic equations: order-2 ridges, then
/// higher ridges, each lexicographic. The diagonal equations come last.
pub(crate) fn psi_pairs(q: &CoxeterOrbifold) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<_> = q
        .right_angled_ridges()
        .into_iter()
        .map(|(i, j)| (i, j, 0.0))
        .collect();
    pairs.extend(
        q.higher_ridges()
            .into_iter()
            .map(|((i, j), m)| (i, j, cos_pi_over(m))),
    );
    pairs
}

/// Residual of the equations `2<nu_i, nu_j> + 2c = 0` for each `(i, j, c)` in
/// `pairs`, followed by `2<nu_i, nu_i> - 2 = 0`.
pub(crate) fn psi_residual(pairs: &[(usize, usize, f64)], normals: &[DVector<f64>]) -> DVector<f64> {
    let f = normals.len();
    let mut r = DVector::zeros(pairs.len() + f);
    for (row, &(i, j, c)) in pairs.iter().enumerate() {
        r[row] = 2.0 * dot(&normals[i], &normals[j]) + 2.0 * c;
    }
    for i in 0..f {
        r[pairs.len() + i] = 2.0 * dot(&normals[i], &normals[i]) - 2.0;
    }
    r
}

/// Jacobian of [`psi_residual`] with respect to the stacked normals.
pub(crate) fn psi_jacobian_for(pairs: &[(usize, usize, f64)], normals: &[DVector<f64>]) -> DMatrix<f64> {
    let f = normals.len();
    let w = normals[0].len();
    let alphas: Vec<DVector<f64>> = normals.iter().map(|nu| 2.0 * lower(nu)).collect();
    let mut jac = DMatrix::zeros(pairs.len() + f, w * f);
    for (row, &(i, j, _)) in pairs.iter().enumerate() {
        jac.view_mut((row, i * w), (1, w)).copy_from(&alphas[j].transpose());
        jac.view_mut((row, j * w), (1, w)).copy_from(&alphas[i].transpose());
    }
    for i in 0..f {
        jac.view_mut((pairs.len() + i, i * w), (1, w)).copy_from(&(2.0 * &alphas[i]).transpose());
    }
    jac
}

fn check_shapes(q: &CoxeterOrbifold, normals: &[DVector<f64>]) -> Result<()> {
    let (f, w) = (q.facet_count(), q.dim() + 1);
    if normals.len() != f || normals.iter().any(|nu| nu.len() != w) {
        return Err(Error::Shape(format!("expected {f} vectors of length {w}")));
    }
    Ok(())
}

/// Residuals of the hyperbolic equations: order-2 ridges, then higher ridges,
/// then the unit-length equations.
pub fn psi_eval(q: &CoxeterOrbifold, normals: &[DVector<f64>]) -> Result<DVector<f64>> {
    check_shapes(q, normals)?;
    Ok(psi_residual(&psi_pairs(q), normals))
}

/// The `(f + e) x (n+1) f` Jacobian of [`psi_eval`].
pub fn psi_jacobian(q: &CoxeterOrbifold, normals: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    check_shapes(q, normals)?;
    Ok(psi_jacobian_for(&psi_pairs(q), normals))
}

/// Locates every vertex of the polytope cut out by `normals`.
pub fn vertex_flags(q: &CoxeterOrbifold, normals: &[DVector<f64>]) -> Vec<VertexFlag> {
    let Some(vertices) = q.polytope().vertices() else {
        return Vec::new();
    };
    vertices
        .iter()
        .map(|facets| {
            let rows: Vec<_> = facets.iter().map(|&i| lower(&normals[i])).collect();
            let kernel = null_space(&rows_matrix(&rows), RankPolicy::Relative(1e-10));
            let mut flag = VertexFlag { facets: facets.clone(), point: None, norm: f64::NAN, compact: false, inside: false };
            if kernel.ncols() != 1 || kernel[(0, 0)].abs() < 1e-12 {
                return flag;
            }
            let x: DVector<f64> = kernel.column(0) / kernel[(0, 0)];
            flag.norm = dot(&x, &x);
            flag.compact = flag.norm < 0.0;
            flag.inside = (0..normals.len())
                .filter(|i| !facets.contains(i))
                .all(|i| dot(&normals[i], &x) > 0.0);
            flag.point = Some(x.iter().copied().collect());
            flag
        })
        .collect()
}

/// Checks the unit, angle and divergence conditions plus vertex positions.
pub fn validate_normals(
    q: &CoxeterOrbifold,
    normals: &[DVector<f64>],
    checks: RealizationChecks,
) -> Result<Vec<VertexFlag>> {
    check_shapes(q, normals)?;
    let gram = gram_matrix(q);
    let f = q.facet_count();
    for i in 0..f {
        for j in i..f {
            let value = dot(&normals[i], &normals[j]);
            if gram.known[(i, j)] {
                if (value - gram.entries[(i, j)]).abs() > checks.tolerance {
                    return Err(Error::InvalidRealization(format!(
                        "<nu_{i}, nu_{j}> = {value} but {} is prescribed",
                        gram.entries[(i, j)]
                    )));
                }
            } else if value >= checks.divergence {
                return Err(Error::InvalidRealization(format!(
                    "non-adjacent facets {i} and {j} have <nu_i, nu_j> = {value}"
                )));
            }
        }
    }
    let flags = vertex_flags(q, normals);
    if let Some(bad) = flags.iter().find(|flag| !flag.ok()) {
        return Err(Error::InvalidRealization(format!(
            "vertex {:?} is {}",
            bad.facets,
            if bad.compact { "outside the polytope" } else { "not in hyperbolic space" }
        )));
    }
    Ok(flags)
}

/// Realizes an orbifold whose facets are pairwise adjacent by factoring its
/// Gram matrix. This covers simplices and, in higher dimensions, polytopes
/// such as the product of two triangles.
pub fn realize_from_gram(q: &CoxeterOrbifold, checks: RealizationChecks) -> Result<HyperbolicRealization> {
    let gram = gram_matrix(q);
    if !gram.is_complete() {
        return Err(Error::Shape("Gram matrix is not fully determined".into()));
    }
    let n = q.dim();
    let f = q.facet_count();
    let eig = gram.entries.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let zero_tol = 1e-9 * scale;
    let negative: Vec<usize> = (0..f).filter(|&k| eig.eigenvalues[k] < -zero_tol).collect();
    let positive: Vec<usize> = (0..f).filter(|&k| eig.eigenvalues[k] > zero_tol).collect();
    let zero = f - negative.len() - positive.len();
    if f == n + 1 && zero > 0 && negative.is_empty() {
        return Err(Error::ZeroTypeGram);
    }
    if negative.len() != 1 || positive.len() != n {
        return Err(Error::WrongSignature { negative: negative.len(), zero, positive: positive.len() });
    }
    let columns: Vec<usize> = negative.iter().chain(&positive).copied().collect();
    let mut normals: Vec<DVector<f64>> = (0..f)
        .map(|i| {
            DVector::from_iterator(
                n + 1,
                columns.iter().map(|&k| eig.eigenvalues[k].abs().sqrt() * eig.eigenvectors[(i, k)]),
            )
        })
        .collect();
    orient(q, &mut normals);
    let residual = psi_eval(q, &normals)?.norm();
    let vertex_flags = validate_normals(q, &normals, checks)?;
    Ok(HyperbolicRealization { normals, residual, iterations: 0, vertex_flags })
}

/// Realizes a hyperbolic Coxeter simplex directly from its Gram matrix.
pub fn realize_simplex(q: &CoxeterOrbifold, checks: RealizationChecks) -> Result<HyperbolicRealization> {
    if !q.polytope().is_simplex() {
        return Err(Error::NotSimplex);
    }
    realize_from_gram(q, checks)
}

/// Realizes `q`: directly from the Gram matrix when every pair of facets is
/// adjacent, otherwise by continuation from the Klein-model seed `seed`.
pub fn realize(q: &CoxeterOrbifold, seed: Option<&[seeds::Plane]>, options: NewtonOptions) -> Result<HyperbolicRealization> {
    if gram_matrix(q).is_complete() {
        return realize_from_gram(q, options.checks);
    }
    let planes = seed.ok_or_else(|| Error::InvalidRealization("a seed is needed for non-simplicial Gram data".into()))?;
    if planes.len() != q.facet_count() || q.dim() != 3 {
        return Err(Error::Shape(format!("seed has {} planes for {} facets", planes.len(), q.facet_count())));
    }
    realize_by_continuation(q, &seeds::klein_normals(planes, seeds::SEED_RADIUS), options)
}

/// Flips all normals when the vertices see them pointing outward. The Gram
/// matrix is unchanged by the flip.
fn orient(q: &CoxeterOrbifold, normals: &mut [DVector<f64>]) {
    let flags = vertex_flags(q, normals);
    let outward = flags.iter().filter_map(|flag| flag.point.as_ref().map(|p| (flag, p))).all(|(flag, p)| {
        let x = DVector::from_column_slice(p);
        (0..normals.len())
            .filter(|i| !flag.facets.contains(i))
            .all(|i| dot(&normals[i], &x) < 0.0)
    });
    if outward && !flags.is_empty() {
        for nu in normals.iter_mut() {
            *nu = -&*nu;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::polytope::simplex;

    pub(crate) fn tetrahedron() -> CoxeterOrbifold {
        CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
            (0, 1) | (2, 3) => 3,
            (1, 2) => 5,
            _ => 2,
        })
        .unwrap()
    }

    #[test]
    fn gram_entries() {
        let g = gram_matrix(&tetrahedron());
        assert!(g.is_complete());
        assert!((g.entries[(0, 1)] + 0.5).abs() < 1e-15);
        assert_eq!(g.entries[(0, 2)], 0.0);
        assert!((g.entries[(1, 2)] + (PI / 5.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_realizes() {
        let q = tetrahedron();
        let r = realize_simplex(&q, RealizationChecks::default()).unwrap();
        assert!(r.residual < 1e-10);
        assert!((r.gram() - gram_matrix(&q).entries).amax() < 1e-10);
        assert_eq!(r.vertex_flags.len(), 4);
        assert!(r.vertex_flags.iter().all(VertexFlag::ok));
    }

    #[test]
    fn spherical_and_euclidean_simplices_are_rejected() {
        let spherical = CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
            (0, 1) => 5,
            (1, 2) | (2, 3) => 3,
            _ => 2,
        })
        .unwrap();
        assert!(matches!(
            realize_simplex(&spherical, RealizationChecks::default()),
            Err(Error::WrongSignature { negative: 0, .. })
        ));
        let euclidean = CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
            (0, 2) | (1, 3) => 2,
            _ => 3,
        })
        .unwrap();
        assert!(matches!(
            realize_simplex(&euclidean, RealizationChecks::default()),
            Err(Error::ZeroTypeGram)
        ));
    }

    #[test]
    fn psi_shapes_and_layout() {
        let q = tetrahedron();
        let r = realize_simplex(&q, RealizationChecks::default()).unwrap();
        let psi = psi_eval(&q, &r.normals).unwrap();
        assert_eq!(psi.len(), 10);
        assert!(psi.amax() < 1e-10);
        let jac = psi_jacobian(&q, &r.normals).unwrap();
        assert_eq!(jac.shape(), (10, 16));
        // First row is the order-2 ridge (0, 2): blocks 0 and 2 only.
        for block in [1, 3] {
            assert!(jac.view((0, 4 * block), (1, 4)).amax() == 0.0);
        }
        // Last row is the unit equation for facet 3: twice its covector.
        let alpha3 = 2.0 * lower(&r.normals[3]);
        assert!((jac.view((9, 12), (1, 4)).transpose() - 2.0 * alpha3).amax() < 1e-15);
    }

    #[test]
    fn perturbation_moves_the_residual_linearly() {
        let q = tetrahedron();
        let r = realize_simplex(&q, RealizationChecks::default()).unwrap();
        for eps in [1e-3, 1e-4] {
            let mut normals = r.normals.clone();
            normals[1][2] += eps;
            let norm = psi_eval(&q, &normals).unwrap().norm();
            assert!(norm > 0.1 * eps && norm < 10.0 * eps);
        }
    }
}

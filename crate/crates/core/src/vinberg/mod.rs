//! Vinberg's equations and their Jacobian.
//!
//! A point is a family of covectors `alpha_i` and vectors `b_i` in
//! `R^{n+1}`, one pair per facet; the Cartan matrix is `a_ij = alpha_i(b_j)`.
//! The equations ask for `a_ii = 2`, `a_ij = a_ji = 0` on order-2 ridges and
//! `a_ij a_ji = 4 cos^2(pi / n_ij)` on the other ridges.
//!
//! Rows are ordered as: the `a_ij` equations of order-2 ridges, their `a_ji`
//! partners, the product equations, then the diagonal equations, each block in
//! lexicographic pair order. Columns hold `alpha_1, ..., alpha_f` followed by
//! `b_1, ..., b_f`.

mod domain;
mod family;
mod rank;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lorentz::{lower, HyperbolicRealization};
use crate::orbifold::{cos_pi_over, CoxeterOrbifold};
use crate::polytope::Ridge;

pub use domain::{check_u_membership, DomainReport};
pub(crate) use domain::u_membership_parts;
pub use family::{
    branch_count, esselmann_family, esselmann_quintic, esselmann_quintic_gradient, family_curve, CurveSamples, Grid,
    ParametrizedFamily, Reference,
};
pub use rank::{
    check_rank_sum, gauge_directions, local_deformation_dimension, DeformationReport, RankSumReport, ReductionReplay,
};

/// Reflection data `(alpha_i, b_i)` for every facet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VinbergPoint {
    #[serde(serialize_with = "crate::serde_util::vectors")]
    pub alphas: Vec<DVector<f64>>,
    #[serde(serialize_with = "crate::serde_util::vectors")]
    pub vectors: Vec<DVector<f64>>,
}

impl VinbergPoint {
    pub fn new(alphas: Vec<DVector<f64>>, vectors: Vec<DVector<f64>>) -> Result<VinbergPoint> {
        let w = alphas.first().map_or(0, |a| a.len());
        if alphas.is_empty() || alphas.len() != vectors.len() || alphas.iter().chain(&vectors).any(|x| x.len() != w) {
            return Err(Error::Shape("covectors and vectors must come in equal numbers with equal lengths".into()));
        }
        Ok(VinbergPoint { alphas, vectors })
    }

    pub fn facet_count(&self) -> usize {
        self.alphas.len()
    }

    /// `n + 1`, the length of each vector.
    pub fn width(&self) -> usize {
        self.alphas[0].len()
    }

    /// `a_ij = alpha_i(b_j)`.
    pub fn cartan(&self) -> DMatrix<f64> {
        let f = self.facet_count();
        DMatrix::from_fn(f, f, |i, j| self.alphas[i].dot(&self.vectors[j]))
    }

    /// All coordinates, covectors first.
    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.facet_count() * self.width(),
            self.alphas.iter().chain(&self.vectors).flat_map(|x| x.iter().copied()),
        )
    }

    /// Inverse of [`VinbergPoint::stacked`].
    pub fn from_stacked(f: usize, width: usize, x: &DVector<f64>) -> Result<VinbergPoint> {
        if x.len() != 2 * f * width {
            return Err(Error::Shape(format!("expected {} coordinates, got {}", 2 * f * width, x.len())));
        }
        let block = |k: usize| DVector::from_column_slice(&x.as_slice()[k * width..(k + 1) * width]);
        VinbergPoint::new((0..f).map(block).collect(), (f..2 * f).map(block).collect())
    }
}

/// Equation bookkeeping for an orbifold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationIndex {
    pub facets: usize,
    pub right_angled: Vec<Ridge>,
    pub higher: Vec<(Ridge, u32)>,
    /// Pairs of distinct non-adjacent facets: inequalities only.
    pub disjoint: Vec<Ridge>,
}

impl EquationIndex {
    pub fn new(q: &CoxeterOrbifold) -> EquationIndex {
        let f = q.facet_count();
        let disjoint = (0..f)
            .flat_map(|i| (i + 1..f).map(move |j| (i, j)))
            .filter(|&(i, j)| q.order(i, j).is_none())
            .collect();
        EquationIndex { facets: f, right_angled: q.right_angled_ridges(), higher: q.higher_ridges(), disjoint }
    }

    /// Number of scalar equations, `f + e + e2`.
    pub fn len(&self) -> usize {
        self.facets + 2 * self.right_angled.len() + self.higher.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One-based row labels.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        out.extend(self.right_angled.iter().map(|&(i, j)| format!("a({},{})", i + 1, j + 1)));
        out.extend(self.right_angled.iter().map(|&(i, j)| format!("a({},{})", j + 1, i + 1)));
        out.extend(self.higher.iter().map(|&((i, j), _)| format!("a({},{})a({},{})", i + 1, j + 1, j + 1, i + 1)));
        out.extend((0..self.facets).map(|i| format!("a({},{})", i + 1, i + 1)));
        out
    }
}

fn check_point(q: &CoxeterOrbifold, p: &VinbergPoint) -> Result<()> {
    if p.facet_count() != q.facet_count() || p.width() != q.dim() + 1 {
        return Err(Error::Shape(format!(
            "expected {} facets in dimension {}, got {} vectors of length {}",
            q.facet_count(),
            q.dim() + 1,
            p.facet_count(),
            p.width()
        )));
    }
    Ok(())
}

/// The point `alpha_i = 2 <nu_i, .>`, `b_i = nu_i` of a hyperbolic realization.
pub fn hyperbolic_point(r: &HyperbolicRealization) -> VinbergPoint {
    VinbergPoint {
        alphas: r.normals.iter().map(|nu| 2.0 * lower(nu)).collect(),
        vectors: r.normals.clone(),
    }
}

/// Residuals of Vinberg's equations.
pub fn phi_eval(q: &CoxeterOrbifold, p: &VinbergPoint) -> Result<DVector<f64>> {
    check_point(q, p)?;
    let index = EquationIndex::new(q);
    let a = |i: usize, j: usize| p.alphas[i].dot(&p.vectors[j]);
    let mut r = Vec::with_capacity(index.len());
    r.extend(index.right_angled.iter().map(|&(i, j)| a(i, j)));
    r.extend(index.right_angled.iter().map(|&(i, j)| a(j, i)));
    r.extend(index.higher.iter().map(|&((i, j), m)| a(i, j) * a(j, i) - 4.0 * cos_pi_over(m).powi(2)));
    r.extend((0..index.facets).map(|i| a(i, i) - 2.0));
    Ok(DVector::from_vec(r))
}

/// The `N x 2(n+1)f` Jacobian of [`phi_eval`].
pub fn phi_jacobian(q: &CoxeterOrbifold, p: &VinbergPoint) -> Result<DMatrix<f64>> {
    check_point(q, p)?;
    let index = EquationIndex::new(q);
    let (f, w) = (p.facet_count(), p.width());
    let mut jac = DMatrix::zeros(index.len(), 2 * f * w);
    let mut put = |row: usize, block: usize, values: &DVector<f64>, scale: f64| {
        for k in 0..w {
            jac[(row, block * w + k)] += scale * values[k];
        }
    };
    let (alpha, b) = (&p.alphas, &p.vectors);
    let e2 = index.right_angled.len();
    for (k, &(i, j)) in index.right_angled.iter().enumerate() {
        // a_ij = alpha_i b_j
        put(k, i, &b[j], 1.0);
        put(k, f + j, &alpha[i], 1.0);
        // a_ji = alpha_j b_i
        put(e2 + k, j, &b[i], 1.0);
        put(e2 + k, f + i, &alpha[j], 1.0);
    }
    for (k, &((i, j), _)) in index.higher.iter().enumerate() {
        let row = 2 * e2 + k;
        let (aij, aji) = (alpha[i].dot(&b[j]), alpha[j].dot(&b[i]));
        put(row, i, &b[j], aji);
        put(row, j, &b[i], aij);
        put(row, f + i, &alpha[j], aij);
        put(row, f + j, &alpha[i], aji);
    }
    let offset = 2 * e2 + index.higher.len();
    for i in 0..f {
        put(offset + i, i, &b[i], 1.0);
        put(offset + i, f + i, &alpha[i], 1.0);
    }
    Ok(jac)
}

/// The gauge action `alpha_i -> d_i alpha_i g^{-1}`, `b_i -> d_i^{-1} g b_i`.
pub fn apply_gauge(p: &VinbergPoint, d: &[f64], g: &DMatrix<f64>) -> Result<VinbergPoint> {
    let (f, w) = (p.facet_count(), p.width());
    if d.len() != f || g.nrows() != w || g.ncols() != w {
        return Err(Error::Shape(format!("gauge needs {f} scalings and a {w}x{w} matrix")));
    }
    if d.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositiveScaling);
    }
    let det = g.determinant();
    let inverse = g.clone().try_inverse().filter(|_| det.abs() > 1e-300).ok_or(Error::SingularGauge)?;
    if (det.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnimodular(det.abs()));
    }
    let inverse_t = inverse.transpose();
    Ok(VinbergPoint {
        alphas: p.alphas.iter().zip(d).map(|(a, &di)| di * (&inverse_t * a)).collect(),
        vectors: p.vectors.iter().zip(d).map(|(b, &di)| (g * b) / di).collect(),
    })
}

#[cfg(test)]
mod tests;

//! Rank computations at a zero of Vinberg's equations: the comparison with
//! the hyperbolic Jacobian and the dimension of the deformation space.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_point, phi_eval, phi_jacobian, EquationIndex, VinbergPoint};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, rows_matrix, RankPolicy, RankReport};
use crate::lorentz::{lower, psi_jacobian};
use crate::orbifold::{CoxeterOrbifold, OrbifoldCounts};

/// The row and column reduction that turns `D Phi` at a hyperbolic point into
/// a block triangular matrix with `D Psi` in the lower right corner.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReplay {
    /// Largest entry of `[L | R] - [D Psi | D Psi]` over the lower rows,
    /// before the halves are subtracted.
    pub lower_rows_deviation: f64,
    /// Largest entry of the lower left block after subtraction.
    pub lower_left_max: f64,
    /// Rank of the upper left `e2 x (n+1)f` block after subtraction.
    pub upper_left_rank: usize,
    pub block_triangular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankSumReport {
    pub counts: OrbifoldCounts,
    pub phi: RankReport,
    pub psi: RankReport,
    /// `rank D Phi == rank D Psi + e2`.
    pub holds: bool,
    pub weakly_orderable: bool,
    /// The identity is asserted for weakly orderable orbifolds and only
    /// tested otherwise.
    pub asserted: bool,
    /// Present when the point has the form `alpha_i = 2 <b_i, .>`.
    pub replay: Option<ReductionReplay>,
    pub uncertain: bool,
}

fn max_residual(q: &CoxeterOrbifold, p: &VinbergPoint) -> Result<f64> {
    Ok(phi_eval(q, p)?.amax())
}

fn require_zero(q: &CoxeterOrbifold, p: &VinbergPoint, zero_tol: f64) -> Result<f64> {
    let r = max_residual(q, p)?;
    if !(r <= zero_tol) {
        return Err(Error::NotAZero(r));
    }
    Ok(r)
}

/// `b_i` when `alpha_i = 2 J b_i` holds for every facet.
fn hyperbolic_normals(p: &VinbergPoint) -> Option<Vec<DVector<f64>>> {
    let scale = p.vectors.iter().map(|b| b.amax()).fold(1.0, f64::max);
    p.alphas
        .iter()
        .zip(&p.vectors)
        .all(|(a, b)| (a - 2.0 * lower(b)).amax() <= 1e-12 * scale)
        .then(|| p.vectors.clone())
}

fn replay(q: &CoxeterOrbifold, p: &VinbergPoint, phi: &DMatrix<f64>, normals: &[DVector<f64>], policy: RankPolicy) -> Result<ReductionReplay> {
    let index = EquationIndex::new(q);
    let (f, w) = (p.facet_count(), p.width());
    let e2 = index.right_angled.len();
    let half = f * w;
    let mut m = phi.clone();
    for k in 0..e2 {
        let upper = m.row(k).clone_owned();
        let mut lower_row = m.row_mut(e2 + k);
        lower_row += upper;
    }
    for (k, &((i, j), _)) in index.higher.iter().enumerate() {
        let a = p.alphas[i].dot(&p.vectors[j]);
        m.row_mut(2 * e2 + k).scale_mut(1.0 / a);
    }
    let diagonal = 2 * e2 + index.higher.len();
    for i in 0..f {
        m.row_mut(diagonal + i).scale_mut(2.0);
    }
    // Right-multiplying a left block by 2J turns b_j^T into alpha_j.
    for block in 0..f {
        let mut col = m.column_mut(block * w);
        col.scale_mut(-2.0);
        for k in 1..w {
            m.column_mut(block * w + k).scale_mut(2.0);
        }
    }
    let psi = psi_jacobian(q, normals)?;
    let rows = m.nrows() - e2;
    let lower_left = m.view((e2, 0), (rows, half)).clone_owned();
    let lower_right = m.view((e2, half), (rows, half)).clone_owned();
    let lower_rows_deviation = (&lower_left - &psi).amax().max((&lower_right - &psi).amax());
    let right = m.columns(half, half).clone_owned();
    let mut left = m.columns_mut(0, half);
    left -= right;
    let lower_left_max = m.view((e2, 0), (rows, half)).amax();
    let upper_left = m.view((0, 0), (e2, half)).clone_owned();
    let upper_left_rank = if e2 == 0 { 0 } else { numerical_rank(&upper_left, policy).rank };
    let scale = phi.amax().max(1.0);
    Ok(ReductionReplay {
        lower_rows_deviation,
        lower_left_max,
        upper_left_rank,
        block_triangular: lower_rows_deviation <= 1e-9 * scale && lower_left_max <= 1e-9 * scale,
    })
}

/// Compares `rank D Phi` with `rank D Psi + e2` at a zero `p` of both
/// systems, and replays the reduction between the two when `p` comes from a
/// hyperbolic realization.
pub fn check_rank_sum(q: &CoxeterOrbifold, p: &VinbergPoint, policy: RankPolicy, zero_tol: f64) -> Result<RankSumReport> {
    check_point(q, p)?;
    require_zero(q, p, zero_tol)?;
    let normals = hyperbolic_normals(p);
    // D Psi only depends on the normals, which the b_i provide at a
    // hyperbolic point and approximate otherwise.
    let psi_at = normals.clone().unwrap_or_else(|| p.vectors.clone());
    let phi_matrix = phi_jacobian(q, p)?;
    let phi = numerical_rank(&phi_matrix, policy);
    let psi = numerical_rank(&psi_jacobian(q, &psi_at)?, policy);
    let counts = q.counts();
    let weakly_orderable = q.weak_order_geometric(&p.alphas, policy)?.is_ordered();
    let replay = match &normals {
        Some(nu) => Some(replay(q, p, &phi_matrix, nu, policy)?),
        None => None,
    };
    Ok(RankSumReport {
        counts,
        holds: phi.rank == psi.rank + counts.e2,
        weakly_orderable,
        asserted: weakly_orderable,
        replay,
        uncertain: phi.uncertain || psi.uncertain,
        phi,
        psi,
    })
}

/// Tangent vectors of the gauge orbit through `p`: one per facet scaling and
/// one per elementary matrix `E_kl`, in stacked coordinates.
pub fn gauge_directions(p: &VinbergPoint) -> Vec<DVector<f64>> {
    let (f, w) = (p.facet_count(), p.width());
    let mut out = Vec::with_capacity(f + w * w);
    for i in 0..f {
        let mut v = DVector::zeros(2 * f * w);
        v.rows_mut(i * w, w).copy_from(&p.alphas[i]);
        v.rows_mut((f + i) * w, w).copy_from(&(-&p.vectors[i]));
        out.push(v);
    }
    for k in 0..w {
        for l in 0..w {
            let mut v = DVector::zeros(2 * f * w);
            for i in 0..f {
                // alpha_i -> alpha_i (I - t E_kl), b_i -> (I + t E_kl) b_i
                v[i * w + l] = -p.alphas[i][k];
                v[(f + i) * w + k] = p.vectors[i][l];
            }
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationReport {
    pub counts: OrbifoldCounts,
    pub phi: RankReport,
    pub kernel_dimension: usize,
    pub gauge_dimension: usize,
    pub gauge_rank: usize,
    /// `rank D Phi == N`.
    pub full_rank: bool,
    /// `kernel - gauge`. Equal to the local dimension when `full_rank`, an
    /// upper bound otherwise.
    pub dimension: i64,
    /// `e+ - n - 2 delta`.
    pub formula_dimension: i64,
    pub agrees_with_formula: bool,
    pub max_residual: f64,
}

/// Local dimension of the deformation space at a zero `p` of Vinberg's
/// equations.
pub fn local_deformation_dimension(
    q: &CoxeterOrbifold,
    p: &VinbergPoint,
    policy: RankPolicy,
    zero_tol: f64,
) -> Result<DeformationReport> {
    check_point(q, p)?;
    let max_residual = require_zero(q, p, zero_tol)?;
    let counts = q.counts();
    let gauge_dimension = counts.gauge_dimension();
    let gauge_rank = numerical_rank(&rows_matrix(&gauge_directions(p)), policy).rank;
    if gauge_rank != gauge_dimension {
        return Err(Error::GaugeNotFree { found: gauge_rank, expected: gauge_dimension });
    }
    let phi = numerical_rank(&phi_jacobian(q, p)?, policy);
    let kernel_dimension = phi.kernel_dim();
    let full_rank = phi.rank == counts.equations;
    let dimension = kernel_dimension as i64 - gauge_dimension as i64;
    let formula_dimension = counts.formula_dimension();
    Ok(DeformationReport {
        counts,
        kernel_dimension,
        gauge_dimension,
        gauge_rank,
        full_rank,
        dimension,
        formula_dimension,
        agrees_with_formula: full_rank && dimension == formula_dimension,
        max_residual,
        phi,
    })
}

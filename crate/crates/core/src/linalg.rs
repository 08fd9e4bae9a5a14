//! Singular-value based rank decisions and small linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Straddling singular values closer than this ratio make a rank decision
/// uncertain.
pub const GAP_WARNING_RATIO: f64 = 1e3;

/// How the rank threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RankPolicy {
    /// `tau = max(rows, cols) * sigma_max * factor`.
    Relative(f64),
    /// A fixed threshold.
    Absolute(f64),
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy::Relative(1e-12)
    }
}

/// Outcome of a numerical rank computation, with the full spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rows: usize,
    pub cols: usize,
    /// Singular values in decreasing order.
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
    pub rank: usize,
    /// `sigma_rank / sigma_{rank+1}` when both exist.
    pub gap_ratio: Option<f64>,
    pub uncertain: bool,
}

impl RankReport {
    /// Dimension of the kernel (as a map on the column space).
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank
    }
}

/// Singular values of `m` in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank under `policy`.
pub fn numerical_rank(m: &DMatrix<f64>, policy: RankPolicy) -> RankReport {
    let sv = singular_values(m);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tolerance = match policy {
        RankPolicy::Relative(factor) => m.nrows().max(m.ncols()) as f64 * sigma_max * factor,
        RankPolicy::Absolute(tau) => tau,
    };
    let rank = sv.iter().filter(|&&s| s > tolerance).count();
    let gap_ratio = if rank > 0 && rank < sv.len() {
        let below = sv[rank];
        Some(if below == 0.0 { f64::INFINITY } else { sv[rank - 1] / below })
    } else {
        None
    };
    RankReport {
        rows: m.nrows(),
        cols: m.ncols(),
        uncertain: gap_ratio.is_some_and(|g| g < GAP_WARNING_RATIO),
        singular_values: sv,
        tolerance,
        rank,
        gap_ratio,
    }
}

/// Orthonormal basis of the numerical kernel, as columns.
pub fn null_space(m: &DMatrix<f64>, policy: RankPolicy) -> DMatrix<f64> {
    let cols = m.ncols();
    let report = numerical_rank(m, policy);
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let kernel: Vec<DVector<f64>> = order[report.rank..]
        .iter()
        .map(|&k| v_t.row(k).transpose())
        .collect();
    if kernel.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&kernel)
    }
}

/// Stacks vectors as the rows of a matrix.
pub fn rows_matrix(rows: &[DVector<f64>]) -> DMatrix<f64> {
    let cols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let r = numerical_rank(&DMatrix::identity(5, 5), RankPolicy::default());
        assert_eq!(r.rank, 5);
        assert!(!r.uncertain);
        assert_eq!(r.gap_ratio, None);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let v = DVector::from_vec(vec![4.0, -1.0, 0.5, 2.0]);
        let r = numerical_rank(&(&u * v.transpose()), RankPolicy::default());
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel_dim(), 3);
        assert!(r.gap_ratio.unwrap() > 1e10);
    }

    #[test]
    fn borderline_spectrum_is_flagged() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-3, 1e-9]));
        let r = numerical_rank(&m, RankPolicy::Absolute(1e-6));
        assert_eq!(r.rank, 2);
        assert!(!r.uncertain);
        let r = numerical_rank(&m, RankPolicy::Absolute(1e-2));
        assert_eq!(r.rank, 1);
        assert!(!r.uncertain);
        let close = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-5, 1e-7]));
        let r = numerical_rank(&close, RankPolicy::Absolute(1e-6));
        assert!(r.uncertain);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let k = null_space(&m, RankPolicy::default());
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
    }
}

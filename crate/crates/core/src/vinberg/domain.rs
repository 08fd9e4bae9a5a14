//! The open conditions that single out geometric solutions of Vinberg's
//! equations: a common interior point, spanning covectors, negative
//! off-diagonal entries on non-right-angled pairs and `a_ij a_ji > 4` on
//! disjoint pairs.

use nalgebra::DVector;
use serde::Serialize;

use super::{check_point, VinbergPoint};
use crate::cartan::PairKind;
use crate::error::Result;
use crate::linalg::{null_space, numerical_rank, rows_matrix, RankPolicy};
use crate::orbifold::CoxeterOrbifold;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    /// A vector `v` with `alpha_i(v) > 0` for all `i`, when one was found.
    pub interior_point: Option<Vec<f64>>,
    pub span_rank: usize,
    pub spans: bool,
    /// Pairs that must have both entries negative but do not.
    pub sign_violations: Vec<(usize, usize)>,
    /// Disjoint pairs with `a_ij a_ji <= 4`, with the product.
    pub open_violations: Vec<(usize, usize, f64)>,
}

impl DomainReport {
    pub fn passed(&self) -> bool {
        self.interior_point.is_some() && self.spans && self.sign_violations.is_empty() && self.open_violations.is_empty()
    }
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if current.len() == k {
            visit(current);
            return;
        }
        for x in start..n {
            if n - x < k - current.len() {
                break;
            }
            current.push(x);
            go(x + 1, n, k, current, visit);
            current.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), visit);
}

/// A point in the interior of the cone `{v : alpha_i(v) >= 0}`, found as the
/// sum of its extreme rays. Every extreme ray of a pointed cone in `R^w` is
/// cut out by `w - 1` of the inequalities, so enumerating those subsets finds
/// them all.
fn interior_point(alphas: &[DVector<f64>], policy: RankPolicy) -> Option<DVector<f64>> {
    let w = alphas[0].len();
    let mut sum = DVector::zeros(w);
    let mut found = false;
    subsets(alphas.len(), w - 1, &mut |subset| {
        let rows: Vec<_> = subset.iter().map(|&i| alphas[i].clone()).collect();
        let kernel = null_space(&rows_matrix(&rows), policy);
        if kernel.ncols() != 1 {
            return;
        }
        let ray: DVector<f64> = kernel.column(0).into();
        let values: Vec<f64> = alphas.iter().map(|a| a.dot(&ray)).collect();
        let slack = |i: usize| 1e-9 * alphas[i].norm();
        let sign = if (0..alphas.len()).all(|i| values[i] >= -slack(i)) {
            1.0
        } else if (0..alphas.len()).all(|i| values[i] <= slack(i)) {
            -1.0
        } else {
            return;
        };
        sum += sign * ray;
        found = true;
    });
    if !found {
        return None;
    }
    let norm = sum.norm();
    (alphas.iter().all(|a| a.dot(&sum) > 1e-9 * a.norm() * norm)).then_some(sum)
}

pub(crate) fn u_membership_parts(
    p: &VinbergPoint,
    kind: impl Fn(usize, usize) -> Option<PairKind>,
    policy: RankPolicy,
) -> DomainReport {
    let f = p.facet_count();
    let span_rank = numerical_rank(&rows_matrix(&p.alphas), policy).rank;
    let spans = span_rank == p.width();
    let interior_point = if spans { interior_point(&p.alphas, policy).map(|v| v.iter().copied().collect()) } else { None };
    let a = p.cartan();
    let mut sign_violations = Vec::new();
    let mut open_violations = Vec::new();
    for i in 0..f {
        for j in i + 1..f {
            match kind(i, j) {
                Some(PairKind::Order(_)) | Some(PairKind::Disjoint) if !(a[(i, j)] < 0.0 && a[(j, i)] < 0.0) => {
                    sign_violations.push((i, j));
                }
                _ => {}
            }
            if kind(i, j) == Some(PairKind::Disjoint) {
                let product = a[(i, j)] * a[(j, i)];
                if !(product > 4.0) {
                    open_violations.push((i, j, product));
                }
            }
        }
    }
    DomainReport { interior_point, span_rank, spans, sign_violations, open_violations }
}

/// Checks the open conditions at `p` for the pair pattern of `q`.
pub fn check_u_membership(q: &CoxeterOrbifold, p: &VinbergPoint, policy: RankPolicy) -> Result<DomainReport> {
    check_point(q, p)?;
    Ok(u_membership_parts(
        p,
        |i, j| match q.order(i, j) {
            Some(2) => Some(PairKind::RightAngle),
            Some(m) => Some(PairKind::Order(m)),
            None => Some(PairKind::Disjoint),
        },
        policy,
    ))
}

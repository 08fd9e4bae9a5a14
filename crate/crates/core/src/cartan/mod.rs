//! Cartan matrices of projective Coxeter groups.
//!
//! A Cartan matrix `a_ij = alpha_i(b_j)` carries the reflection data of a
//! linear Coxeter group up to conjugation and the diagonal rescaling
//! `a_ij -> d_i a_ij / d_j`. This module checks the sign and product
//! conditions on such matrices, splits them into indecomposable components,
//! classifies those by the sign of their smallest real eigenvalue, picks a
//! normal form for the diagonal action and recovers reflection data from a
//! rank factorization.

mod normal;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, RankPolicy, RankReport};
use crate::orbifold::{cos_pi_over, CoxeterOrbifold};
use crate::vinberg::{u_membership_parts, VinbergPoint};

pub use normal::{diagonal_normalize, CycleCoordinate, NormalForm};

/// How a pair of distinct facets is constrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum PairKind {
    /// Adjacent with order 2: both entries vanish.
    RightAngle,
    /// Adjacent with order `m >= 3`: `a_ij a_ji = 4 cos^2(pi / m)`.
    Order(u32),
    /// Not adjacent: `a_ij a_ji > 4`.
    Disjoint,
}

impl PairKind {
    fn from_order(order: Option<u32>) -> PairKind {
        match order {
            Some(2) => PairKind::RightAngle,
            Some(m) => PairKind::Order(m),
            None => PairKind::Disjoint,
        }
    }
}

/// Numerical tolerances used on Cartan matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CartanTolerance {
    /// Entries with `|a| <= zero * ||A||` count as zero; eigenvalues with
    /// `|lambda| <= zero * ||A||` are of zero type.
    pub zero: f64,
    /// Relative tolerance on the products `a_ij a_ji`.
    pub product: f64,
}

impl Default for CartanTolerance {
    fn default() -> Self {
        CartanTolerance { zero: 1e-9, product: 1e-9 }
    }
}

/// A square matrix with `2` on the diagonal, optionally tied to the pair
/// pattern of an orbifold.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanMatrix {
    entries: DMatrix<f64>,
    kinds: Option<DMatrix<Option<PairKind>>>,
}

impl CartanMatrix {
    /// Wraps `entries`. Diagonal entries within `1e-9` of `2` are snapped to
    /// exactly `2`; anything further off is rejected.
    pub fn new(mut entries: DMatrix<f64>) -> Result<CartanMatrix> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Shape(format!("Cartan matrix is {}x{}", entries.nrows(), entries.ncols())));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("Cartan matrix has non-finite entries".into()));
        }
        for i in 0..entries.nrows() {
            if (entries[(i, i)] - 2.0).abs() > 1e-9 {
                return Err(Error::Shape(format!("diagonal entry {i} is {}, expected 2", entries[(i, i)])));
            }
            entries[(i, i)] = 2.0;
        }
        Ok(CartanMatrix { entries, kinds: None })
    }

    /// Builds a matrix from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<CartanMatrix> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::Shape("Cartan matrix rows have unequal lengths".into()));
        }
        CartanMatrix::new(DMatrix::from_fn(size, size, |i, j| rows[i][j]))
    }

    /// Attaches the pair pattern of `q`.
    pub fn with_orbifold(self, q: &CoxeterOrbifold) -> Result<CartanMatrix> {
        let f = q.facet_count();
        if f != self.size() {
            return Err(Error::Shape(format!("orbifold has {f} facets, matrix has size {}", self.size())));
        }
        let kinds = DMatrix::from_fn(f, f, |i, j| (i != j).then(|| PairKind::from_order(q.order(i, j))));
        Ok(CartanMatrix { kinds: Some(kinds), ..self })
    }

    /// Attaches a pattern given as `(i, j, m)` triples for adjacent pairs;
    /// pairs that are not listed are disjoint.
    pub fn with_pairs(self, pairs: &[(usize, usize, u32)]) -> Result<CartanMatrix> {
        let f = self.size();
        let mut kinds = DMatrix::from_fn(f, f, |i, j| (i != j).then_some(PairKind::Disjoint));
        for &(i, j, m) in pairs {
            if i >= f || j >= f || i == j {
                return Err(Error::Shape(format!("pair ({i}, {j}) is out of range")));
            }
            if m < 2 {
                return Err(Error::OrderTooSmall(i, j, m));
            }
            kinds[(i, j)] = Some(PairKind::from_order(Some(m)));
            kinds[(j, i)] = kinds[(i, j)];
        }
        Ok(CartanMatrix { kinds: Some(kinds), ..self })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Constraint on the pair `(i, j)`, when a pattern is attached.
    pub fn kind(&self, i: usize, j: usize) -> Option<PairKind> {
        self.kinds.as_ref().and_then(|k| k[(i, j)])
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Largest singular value, used to scale tolerances.
    fn scale(&self) -> f64 {
        let s = crate::linalg::singular_values(&self.entries);
        s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE)
    }

    fn is_zero(&self, value: f64, tol: CartanTolerance) -> bool {
        value.abs() <= tol.zero * self.scale()
    }

    /// Adjacency lists of the non-zero off-diagonal pattern.
    pub fn support(&self, tol: CartanTolerance) -> Vec<Vec<usize>> {
        let f = self.size();
        let threshold = tol.zero * self.scale();
        (0..f)
            .map(|i| {
                (0..f)
                    .filter(|&j| j != i && (self.entries[(i, j)].abs() > threshold || self.entries[(j, i)].abs() > threshold))
                    .collect()
            })
            .collect()
    }

    /// Principal submatrix on `indices`.
    pub fn principal(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(indices.len(), indices.len(), |a, b| self.entries[(indices[a], indices[b])])
    }
}

/// Which condition a pair violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// An off-diagonal entry is positive, or exactly one of `a_ij`, `a_ji`
    /// vanishes.
    SignPattern,
    /// An order-2 pair has a non-zero entry.
    RightAngle,
    /// `a_ij a_ji != 4 cos^2(pi / m)` for an adjacent pair.
    Product,
    /// `a_ij a_ji <= 4` for a disjoint pair.
    OpenProduct,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairViolation {
    pub pair: (usize, usize),
    pub condition: Condition,
    pub a_ij: f64,
    pub a_ji: f64,
    /// The product the condition asks for, where it names one.
    pub expected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionsReport {
    pub checked_pattern: bool,
    pub violations: Vec<PairViolation>,
}

impl ConditionsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether only the sign conditions were violated, if at all.
    pub fn sign_pattern_holds(&self) -> bool {
        self.violations.iter().all(|v| v.condition != Condition::SignPattern)
    }
}

/// Checks the sign conditions and, when a pattern is attached, the product
/// conditions of every pair.
pub fn check_vinberg_conditions(a: &CartanMatrix, tol: CartanTolerance) -> ConditionsReport {
    let f = a.size();
    let mut violations = Vec::new();
    for i in 0..f {
        for j in i + 1..f {
            let (aij, aji) = (a.get(i, j), a.get(j, i));
            let violation = |condition, expected| PairViolation { pair: (i, j), condition, a_ij: aij, a_ji: aji, expected };
            let (zi, zj) = (a.is_zero(aij, tol), a.is_zero(aji, tol));
            if (!zi && aij > 0.0) || (!zj && aji > 0.0) || zi != zj {
                violations.push(violation(Condition::SignPattern, None));
                continue;
            }
            let product = aij * aji;
            match a.kind(i, j) {
                None => {}
                Some(PairKind::RightAngle) => {
                    if !zi {
                        violations.push(violation(Condition::RightAngle, Some(0.0)));
                    }
                }
                Some(PairKind::Order(m)) => {
                    let target = 4.0 * cos_pi_over(m).powi(2);
                    if (product - target).abs() > tol.product * target.max(1.0) {
                        violations.push(violation(Condition::Product, Some(target)));
                    }
                }
                Some(PairKind::Disjoint) => {
                    if product <= 4.0 {
                        violations.push(violation(Condition::OpenProduct, Some(4.0)));
                    }
                }
            }
        }
    }
    ConditionsReport { checked_pattern: a.kinds.is_some(), violations }
}

/// Sign of the smallest real eigenvalue of an indecomposable block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentSign {
    Positive,
    Zero,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub indices: Vec<usize>,
    pub sign: ComponentSign,
    pub smallest_eigenvalue: f64,
    /// Whether the block was symmetrized before the eigenvalue computation.
    pub symmetrized: bool,
}

/// Symmetric matrix similar to `block` under a positive diagonal, when one
/// exists: `s_ij = -sqrt(a_ij a_ji)`.
fn symmetrized(block: &DMatrix<f64>, support: &[Vec<usize>]) -> Option<DMatrix<f64>> {
    let k = block.nrows();
    // d_i with d_i a_ij / d_j symmetric, propagated along a BFS tree.
    let mut d = vec![0.0; k];
    let mut queue = std::collections::VecDeque::new();
    d[0] = 1.0;
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        for &j in &support[i] {
            if d[j] == 0.0 {
                // (d_i / d_j)^2 = a_ji / a_ij
                let ratio = block[(i, j)] / block[(j, i)];
                if !(ratio.is_finite() && ratio > 0.0) {
                    return None;
                }
                d[j] = d[i] * ratio.sqrt();
                queue.push_back(j);
            }
        }
    }
    let scaled = DMatrix::from_fn(k, k, |i, j| d[i] * block[(i, j)] / d[j]);
    let asymmetry = (&scaled - scaled.transpose()).amax();
    (asymmetry <= 1e-10 * scaled.amax()).then(|| DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            block[(i, i)]
        } else {
            -(block[(i, j)] * block[(j, i)]).max(0.0).sqrt()
        }
    }))
}

/// Smallest real eigenvalue of an indecomposable block satisfying the sign
/// conditions. `2I - A` is non-negative and irreducible, so its Perron root
/// `rho` is real and dominant, and the smallest real eigenvalue of `A` is
/// `2 - rho`.
pub fn smallest_real_eigenvalue(block: &DMatrix<f64>, support: &[Vec<usize>]) -> (f64, bool) {
    if let Some(sym) = symmetrized(block, support) {
        return (sym.symmetric_eigenvalues().min(), true);
    }
    let shifted = DMatrix::from_fn(block.nrows(), block.ncols(), |i, j| {
        if i == j { 0.0 } else { -block[(i, j)] }
    });
    let rho = shifted.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    (2.0 - rho, false)
}

/// Connected components of the non-zero pattern, each classified by the sign
/// of its smallest real eigenvalue.
pub fn decompose_components(a: &CartanMatrix, tol: CartanTolerance) -> Vec<Component> {
    let support = a.support(tol);
    let f = a.size();
    let scale = a.scale();
    let mut seen = vec![false; f];
    let mut out = Vec::new();
    for start in 0..f {
        if seen[start] {
            continue;
        }
        let mut indices = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < indices.len() {
            let i = indices[head];
            head += 1;
            for &j in &support[i] {
                if !seen[j] {
                    seen[j] = true;
                    indices.push(j);
                }
            }
        }
        indices.sort_unstable();
        let position = |x: usize| indices.binary_search(&x).expect("member");
        let local: Vec<Vec<usize>> = indices.iter().map(|&i| support[i].iter().map(|&j| position(j)).collect()).collect();
        let (lambda, symmetrized) = smallest_real_eigenvalue(&a.principal(&indices), &local);
        let sign = if lambda.abs() <= tol.zero * scale {
            ComponentSign::Zero
        } else if lambda > 0.0 {
            ComponentSign::Positive
        } else {
            ComponentSign::Negative
        };
        out.push(Component { indices, sign, smallest_eigenvalue: lambda, symmetrized });
    }
    out
}

/// Type of the group generated by the reflections of a Cartan matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupClass {
    /// Every component is of positive type: a finite group.
    Elliptic,
    /// Every component is of zero type and the rank is `n`: a Euclidean group.
    Parabolic,
    /// A single component of negative type with rank `n + 1`.
    NegativeIrreducible,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: GroupClass,
    pub components: Vec<Component>,
    pub rank: RankReport,
}

/// Classifies the group of `a` acting on an `(n+1)`-dimensional space.
pub fn classify_group(a: &CartanMatrix, n: usize, tol: CartanTolerance, policy: RankPolicy) -> Classification {
    let components = decompose_components(a, tol);
    let rank = numerical_rank(a.entries(), policy);
    let all = |sign| components.iter().all(|c| c.sign == sign);
    let class = if all(ComponentSign::Positive) {
        GroupClass::Elliptic
    } else if all(ComponentSign::Zero) && rank.rank == n {
        GroupClass::Parabolic
    } else if components.len() == 1 && components[0].sign == ComponentSign::Negative && rank.rank == n + 1 {
        GroupClass::NegativeIrreducible
    } else {
        GroupClass::Other
    };
    Classification { class, components, rank }
}

/// Recovers reflection data from a Cartan matrix of rank `n + 1` via a
/// truncated singular value decomposition `A = U W`: `alpha_i` is row `i` of
/// `U` and `b_j` is column `j` of `W`.
pub fn realize_point_from_cartan(
    a: &CartanMatrix,
    n: usize,
    tol: CartanTolerance,
    policy: RankPolicy,
) -> Result<VinbergPoint> {
    let conditions = check_vinberg_conditions(a, tol);
    if let Some(v) = conditions.violations.iter().find(|v| v.condition == Condition::SignPattern) {
        return Err(Error::SignPattern(v.pair.0, v.pair.1));
    }
    let w = n + 1;
    let rank = numerical_rank(a.entries(), policy);
    if rank.rank != w {
        return Err(Error::CartanRank { found: rank.rank, expected: w });
    }
    if let Some(c) = decompose_components(a, tol).into_iter().find(|c| c.sign == ComponentSign::Zero) {
        return Err(Error::ZeroTypeComponent(c.indices));
    }
    let svd = a.entries().clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let kept = &order[..w];
    let f = a.size();
    let alphas: Vec<DVector<f64>> = (0..f)
        .map(|i| DVector::from_iterator(w, kept.iter().map(|&k| u[(i, k)] * svd.singular_values[k].sqrt())))
        .collect();
    let vectors: Vec<DVector<f64>> = (0..f)
        .map(|j| DVector::from_iterator(w, kept.iter().map(|&k| v_t[(k, j)] * svd.singular_values[k].sqrt())))
        .collect();
    let point = VinbergPoint::new(alphas, vectors)?;
    let error = (point.cartan() - a.entries()).amax();
    if error > 1e-9 * a.entries().amax() {
        return Err(Error::InvalidRealization(format!("factorization error {error:e}")));
    }
    let membership = u_membership_parts(&point, |i, j| a.kind(i, j), policy);
    if !membership.passed() {
        return Err(Error::InvalidRealization(format!("point is outside the solution domain: {membership:?}")));
    }
    Ok(point)
}

#[cfg(test)]
mod tests;

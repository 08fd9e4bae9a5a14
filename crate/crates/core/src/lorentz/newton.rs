//! Gauss–Newton solution of the hyperbolic equations with Lorentz gauge fixing.
//!
//! The Lorentz group acts on solutions, so the equations never have isolated
//! zeros. We fix the action by rotating the normals of the facets at one vertex
//! into a standard frame: the first of them is a multiple of `e_n`, the second
//! lies in `span(e_{n-1}, e_n)`, and so on. This pins `n(n+1)/2` coordinates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{
    dot, lower, psi_jacobian_for, psi_pairs, psi_residual, validate_normals, vertex_flags, HyperbolicRealization,
    RealizationChecks,
};
use crate::error::{Error, Result};
use crate::linalg::{null_space, rows_matrix, RankPolicy};
use crate::orbifold::CoxeterOrbifold;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Required residual norm.
    pub tolerance: f64,
    pub checks: RealizationChecks,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iterations: 100, tolerance: 1e-10, checks: RealizationChecks::default() }
    }
}

/// Gauge slice used by the solver.
struct Frame {
    facets: Vec<usize>,
    /// Flags over the stacked coordinates: `true` when free.
    free: Vec<bool>,
}

impl Frame {
    fn new(q: &CoxeterOrbifold) -> Result<Frame> {
        let n = q.dim();
        let w = n + 1;
        let facets = q
            .polytope()
            .vertices()
            .and_then(|vs| vs.first().cloned())
            .ok_or(Error::MissingVertices)?;
        let mut free = vec![true; w * q.facet_count()];
        for (k, &facet) in facets.iter().enumerate() {
            for coord in 0..n - k {
                free[facet * w + coord] = false;
            }
        }
        Ok(Frame { facets, free })
    }

    /// Lorentz transformation moving `normals` into the slice.
    fn gauge(&self, normals: &[DVector<f64>]) -> Option<DMatrix<f64>> {
        let w = normals[0].len();
        let n = w - 1;
        let mut basis: Vec<DVector<f64>> = vec![DVector::zeros(w); w];
        for (k, &facet) in self.facets.iter().enumerate() {
            let mut u = normals[facet].clone();
            for prev in &basis[n - k + 1..] {
                u -= dot(&u, prev) * prev;
            }
            let len2 = dot(&u, &u);
            if len2 <= 1e-14 {
                return None;
            }
            basis[n - k] = u / len2.sqrt();
        }
        let rows: Vec<_> = basis[1..].iter().map(lower).collect();
        let kernel = null_space(&rows_matrix(&rows), RankPolicy::Relative(1e-10));
        if kernel.ncols() != 1 {
            return None;
        }
        let mut t: DVector<f64> = kernel.column(0).into();
        let len2 = dot(&t, &t);
        if len2 >= -1e-14 {
            return None;
        }
        t /= (-len2).sqrt();
        if t[0] < 0.0 {
            t = -t;
        }
        basis[0] = t;
        let basis_matrix = DMatrix::from_columns(&basis);
        let j = super::form(w);
        Some(&j * basis_matrix.transpose() * &j)
    }

    fn project(&self, normals: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
        let g = self.gauge(normals)?;
        let mut out: Vec<DVector<f64>> = normals.iter().map(|nu| &g * nu).collect();
        let w = out[0].len();
        for (slot, &free) in self.free.iter().enumerate() {
            if !free {
                out[slot / w][slot % w] = 0.0;
            }
        }
        Some(out)
    }
}

struct Solve {
    normals: Vec<DVector<f64>>,
    residual: f64,
    iterations: usize,
}

/// Damped Gauss–Newton iteration on the free coordinates.
fn gauss_newton(
    pairs: &[(usize, usize, f64)],
    frame: &Frame,
    start: Vec<DVector<f64>>,
    max_iterations: usize,
    tolerance: f64,
) -> Solve {
    let w = start[0].len();
    let free_cols: Vec<usize> = (0..frame.free.len()).filter(|&c| frame.free[c]).collect();
    let mut normals = start;
    let mut r = psi_residual(pairs, &normals);
    let mut norm = r.norm();
    let mut iterations = 0;
    // Iterate past the target tolerance so that rank decisions downstream see
    // a point accurate to roundoff.
    let polish = (tolerance * 1e-3).max(1e-14);
    while iterations < max_iterations && norm > polish {
        let jac = psi_jacobian_for(pairs, &normals);
        let reduced = DMatrix::from_fn(jac.nrows(), free_cols.len(), |i, k| jac[(i, free_cols[k])]);
        let svd = reduced.svd(true, true);
        let Ok(step) = svd.solve(&(-&r), 1e-12 * svd.singular_values.max()) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = normals.clone();
            for (k, &col) in free_cols.iter().enumerate() {
                trial[col / w][col % w] += t * step[k];
            }
            let trial_r = psi_residual(pairs, &trial);
            let trial_norm = trial_r.norm();
            if trial_norm < norm {
                normals = trial;
                r = trial_r;
                norm = trial_norm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    Solve { normals, residual: norm, iterations }
}

/// Solves the hyperbolic equations from `initial` by gauge-fixed
/// Gauss–Newton iteration, then validates the result.
pub fn solve_hyperbolic_newton(
    q: &CoxeterOrbifold,
    initial: &[DVector<f64>],
    options: NewtonOptions,
) -> Result<HyperbolicRealization> {
    let (f, w) = (q.facet_count(), q.dim() + 1);
    if initial.len() != f || initial.iter().any(|nu| nu.len() != w) {
        return Err(Error::Shape(format!("expected {f} vectors of length {w}")));
    }
    let frame = Frame::new(q)?;
    let start = frame
        .project(initial)
        .ok_or_else(|| Error::Divergence("initial frame normals are degenerate".into()))?;
    let pairs = psi_pairs(q);
    let solve = gauss_newton(&pairs, &frame, start, options.max_iterations, options.tolerance);
    if !(solve.residual < options.tolerance) {
        return Err(Error::Divergence(format!(
            "residual {:e} after {} iterations",
            solve.residual, solve.iterations
        )));
    }
    let vertex_flags = validate_normals(q, &solve.normals, options.checks)?;
    Ok(HyperbolicRealization {
        normals: solve.normals,
        residual: solve.residual,
        iterations: solve.iterations,
        vertex_flags,
    })
}

/// Deforms a seed polytope into the target orbifold.
///
/// The dihedral angles of `seed` are interpolated linearly towards the
/// prescribed angles `pi / n_ij`; each intermediate system is solved by
/// Gauss–Newton from the previous solution, with adaptive step length. Steps
/// that lose a vertex are retried with a shorter step.
pub fn realize_by_continuation(
    q: &CoxeterOrbifold,
    seed: &[DVector<f64>],
    options: NewtonOptions,
) -> Result<HyperbolicRealization> {
    let (f, w) = (q.facet_count(), q.dim() + 1);
    if seed.len() != f || seed.iter().any(|nu| nu.len() != w) {
        return Err(Error::Shape(format!("expected {f} vectors of length {w}")));
    }
    let mut normals: Vec<DVector<f64>> = Vec::with_capacity(f);
    for nu in seed {
        let len2 = dot(nu, nu);
        if len2 <= 0.0 {
            return Err(Error::InvalidRealization("seed normal is not spacelike".into()));
        }
        normals.push(nu / len2.sqrt());
    }
    if vertex_flags(q, &normals).iter().any(|flag| !flag.ok()) {
        return Err(Error::InvalidRealization("seed does not have the orbifold's combinatorics".into()));
    }
    let frame = Frame::new(q)?;
    normals = frame
        .project(&normals)
        .ok_or_else(|| Error::Divergence("seed frame normals are degenerate".into()))?;

    let target = psi_pairs(q);
    let start_angles: Vec<f64> = target
        .iter()
        .map(|&(i, j, _)| (-dot(&normals[i], &normals[j])).clamp(-1.0, 1.0).acos())
        .collect();
    let end_angles: Vec<f64> = target.iter().map(|&(_, _, c)| c.clamp(-1.0, 1.0).acos()).collect();
    let pairs_at = |t: f64| -> Vec<(usize, usize, f64)> {
        target
            .iter()
            .enumerate()
            .map(|(k, &(i, j, _))| (i, j, ((1.0 - t) * start_angles[k] + t * end_angles[k]).cos()))
            .collect()
    };

    let mut t: f64 = 0.0;
    let mut step: f64 = 0.25;
    let mut total_iterations = 0;
    while t < 1.0 {
        let next = (t + step).min(1.0);
        let solve = gauss_newton(&pairs_at(next), &frame, normals.clone(), 25, options.tolerance);
        total_iterations += solve.iterations;
        let valid = solve.residual < options.tolerance
            && vertex_flags(q, &solve.normals).iter().all(|flag| flag.ok());
        if valid {
            normals = solve.normals;
            t = next;
            step = (step * 1.5).min(0.5);
        } else {
            step *= 0.5;
            if step < 1e-6 {
                return Err(Error::Divergence(format!("continuation stalled at t = {t:.6}")));
            }
        }
    }
    let solve = gauss_newton(&target, &frame, normals, options.max_iterations, options.tolerance);
    total_iterations += solve.iterations;
    if !(solve.residual < options.tolerance) {
        return Err(Error::Divergence(format!("final residual {:e}", solve.residual)));
    }
    let vertex_flags = validate_normals(q, &solve.normals, options.checks)?;
    Ok(HyperbolicRealization {
        normals: solve.normals,
        residual: solve.residual,
        iterations: total_iterations,
        vertex_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{realize_simplex, tests::tetrahedron};

    #[test]
    fn exact_start_is_a_fixed_point() {
        let q = tetrahedron();
        let exact = realize_simplex(&q, RealizationChecks::default()).unwrap();
        let r = solve_hyperbolic_newton(&q, &exact.normals, NewtonOptions::default()).unwrap();
        assert!(r.iterations <= 1);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn gauge_lands_in_the_slice() {
        let q = tetrahedron();
        let exact = realize_simplex(&q, RealizationChecks::default()).unwrap();
        let frame = Frame::new(&q).unwrap();
        let g = frame.gauge(&exact.normals).unwrap();
        assert!(crate::lorentz::is_lorentz(&g, 1e-10));
        let moved: Vec<_> = exact.normals.iter().map(|nu| &g * nu).collect();
        for (slot, &free) in frame.free.iter().enumerate() {
            if !free {
                assert!(moved[slot / 4][slot % 4].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn perturbed_start_converges() {
        let q = tetrahedron();
        let exact = realize_simplex(&q, RealizationChecks::default()).unwrap();
        let start: Vec<_> = exact
            .normals
            .iter()
            .enumerate()
            .map(|(i, nu)| nu.map(|x| x * (1.0 + 0.01 * (i as f64 + 1.0))))
            .collect();
        let r = solve_hyperbolic_newton(&q, &start, NewtonOptions::default()).unwrap();
        assert!((r.gram() - exact.gram()).amax() < 1e-9);
    }

    #[test]
    fn far_start_reports_an_error() {
        let q = tetrahedron();
        let start: Vec<_> = (0..4)
            .map(|i| DVector::from_fn(4, |k, _| ((i * 5 + k * 11) as f64).sin() * 40.0))
            .collect();
        let options = NewtonOptions { max_iterations: 5, ..NewtonOptions::default() };
        assert!(solve_hyperbolic_newton(&q, &start, options).is_err());
    }
}

//! Two-parameter families of Cartan matrices and the zero set of their
//! determinant.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};

/// An independent closed form for the determinant: `det A(x, y) * weight(x, y)`
/// must equal `value(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct Reference {
    pub weight: fn(f64, f64) -> f64,
    pub value: fn(f64, f64) -> f64,
}

/// Cartan matrices `A(t)` that agree with `base` except at the parameter
/// slots: slot `k = (i, j)` sets `a_ij = -t_k` and `a_ji = -1 / t_k`.
#[derive(Clone, Debug)]
pub struct ParametrizedFamily {
    pub base: DMatrix<f64>,
    pub parameters: Vec<(usize, usize)>,
    pub reference: Option<Reference>,
}

impl ParametrizedFamily {
    pub fn evaluate(&self, t: &[f64]) -> Result<CartanMatrix> {
        if t.len() != self.parameters.len() {
            return Err(Error::Shape(format!("family takes {} parameters, got {}", self.parameters.len(), t.len())));
        }
        if t.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveScaling);
        }
        let mut m = self.base.clone();
        for (&(i, j), &x) in self.parameters.iter().zip(t) {
            m[(i, j)] = -x;
            m[(j, i)] = -1.0 / x;
        }
        CartanMatrix::new(m)
    }
}

/// `8x - (5+r)y - (6-2r)xy - (5+r)x^2 y + 8xy^2` with `r = sqrt 5`.
pub fn esselmann_quintic(x: f64, y: f64) -> f64 {
    let r = 5f64.sqrt();
    8.0 * x - (5.0 + r) * y - (6.0 - 2.0 * r) * x * y - (5.0 + r) * x * x * y + 8.0 * x * y * y
}

/// Gradient of [`esselmann_quintic`].
pub fn esselmann_quintic_gradient(x: f64, y: f64) -> (f64, f64) {
    let r = 5f64.sqrt();
    (
        8.0 - (6.0 - 2.0 * r) * y - 2.0 * (5.0 + r) * x * y + 8.0 * y * y,
        -(5.0 + r) - (6.0 - 2.0 * r) * x - (5.0 + r) * x * x + 16.0 * x * y,
    )
}

/// The Cartan matrices of the Esselmann orbifold after diagonal
/// normalization along the path `0-1-2-3-4-5`; the parameters are
/// `x = -a_03` and `y = -a_35`.
pub fn esselmann_family() -> ParametrizedFamily {
    let golden = -(1.0 + 5f64.sqrt()) / 2.0;
    let mut base = DMatrix::identity(6, 6) * 2.0;
    for (i, j, v) in [(0, 1, golden), (1, 2, golden), (4, 5, golden), (2, 3, -1.0), (3, 4, -1.0)] {
        base[(i, j)] = v;
        base[(j, i)] = v;
    }
    ParametrizedFamily {
        base,
        parameters: vec![(0, 3), (3, 5)],
        reference: Some(Reference { weight: |x, y| 2.0 * x * y, value: esselmann_quintic }),
    }
}

/// A rectangular sample grid with `nx x ny` points including the corners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Grid> {
        if nx < 2 || ny < 2 || !(x.0 < x.1) || !(y.0 < y.1) {
            return Err(Error::Shape("grid needs at least 2 points per axis and a non-empty box".into()));
        }
        Ok(Grid { x, y, nx, ny })
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x.0 + (self.x.1 - self.x.0) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y.0 + (self.y.1 - self.y.0) * j as f64 / (self.ny - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSamples {
    pub grid: Grid,
    /// `(x, y, det)` with `x` varying fastest.
    pub samples: Vec<[f64; 3]>,
    /// Polylines through the sign changes of the determinant.
    pub contour: Vec<Vec<[f64; 2]>>,
    /// Largest `|det * weight - value|` when the family has a reference.
    pub reference_deviation: Option<f64>,
}

impl CurveSamples {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,det\n");
        for [x, y, d] in &self.samples {
            out.push_str(&format!("{},{},{}\n", fmt12(*x), fmt12(*y), fmt12(*d)));
        }
        out
    }
}

/// Formats with 12 significant digits.
pub(crate) fn fmt12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

/// A crossing on a grid edge: the lower left grid point and whether the edge
/// runs along `x`.
type EdgeKey = (usize, usize, bool);

/// Samples `det A(x, y)` on `grid` and extracts its zero set by marching
/// squares.
pub fn family_curve(family: &ParametrizedFamily, grid: Grid) -> Result<CurveSamples> {
    if family.parameters.len() != 2 {
        return Err(Error::ParameterCount(family.parameters.len()));
    }
    let values: Vec<f64> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % grid.nx, k / grid.nx);
            family.evaluate(&[grid.x_at(i), grid.y_at(j)]).map(|a| a.entries().determinant())
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| values[j * grid.nx + i];
    let samples = (0..grid.nx * grid.ny)
        .map(|k| {
            let (i, j) = (k % grid.nx, k / grid.nx);
            [grid.x_at(i), grid.y_at(j), values[k]]
        })
        .collect::<Vec<_>>();
    let reference_deviation = family.reference.map(|r| {
        samples
            .iter()
            .map(|&[x, y, d]| (d * (r.weight)(x, y) - (r.value)(x, y)).abs())
            .fold(0.0, f64::max)
    });

    let crossing = |key: EdgeKey| -> [f64; 2] {
        let (i, j, along_x) = key;
        let (i2, j2) = if along_x { (i + 1, j) } else { (i, j + 1) };
        let (v1, v2) = (at(i, j), at(i2, j2));
        let t = v1 / (v1 - v2);
        let (x1, y1, x2, y2) = (grid.x_at(i), grid.y_at(j), grid.x_at(i2), grid.y_at(j2));
        [x1 + t * (x2 - x1), y1 + t * (y2 - y1)]
    };
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let positive = |a: usize, b: usize| at(a, b) >= 0.0;
            // Cell edges in counter-clockwise order: bottom, right, top, left.
            let edges: [(EdgeKey, bool, bool); 4] = [
                ((i, j, true), positive(i, j), positive(i + 1, j)),
                ((i + 1, j, false), positive(i + 1, j), positive(i + 1, j + 1)),
                ((i, j + 1, true), positive(i + 1, j + 1), positive(i, j + 1)),
                ((i, j, false), positive(i, j + 1), positive(i, j)),
            ];
            let cut: Vec<EdgeKey> = edges.iter().filter(|e| e.1 != e.2).map(|e| e.0).collect();
            match cut.len() {
                2 => segments.push((cut[0], cut[1])),
                4 => {
                    // Saddle: decide the pairing by the sign at the centre.
                    let centre = (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1)) / 4.0;
                    if (centre >= 0.0) == positive(i, j) {
                        segments.push((cut[0], cut[1]));
                        segments.push((cut[2], cut[3]));
                    } else {
                        segments.push((cut[0], cut[3]));
                        segments.push((cut[1], cut[2]));
                    }
                }
                _ => {}
            }
        }
    }
    let contour = chain(&segments).into_iter().map(|keys| keys.into_iter().map(crossing).collect()).collect();
    Ok(CurveSamples { grid, samples, contour, reference_deviation })
}

/// Joins segments sharing endpoints into maximal polylines.
fn chain(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: EdgeKey, first: usize, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut line = vec![start];
        let mut current = start;
        let mut next_segment = Some(first);
        while let Some(s) = next_segment {
            used[s] = true;
            let (a, b) = segments[s];
            current = if a == current { b } else { a };
            line.push(current);
            next_segment = incident[&current].iter().copied().find(|&t| !used[t]);
        }
        line
    };
    // Open polylines start at keys with a single segment, on the boundary.
    let mut ends: Vec<EdgeKey> = incident.iter().filter(|(_, v)| v.len() == 1).map(|(&k, _)| k).collect();
    ends.sort_unstable();
    for key in ends {
        let s = incident[&key][0];
        if !used[s] {
            out.push(walk(key, s, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(segments[s].0, s, &mut used));
        }
    }
    out
}

/// Number of local branches of `{g = 0}` through `centre`: half the number
/// of sign changes of `g` on a small circle.
pub fn branch_count(g: impl Fn(f64, f64) -> f64, centre: (f64, f64), radius: f64, samples: usize) -> usize {
    let values: Vec<f64> = (0..samples)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            g(centre.0 + radius * t.cos(), centre.1 + radius * t.sin())
        })
        .collect();
    let changes = (0..samples).filter(|&k| (values[k] >= 0.0) != (values[(k + 1) % samples] >= 0.0)).count();
    changes / 2
}

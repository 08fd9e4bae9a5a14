//! Starting configurations for the Newton solver.
//!
//! A seed is a Euclidean polytope `{x : n_k . x <= h_k}` with the required
//! combinatorics, scaled into the unit ball and read in the projective (Klein)
//! model, where Euclidean planes are hyperbolic planes. Facets appear in the
//! same order as in the matching generator of [`crate::polytope`].

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix3, Vector3};

/// The half-space `normal . x <= offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Plane {
    fn new(normal: [f64; 3], offset: f64) -> Plane {
        Plane { normal, offset }
    }

    fn tilted(azimuth: f64, elevation: f64, offset: f64) -> Plane {
        Plane::new(
            [azimuth.cos() * elevation.cos(), azimuth.sin() * elevation.cos(), elevation.sin()],
            offset,
        )
    }
}

/// Vertices of the polytope cut out by `planes`: every triple of planes whose
/// intersection point satisfies all other inequalities strictly, with the
/// point itself.
pub fn arrangement_vertices(planes: &[Plane]) -> Vec<(Vec<usize>, [f64; 3])> {
    let mut out = Vec::new();
    let k = planes.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let rows = [planes[a], planes[b], planes[c]];
                let m = Matrix3::from_fn(|i, j| rows[i].normal[j]);
                let Some(inv) = m.try_inverse() else { continue };
                let x = inv * Vector3::new(rows[0].offset, rows[1].offset, rows[2].offset);
                let inside = (0..k).filter(|&d| d != a && d != b && d != c).all(|d| {
                    let p = &planes[d];
                    Vector3::from(p.normal).dot(&x) < p.offset - 1e-9
                });
                if inside {
                    out.push((vec![a, b, c], [x[0], x[1], x[2]]));
                }
            }
        }
    }
    out
}

/// Scales the polytope so that its farthest vertex is at Euclidean distance
/// `radius` from the origin, then converts each plane to a unit spacelike
/// normal pointing into the polytope.
pub fn klein_normals(planes: &[Plane], radius: f64) -> Vec<DVector<f64>> {
    let far = arrangement_vertices(planes)
        .iter()
        .map(|(_, x)| Vector3::from(*x).norm())
        .fold(0.0, f64::max);
    let scale = radius / far;
    planes
        .iter()
        .map(|p| {
            let h = p.offset * scale;
            let n = Vector3::from(p.normal);
            let len = (n.norm_squared() - h * h).sqrt();
            DVector::from_vec(vec![-h / len, -n[0] / len, -n[1] / len, -n[2] / len])
        })
        .collect()
}

/// Prism over an `m`-gon: sides, bottom, top.
pub fn prism_planes(m: usize) -> Vec<Plane> {
    let mut planes: Vec<Plane> = (0..m)
        .map(|i| Plane::tilted(2.0 * PI * (i as f64 + 0.5) / m as f64, 0.0, 1.0))
        .collect();
    planes.push(Plane::new([0.0, 0.0, -1.0], 1.0));
    planes.push(Plane::new([0.0, 0.0, 1.0], 1.0));
    planes
}

/// Löbell polytope `L(m)`: top, upper ring, lower ring, bottom. For `m = 5`
/// this is the regular dodecahedron.
pub fn loebell_planes(m: usize) -> Vec<Plane> {
    let tilt = 0.5f64.atan();
    let step = 2.0 * PI / m as f64;
    let mut planes = vec![Plane::new([0.0, 0.0, 1.0], 1.0)];
    planes.extend((0..m).map(|k| Plane::tilted(step * k as f64, tilt, 1.0)));
    planes.extend((0..m).map(|k| Plane::tilted(step * (k as f64 - 0.5), -tilt, 1.0)));
    planes.push(Plane::new([0.0, 0.0, -1.0], 1.0));
    planes
}

/// The mirror double of a thrice-truncated tetrahedron: upper pentagons,
/// lower pentagons, then the vertical quadrilaterals.
pub fn mirror_double_planes() -> Vec<Plane> {
    let tilt = PI / 4.0;
    let third = 2.0 * PI / 3.0;
    let mut planes: Vec<Plane> = (0..3).map(|k| Plane::tilted(third * k as f64 + PI / 3.0, tilt, 1.0)).collect();
    planes.extend((0..3).map(|k| Plane::tilted(third * k as f64 + PI / 3.0, -tilt, 1.0)));
    planes.extend((0..3).map(|k| Plane::tilted(third * k as f64, 0.0, 2.0)));
    planes
}

/// Default scaling used for bundled seeds.
pub const SEED_RADIUS: f64 = 0.8;

/// Names accepted by [`named`].
pub const SEED_NAMES: &[&str] = &[
    "prism3", "prism4", "prism5", "prism6", "prism7", "prism8", "cube", "dodecahedron", "loebell5", "loebell6",
    "loebell7", "loebell8", "mirror_double",
];

/// A bundled seed by name: `prism<m>`, `cube`, `loebell<m>`, `dodecahedron`
/// or `mirror_double`.
pub fn named(name: &str) -> Option<Vec<Plane>> {
    let numbered = |prefix: &str| name.strip_prefix(prefix).and_then(|m| m.parse::<usize>().ok());
    match name {
        "cube" => Some(prism_planes(4)),
        "dodecahedron" => Some(loebell_planes(5)),
        "mirror_double" => Some(mirror_double_planes()),
        _ => {
            if let Some(m) = numbered("prism").filter(|m| (3..=8).contains(m)) {
                Some(prism_planes(m))
            } else {
                numbered("loebell").filter(|m| (5..=8).contains(m)).map(loebell_planes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{dot, vertex_flags};
    use crate::orbifold::CoxeterOrbifold;
    use crate::polytope::{loebell, mirror_double, prism, Polytope};

    fn same_combinatorics(planes: &[Plane], p: &Polytope) -> bool {
        let mut found: Vec<Vec<usize>> = arrangement_vertices(planes).into_iter().map(|(v, _)| v).collect();
        found.sort();
        let mut expected = p.vertices().unwrap().to_vec();
        expected.sort();
        found == expected
    }

    #[test]
    fn seed_planes_match_generators() {
        for m in 3..=8 {
            assert!(same_combinatorics(&prism_planes(m), &prism(m)), "prism {m}");
        }
        for m in 5..=8 {
            assert!(same_combinatorics(&loebell_planes(m), &loebell(m)), "Löbell {m}");
        }
        assert!(same_combinatorics(&mirror_double_planes(), &mirror_double()));
    }

    #[test]
    fn every_listed_name_resolves() {
        for name in SEED_NAMES {
            assert!(named(name).is_some(), "{name}");
        }
        assert!(named("prism9").is_none());
        assert!(named("loebell4").is_none());
    }

    #[test]
    fn klein_normals_are_inward_and_compact() {
        let planes = loebell_planes(6);
        let normals = klein_normals(&planes, SEED_RADIUS);
        for nu in &normals {
            assert!((dot(nu, nu) - 1.0).abs() < 1e-12);
        }
        let q = CoxeterOrbifold::with_orders(loebell(6), |_, _| 2).unwrap();
        assert!(vertex_flags(&q, &normals).iter().all(|f| f.ok()));
    }
}

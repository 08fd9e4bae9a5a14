//! Generators for the polytopes used throughout the crate.

use std::collections::BTreeSet;

use super::{ridge, Polytope};

/// Builds a polytope whose ridges are exactly the facet pairs sharing a vertex.
fn from_vertices(dim: usize, facet_count: usize, vertices: Vec<Vec<usize>>) -> Polytope {
    let mut ridges = BTreeSet::new();
    for v in &vertices {
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                ridges.insert(ridge(v[a], v[b]));
            }
        }
    }
    Polytope::from_incidences(dim, facet_count, ridges, Some(vertices))
        .expect("built-in polytope is valid")
}

/// The `n`-simplex: `n + 1` facets, vertex `k` opposite facet `k`.
pub fn simplex(n: usize) -> Polytope {
    let vertices = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    from_vertices(n, n + 1, vertices)
}

/// The prism over an `m`-gon. Facets `0..m` are the sides (side `i` meets side
/// `i + 1`), facet `m` is the bottom and facet `m + 1` the top.
pub fn prism(m: usize) -> Polytope {
    assert!(m >= 3, "prism needs at least a triangle");
    let mut vertices = Vec::with_capacity(2 * m);
    for cap in [m, m + 1] {
        for i in 0..m {
            vertices.push(vec![i, (i + 1) % m, cap]);
        }
    }
    from_vertices(3, m + 2, vertices)
}

/// The combinatorial cube, as the prism over a square.
pub fn cube() -> Polytope {
    prism(4)
}

/// The Löbell polytope `L(m)`: two `m`-gons (facets `0` and `2m + 1`) joined by
/// two rings of `m` pentagons. Upper pentagons are facets `1..=m`, lower
/// pentagons `m + 1..=2m`.
pub fn loebell(m: usize) -> Polytope {
    assert!(m >= 3, "Löbell polytope needs m >= 3");
    let top = 0;
    let upper = |k: usize| 1 + k % m;
    let lower = |k: usize| 1 + m + k % m;
    let bottom = 2 * m + 1;
    let mut vertices = Vec::with_capacity(4 * m);
    for k in 0..m {
        vertices.push(vec![top, upper(k), upper(k + 1)]);
        vertices.push(vec![upper(k), upper(k + 1), lower(k + 1)]);
        vertices.push(vec![upper(k), lower(k), lower(k + 1)]);
        vertices.push(vec![lower(k), lower(k + 1), bottom]);
    }
    from_vertices(3, 2 * m + 2, vertices)
}

/// The dodecahedron, which is `L(5)`.
pub fn dodecahedron() -> Polytope {
    loebell(5)
}

/// The product of two triangles, a 4-polytope with 6 facets: facets `0..3`
/// come from the first factor and `3..6` from the second. Every vertex is two
/// facets from each group.
pub fn esselmann_polytope() -> Polytope {
    let mut vertices = Vec::with_capacity(9);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        for (c, d) in [(3, 4), (3, 5), (4, 5)] {
            vertices.push(vec![a, b, c, d]);
        }
    }
    from_vertices(4, 6, vertices)
}

/// The double of a tetrahedron truncated at three vertices, glued to its
/// mirror image along the hexagonal face.
///
/// Facets `0..3` are the upper pentagons, `3..6` their mirror images, and
/// `6..9` the quadrilaterals formed by merging each truncation triangle with
/// its mirror. Pentagon `k` meets its mirror `k + 3` along an edge; these
/// three edges are the only ones that do not lie on a quadrilateral.
pub fn mirror_double() -> Polytope {
    let up = |k: usize| k % 3;
    let down = |k: usize| 3 + k % 3;
    let quad = |k: usize| 6 + k % 3;
    let mut vertices = vec![vec![0, 1, 2], vec![3, 4, 5]];
    for k in 0..3 {
        let prev = k + 2;
        vertices.push(vec![quad(k), up(prev), up(k)]);
        vertices.push(vec![quad(k), down(prev), down(k)]);
        vertices.push(vec![quad(k), up(prev), down(prev)]);
        vertices.push(vec![quad(k), up(k), down(k)]);
    }
    from_vertices(3, 9, vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_ok(p: &Polytope) -> bool {
        let v = p.vertex_count().unwrap() as i64;
        let e = p.ridge_count() as i64;
        let f = p.facet_count() as i64;
        v - e + f == 2 && 2 * e == 3 * v
    }

    #[test]
    fn generated_three_polytopes_satisfy_euler() {
        let mut all = vec![simplex(3), cube(), dodecahedron(), mirror_double()];
        all.extend((3..=8).map(prism));
        all.extend((5..=8).map(loebell));
        for p in &all {
            assert!(euler_ok(p));
            assert_eq!(p.delta(), 0);
        }
    }

    #[test]
    fn loebell_faces() {
        for m in 5..=8 {
            let p = loebell(m);
            assert_eq!(p.facet_count(), 2 * m + 2);
            assert_eq!(p.neighbors(0).len(), m);
            assert_eq!(p.neighbors(2 * m + 1).len(), m);
            for k in 1..=2 * m {
                assert_eq!(p.neighbors(k).len(), 5);
            }
        }
    }

    #[test]
    fn mirror_double_counts() {
        let p = mirror_double();
        assert_eq!(p.facet_count(), 9);
        assert_eq!(p.ridge_count(), 21);
        assert_eq!(p.vertex_count(), Some(14));
        for k in 0..3 {
            assert!(p.is_ridge(k, k + 3));
            assert_eq!(p.neighbors(k).len(), 5);
            assert_eq!(p.neighbors(6 + k).len(), 4);
        }
    }
}

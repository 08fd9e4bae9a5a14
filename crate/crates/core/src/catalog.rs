//! Named orbifolds used by the examples, tests and command line.

use crate::error::Result;
use crate::matchstats::{find_factor, orbifold_from_factor, CubicGraph};
use crate::orbifold::CoxeterOrbifold;
use crate::polytope::{cube, esselmann_polytope, loebell, mirror_double, simplex};

/// A bundled orbifold with the seed used to realize it, if one is needed.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    pub orbifold: CoxeterOrbifold,
    pub seed: Option<&'static str>,
}

/// Names of all bundled orbifolds.
pub const NAMES: &[&str] = &[
    "tetrahedron",
    "esselmann",
    "mirror_double",
    "cube_a",
    "cube_b",
    "cube_c",
    "dodecahedron",
    "loebell5",
    "loebell6",
    "loebell7",
    "loebell8",
];

/// The tetrahedron with orders 3, 5, 3 along the path `0-1-2-3` and right
/// angles elsewhere.
pub fn tetrahedron() -> CoxeterOrbifold {
    CoxeterOrbifold::with_orders(simplex(3), |i, j| match (i, j) {
        (0, 1) | (2, 3) => 3,
        (1, 2) => 5,
        _ => 2,
    })
    .expect("valid orders")
}

/// The product of two triangles with the orders of the Esselmann group.
pub fn esselmann() -> CoxeterOrbifold {
    CoxeterOrbifold::with_orders(esselmann_polytope(), |i, j| match (i, j) {
        (0, 1) | (1, 2) | (4, 5) => 5,
        (2, 3) | (3, 4) | (0, 3) | (3, 5) => 3,
        _ => 2,
    })
    .expect("valid orders")
}

/// The mirror double with order `d` on the three edges joining a pentagon to
/// its mirror image and right angles elsewhere.
pub fn mirror_double_orbifold(d: u32) -> Result<CoxeterOrbifold> {
    CoxeterOrbifold::with_orders(mirror_double(), |i, j| if j == i + 3 && i < 3 { d } else { 2 })
}

/// Cube orbifolds. Lateral faces are `0..4`, the bottom `4` and the top `5`.
pub fn cube_pattern(pattern: char) -> Option<CoxeterOrbifold> {
    let orders: fn(usize, usize) -> u32 = match pattern {
        'a' => |i, j| match (i, j) {
            (0, 1) => 3,
            (2, 4) => 4,
            (3, 5) => 5,
            _ => 2,
        },
        'b' => |i, j| match (i, j) {
            (0, 1) | (2, 4) | (2, 5) | (0, 3) => 2,
            _ => 3,
        },
        'c' => |i, j| match (i, j) {
            (0, 1) => 4,
            (2, 3) | (0, 4) => 3,
            (3, 5) => 5,
            _ => 2,
        },
        _ => return None,
    };
    Some(CoxeterOrbifold::with_orders(cube(), orders).expect("valid orders"))
}

/// `L(m)` with order `k` on the perfect matching through the first skeleton
/// edge and right angles elsewhere.
pub fn loebell_factor(m: usize, k: u32) -> Result<CoxeterOrbifold> {
    let p = loebell(m);
    let graph = CubicGraph::from_polytope(&p)?;
    let factor = find_factor(&graph, 0)?;
    orbifold_from_factor(&p, &factor, k)
}

/// Looks up a bundled orbifold.
pub fn get(name: &str) -> Option<Entry> {
    let entry = |name, summary, orbifold, seed| Some(Entry { name, summary, orbifold, seed });
    match name {
        "tetrahedron" => entry("tetrahedron", "tetrahedron with orders 3, 5, 3 on a path", tetrahedron(), None),
        "esselmann" => entry("esselmann", "Esselmann 4-orbifold on the product of two triangles", esselmann(), None),
        "mirror_double" => entry(
            "mirror_double",
            "mirror double of a thrice-truncated tetrahedron, order 4 on the three mirror edges",
            mirror_double_orbifold(4).ok()?,
            Some("mirror_double"),
        ),
        "cube_a" => entry("cube_a", "cube with orders 3, 4, 5 on three disjoint edges", cube_pattern('a')?, Some("cube")),
        "cube_b" => entry("cube_b", "cube with right angles on a perfect matching, 3 elsewhere", cube_pattern('b')?, Some("cube")),
        "cube_c" => entry("cube_c", "cube with four non-right edges", cube_pattern('c')?, Some("cube")),
        "dodecahedron" => entry(
            "dodecahedron",
            "dodecahedron with order 5 on a perfect matching",
            loebell_factor(5, 5).ok()?,
            Some("dodecahedron"),
        ),
        "loebell5" => loebell_entry("loebell5", 5),
        "loebell6" => loebell_entry("loebell6", 6),
        "loebell7" => loebell_entry("loebell7", 7),
        "loebell8" => loebell_entry("loebell8", 8),
        _ => None,
    }
}

fn loebell_entry(name: &'static str, m: usize) -> Option<Entry> {
    Some(Entry {
        name,
        summary: "Löbell polytope with order 3 on a perfect matching",
        orbifold: loebell_factor(m, 3).ok()?,
        seed: Some(name),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_with_a_known_seed() {
        for name in NAMES {
            let entry = get(name).unwrap_or_else(|| panic!("{name}"));
            assert_eq!(entry.name, *name);
            if let Some(seed) = entry.seed {
                let planes = crate::lorentz::seeds::named(seed).unwrap();
                assert_eq!(planes.len(), entry.orbifold.facet_count());
            }
        }
        assert!(get("loebell9").is_none());
        assert!(get("cube_d").is_none());
    }

    #[test]
    fn cube_patterns_have_the_expected_counts() {
        let e_plus: Vec<usize> = ['a', 'b', 'c'].iter().map(|&c| cube_pattern(c).unwrap().counts().e_plus).collect();
        assert_eq!(e_plus, vec![3, 8, 4]);
        for c in ['a', 'b', 'c'] {
            let q = cube_pattern(c).unwrap();
            assert!(q.andreev_necessary_check().unwrap().passed(), "{c}");
        }
    }

    #[test]
    fn mirror_double_orders() {
        let q = mirror_double_orbifold(4).unwrap();
        assert_eq!(q.counts().e_plus, 3);
        assert!(q.andreev_necessary_check().unwrap().passed());
    }
}

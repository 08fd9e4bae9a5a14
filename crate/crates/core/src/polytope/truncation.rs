//! Recognition of truncation polytopes.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::{ridge, Polytope};

/// How a truncation verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognitionMethod {
    /// Backtracking search for a sequence of reverse truncations (dimension 3).
    CombinatorialRecognition,
    /// The criterion `delta == 0` (dimension at least 4).
    DeltaCriterion,
}

/// One truncation: `facet` is created by cutting the vertex whose facets are
/// `vertex`. Ids refer to the final polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationStep {
    pub facet: usize,
    pub vertex: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationVerdict {
    pub is_truncation: bool,
    pub method: RecognitionMethod,
    /// Truncations leading from a simplex to the polytope, in order. Only
    /// present for positive combinatorial recognitions.
    pub history: Option<Vec<TruncationStep>>,
}

pub(super) fn recognise(p: &Polytope) -> TruncationVerdict {
    if p.dim() != 3 {
        return TruncationVerdict {
            is_truncation: p.delta() == 0,
            method: RecognitionMethod::DeltaCriterion,
            history: None,
        };
    }
    let vertices: BTreeSet<Vec<usize>> = p
        .vertices()
        .expect("3-polytopes always carry vertices")
        .iter()
        .cloned()
        .collect();
    let mut failed = HashSet::new();
    let history = search(vertices, &mut failed);
    TruncationVerdict {
        is_truncation: history.is_some(),
        method: RecognitionMethod::CombinatorialRecognition,
        history,
    }
}

fn search(
    vertices: BTreeSet<Vec<usize>>,
    failed: &mut HashSet<BTreeSet<Vec<usize>>>,
) -> Option<Vec<TruncationStep>> {
    let alive: BTreeSet<usize> = vertices.iter().flatten().copied().collect();
    if alive.len() == 4 {
        return (vertices.len() == 4).then(Vec::new);
    }
    if failed.contains(&vertices) {
        return None;
    }
    for &t in &alive {
        let around: BTreeSet<usize> = vertices
            .iter()
            .filter(|v| v.contains(&t))
            .flatten()
            .copied()
            .filter(|&x| x != t)
            .collect();
        if around.len() != 3 {
            continue;
        }
        let apex: Vec<usize> = around.into_iter().collect();
        if vertices.contains(&apex) {
            continue;
        }
        let mut smaller: BTreeSet<Vec<usize>> =
            vertices.iter().filter(|v| !v.contains(&t)).cloned().collect();
        smaller.insert(apex.clone());
        if !is_valid_surface(&smaller) {
            continue;
        }
        if let Some(mut history) = search(smaller, failed) {
            history.push(TruncationStep { facet: t, vertex: apex });
            return Some(history);
        }
    }
    failed.insert(vertices);
    None
}

/// Whether the vertex sets (in arbitrary facet ids) describe a valid simple
/// 3-polytope.
fn is_valid_surface(vertices: &BTreeSet<Vec<usize>>) -> bool {
    let ids: Vec<usize> = vertices
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let relabel = |x: usize| ids.binary_search(&x).expect("id present");
    let relabelled: Vec<Vec<usize>> = vertices
        .iter()
        .map(|v| v.iter().map(|&x| relabel(x)).collect())
        .collect();
    let mut ridges = BTreeSet::new();
    for v in &relabelled {
        for a in 0..3 {
            for b in a + 1..3 {
                ridges.insert(ridge(v[a], v[b]));
            }
        }
    }
    Polytope::from_incidences(3, ids.len(), ridges, Some(relabelled)).is_ok()
}

#[cfg(test)]
mod tests {
    use crate::polytope::{cube, dodecahedron, esselmann_polytope, prism, simplex};

    #[test]
    fn simplex_is_a_truncation_polytope_with_empty_history() {
        let v = simplex(3).is_truncation_polytope();
        assert!(v.is_truncation);
        assert_eq!(v.history, Some(vec![]));
    }

    #[test]
    fn triangular_prism_is_one_truncation() {
        let v = prism(3).is_truncation_polytope();
        assert!(v.is_truncation);
        assert_eq!(v.history.unwrap().len(), 1);
    }

    #[test]
    fn cube_and_dodecahedron_are_not() {
        assert!(!cube().is_truncation_polytope().is_truncation);
        assert!(!dodecahedron().is_truncation_polytope().is_truncation);
    }

    #[test]
    fn higher_dimensions_use_delta() {
        let v = esselmann_polytope().is_truncation_polytope();
        assert!(!v.is_truncation);
        assert_eq!(v.method, super::RecognitionMethod::DeltaCriterion);
        assert!(simplex(4).truncate_vertex(0).unwrap().is_truncation_polytope().is_truncation);
    }

    #[test]
    fn history_replays_to_the_polytope() {
        let p = simplex(3)
            .truncate_vertex(0)
            .unwrap()
            .truncate_vertex(3)
            .unwrap()
            .truncate_vertex(1)
            .unwrap();
        let history = p.is_truncation_polytope().history.unwrap();
        assert_eq!(history.len(), 3);
        // Every recorded step creates a triangle adjacent to exactly the cut
        // vertex's facets.
        for step in &history {
            assert_eq!(step.vertex.len(), 3);
            assert!(!step.vertex.contains(&step.facet));
        }
    }
}

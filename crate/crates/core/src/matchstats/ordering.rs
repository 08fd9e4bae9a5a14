//! Constructive weak orderings of the faces of a labeled cubic graph.
//!
//! Edges carry labels in `{0, 1}` such that the labels at every vertex sum
//! to an odd number. The faces are ordered so that each face shares at most
//! three zero-labeled edges with faces that come after it.

use super::CubicGraph;
use crate::error::{Error, Result};

/// Labels must be 0 or 1 and sum to an odd number at every vertex.
pub fn check_labels(g: &CubicGraph, labels: &[u8]) -> Result<()> {
    if labels.len() != g.edge_count() {
        return Err(Error::Shape(format!("{} labels for {} edges", labels.len(), g.edge_count())));
    }
    if let Some(x) = labels.iter().position(|&l| l > 1) {
        return Err(Error::GraphPrecondition(format!("edge {x} has label {}", labels[x])));
    }
    for v in 0..g.vertex_count() {
        let sum: u32 = g.incident_edges(v).iter().map(|&x| labels[x] as u32).sum();
        if sum % 2 == 0 {
            return Err(Error::GraphPrecondition(format!("labels at vertex {v} sum to {sum}")));
        }
    }
    Ok(())
}

fn zero_count(g: &CubicGraph, labels: &[u8], position: usize) -> usize {
    g.face_edges(position).iter().filter(|&&x| labels[x] == 0).count()
}

/// Orders the face identifiers of `g` so that every face has at most three
/// zero-labeled edges shared with later faces.
///
/// The construction repeatedly takes the lowest-id face with at most three
/// zero edges, flips the labels on its boundary if needed so that a
/// removable edge carries label 1, deletes that edge, and recurses on the
/// smaller graph, where the merged face keeps the identifier of the other
/// face at the deleted edge.
pub fn construct_weak_order(g: &CubicGraph, labels: &[u8]) -> Result<Vec<usize>> {
    check_labels(g, labels)?;
    let mut order = Vec::with_capacity(g.face_count());
    let mut graph = g.clone();
    let mut labels = labels.to_vec();
    while graph.edge_count() > 6 {
        let mut positions: Vec<usize> = (0..graph.face_count()).collect();
        positions.sort_by_key(|&p| graph.face_ids()[p]);
        let first = positions
            .into_iter()
            .find(|&p| zero_count(&graph, &labels, p) <= 3)
            .ok_or_else(|| Error::GraphPrecondition("no face has at most three zero edges".into()))?;
        let removable = graph.removable_edges(first)?;
        let x = removable[0];
        if labels[x] == 0 {
            for y in graph.face_edges(first) {
                labels[y] ^= 1;
            }
        }
        let (a, b) = graph.edge_faces(x);
        let other = if a == first { b } else { a };
        let deletion = graph.delete_edge(x, other).expect("edge was reported removable");
        let mut next = vec![u8::MAX; deletion.graph.edge_count()];
        for (old, new) in deletion.edge_map.iter().enumerate() {
            if let Some(new) = *new {
                debug_assert!(next[new] == u8::MAX || next[new] == labels[old]);
                next[new] = labels[old];
            }
        }
        order.push(graph.face_ids()[first]);
        graph = deletion.graph;
        labels = next;
    }
    let mut rest = graph.face_ids();
    rest.sort_unstable();
    order.extend(rest);
    Ok(order)
}

/// Checks an ordering against the original labels: it must list every face
/// once, and each face may share at most three zero edges with later faces.
pub fn is_valid_weak_order(g: &CubicGraph, labels: &[u8], order: &[usize]) -> bool {
    let mut rank = vec![usize::MAX; g.face_count()];
    for (k, &id) in order.iter().enumerate() {
        match g.face_position(id) {
            Some(p) if rank[p] == usize::MAX => rank[p] = k,
            _ => return false,
        }
    }
    if rank.contains(&usize::MAX) {
        return false;
    }
    (0..g.face_count()).all(|p| {
        g.face_edges(p)
            .into_iter()
            .filter(|&x| {
                let (a, b) = g.edge_faces(x);
                let other = if a == p { b } else { a };
                labels[x] == 0 && rank[other] > rank[p]
            })
            .count()
            <= 3
    })
}

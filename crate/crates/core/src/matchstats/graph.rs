//! Cubic planar graphs with an embedding given by oriented face cycles.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{is_three_connected, Polytope};

/// A simple, planar, 3-connected cubic graph with its faces.
///
/// Faces are oriented vertex cycles such that the two faces at an edge
/// traverse it in opposite directions. Every face carries an identifier that
/// survives edge deletions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicGraph {
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    faces: Vec<(usize, Vec<usize>)>,
}

/// Where each old edge went after an edge deletion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub graph: CubicGraph,
    /// `edge_map[x]` is the new index of old edge `x`, `None` for the deleted
    /// edge. The two edges at each endpoint of the deleted edge share a new
    /// index.
    pub edge_map: Vec<Option<usize>>,
}

impl CubicGraph {
    /// Builds and validates a graph. `edges` may list endpoints in either
    /// order; `faces` are `(id, cycle)` pairs.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, faces: Vec<(usize, Vec<usize>)>) -> Result<CubicGraph> {
        let edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if b >= vertex_count {
                return Err(Error::GraphPrecondition(format!("edge ({a}, {b}) names a missing vertex")));
            }
            if a == b || !seen.insert((a, b)) {
                return Err(Error::GraphPrecondition(format!("edge ({a}, {b}) is a loop or a repeat")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = CubicGraph { edges, adjacency, faces };
        graph.check()?;
        Ok(graph)
    }

    /// The 1-skeleton of a 3-polytope. Edge `k` is dual to ridge `k` and face
    /// `i` is facet `i`.
    pub fn from_polytope(p: &Polytope) -> Result<CubicGraph> {
        let edges = p.skeleton_edges()?;
        let v = p.vertex_count().ok_or(Error::MissingVertices)?;
        let faces = (0..p.facet_count())
            .map(|i| p.face_cycle(i).map(|c| (i, c.to_vec())).ok_or(Error::MissingVertices))
            .collect::<Result<Vec<_>>>()?;
        CubicGraph::new(v, edges, faces)
    }

    fn check(&self) -> Result<()> {
        if let Some(v) = self.adjacency.iter().position(|a| a.len() != 3) {
            return Err(Error::GraphPrecondition(format!("vertex {v} has degree {}", self.adjacency[v].len())));
        }
        // Each edge is traversed once in each direction by the faces.
        let mut darts: HashMap<(usize, usize), usize> = HashMap::new();
        for (_, cycle) in &self.faces {
            for k in 0..cycle.len() {
                let dart = (cycle[k], cycle[(k + 1) % cycle.len()]);
                if self.edge_index(dart.0, dart.1).is_none() {
                    return Err(Error::GraphPrecondition(format!("face step {dart:?} is not an edge")));
                }
                *darts.entry(dart).or_default() += 1;
            }
        }
        for &(a, b) in &self.edges {
            if darts.get(&(a, b)) != Some(&1) || darts.get(&(b, a)) != Some(&1) {
                return Err(Error::GraphPrecondition(format!("edge ({a}, {b}) is not bordered by two faces")));
            }
        }
        let (v, e, f) = (self.vertex_count() as i64, self.edges.len() as i64, self.faces.len() as i64);
        if v - e + f != 2 {
            return Err(Error::GraphPrecondition("faces do not form a sphere".into()));
        }
        if !is_three_connected(&self.adjacency) {
            return Err(Error::NotThreeConnected);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&x| x == key)
    }

    /// Edges at a vertex.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        self.adjacency[v].iter().map(|&w| self.edge_index(v, w).expect("adjacent")).collect()
    }

    /// Face identifiers in storage order.
    pub fn face_ids(&self) -> Vec<usize> {
        self.faces.iter().map(|(id, _)| *id).collect()
    }

    /// Storage position of the face with identifier `id`.
    pub fn face_position(&self, id: usize) -> Option<usize> {
        self.faces.iter().position(|(x, _)| *x == id)
    }

    pub fn face_cycle(&self, position: usize) -> &[usize] {
        &self.faces[position].1
    }

    /// Edges around a face, in cycle order.
    pub fn face_edges(&self, position: usize) -> Vec<usize> {
        let cycle = &self.faces[position].1;
        (0..cycle.len())
            .map(|k| self.edge_index(cycle[k], cycle[(k + 1) % cycle.len()]).expect("face edge"))
            .collect()
    }

    /// Storage positions of the two faces at edge `x`.
    pub fn edge_faces(&self, x: usize) -> (usize, usize) {
        let (a, b) = self.edges[x];
        let find = |from: usize, to: usize| {
            self.faces
                .iter()
                .position(|(_, c)| (0..c.len()).any(|k| c[k] == from && c[(k + 1) % c.len()] == to))
                .expect("every dart lies on a face")
        };
        (find(a, b), find(b, a))
    }

    /// Deletes edge `x` and smooths its endpoints. The two faces at `x` merge
    /// into one, which keeps the identifier of the face at position `keep`.
    /// Returns `None` when the result is not simple, cubic and 3-connected.
    pub fn delete_edge(&self, x: usize, keep: usize) -> Option<Deletion> {
        let (u, v) = self.edges[x];
        // `forward` has the dart u -> v, `backward` the dart v -> u.
        let (forward, backward) = self.edge_faces(x);
        let rotate_to = |cycle: &[usize], start: usize| -> Vec<usize> {
            let at = cycle.iter().position(|&y| y == start).expect("on face");
            cycle[at..].iter().chain(&cycle[..at]).copied().collect()
        };
        let f_path = rotate_to(&self.faces[forward].1, v); // v, f1.., fk, u
        let g_path = rotate_to(&self.faces[backward].1, u); // u, g1.., gl, v
        let f_inner = &f_path[1..f_path.len() - 1];
        let g_inner = &g_path[1..g_path.len() - 1];
        if f_inner.is_empty() || g_inner.is_empty() {
            return None;
        }
        let (fk, f1) = (*f_inner.last()?, f_inner[0]);
        let (g1, gl) = (g_inner[0], *g_inner.last()?);
        let merged_at_u = (fk.min(g1), fk.max(g1));
        let merged_at_v = (gl.min(f1), gl.max(f1));
        if fk == g1 || gl == f1 || merged_at_u == merged_at_v {
            return None;
        }
        if self.edge_index(fk, g1).is_some() || self.edge_index(gl, f1).is_some() {
            return None;
        }

        let renumber: Vec<Option<usize>> = {
            let mut next = 0;
            (0..self.vertex_count())
                .map(|y| {
                    (y != u && y != v).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let map = |y: usize| renumber[y].expect("kept vertex");
        let mut new_edges = Vec::with_capacity(self.edges.len() - 3);
        let mut edge_map = vec![None; self.edges.len()];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if a == u || a == v || b == u || b == v {
                continue;
            }
            edge_map[k] = Some(new_edges.len());
            new_edges.push((map(a), map(b)));
        }
        for ((p, q), ends) in [((fk, g1), [fk, g1]), ((gl, f1), [gl, f1])] {
            let index = new_edges.len();
            new_edges.push((map(p), map(q)));
            let hub = if ends == [fk, g1] { u } else { v };
            for end in ends {
                edge_map[self.edge_index(hub, end).expect("edge at hub")] = Some(index);
            }
        }

        let keep_id = self.faces[keep].0;
        let mut new_faces = Vec::with_capacity(self.faces.len() - 1);
        for (position, (id, cycle)) in self.faces.iter().enumerate() {
            if position == backward {
                continue;
            }
            if position == forward {
                let merged = f_inner.iter().chain(g_inner).map(|&y| map(y)).collect();
                new_faces.push((keep_id, merged));
            } else {
                new_faces.push((*id, cycle.iter().filter(|&&y| y != u && y != v).map(|&y| map(y)).collect()));
            }
        }
        let graph = CubicGraph::new(self.vertex_count() - 2, new_edges, new_faces).ok()?;
        Some(Deletion { graph, edge_map })
    }

    /// Edges of the face at `position` whose deletion keeps the graph simple
    /// and 3-connected, in cycle order. A graph with more than six edges
    /// always has at least two on every face.
    pub fn removable_edges(&self, position: usize) -> Result<Vec<usize>> {
        if self.edge_count() <= 6 {
            return Err(Error::GraphTooSmall(self.edge_count()));
        }
        let found: Vec<usize> = self
            .face_edges(position)
            .into_iter()
            .filter(|&x| self.delete_edge(x, position).is_some())
            .collect();
        if found.len() < 2 {
            return Err(Error::GraphPrecondition(format!(
                "face {} has only {} removable edges",
                self.faces[position].0,
                found.len()
            )));
        }
        Ok(found)
    }
}

//! Combinatorial simple polytopes: facets, ridges, vertex incidences and, in
//! dimension three, an oriented planar face structure.
//!
//! Facet ids are zero-based internally. The JSON form ([`RawPolytope`]) uses
//! one-based ids, matching the usual `F_1, ..., F_f` labelling.

mod builtin;
mod truncation;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{cube, dodecahedron, esselmann_polytope, loebell, mirror_double, prism, simplex};
pub use truncation::{RecognitionMethod, TruncationStep, TruncationVerdict};

/// Unordered facet pair stored with the smaller id first.
pub type Ridge = (usize, usize);

/// Normalises a facet pair so that the smaller id comes first.
pub fn ridge(i: usize, j: usize) -> Ridge {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Polytope description as read from JSON, with one-based facet ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPolytope {
    pub n: usize,
    pub facets: Vec<String>,
    pub ridges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<usize>>>,
}

/// A validated simple polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    names: Vec<String>,
    ridges: Vec<Ridge>,
    neighbors: Vec<Vec<usize>>,
    vertices: Option<Vec<Vec<usize>>>,
    ridge_vertices: BTreeMap<Ridge, Vec<usize>>,
    faces: Option<Vec<Vec<usize>>>,
}

impl Polytope {
    /// Builds and validates a polytope from zero-based data.
    ///
    /// For `dim == 3` missing vertex sets are reconstructed from the ridge graph
    /// when that is unambiguous, and the skeleton is checked to be a planar,
    /// 3-connected cubic graph.
    pub fn new(
        dim: usize,
        names: Vec<String>,
        ridges: impl IntoIterator<Item = (usize, usize)>,
        vertices: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if dim < 3 {
            return Err(Error::BadDimension(dim));
        }
        let f = names.len();
        let mut ridge_set = BTreeSet::new();
        for (i, j) in ridges {
            for id in [i, j] {
                if id >= f {
                    return Err(Error::DanglingFacet { id, count: f });
                }
            }
            if i == j {
                return Err(Error::SelfRidge(i));
            }
            if !ridge_set.insert(ridge(i, j)) {
                let (a, b) = ridge(i, j);
                return Err(Error::DuplicateRidge(a, b));
            }
        }
        let mut neighbors = vec![Vec::new(); f];
        for &(i, j) in &ridge_set {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        let vertices = match vertices {
            Some(v) => Some(normalise_vertices(dim, f, &ridge_set, v)?),
            None if dim == 3 => Some(reconstruct_vertices(f, &ridge_set, &neighbors)?),
            None => None,
        };

        let mut ridge_vertices: BTreeMap<Ridge, Vec<usize>> = BTreeMap::new();
        if let Some(vs) = &vertices {
            for (index, v) in vs.iter().enumerate() {
                for a in 0..v.len() {
                    for b in a + 1..v.len() {
                        ridge_vertices.entry(ridge(v[a], v[b])).or_default().push(index);
                    }
                }
            }
        }

        let mut polytope = Polytope {
            dim,
            names,
            ridges: ridge_set.into_iter().collect(),
            neighbors,
            vertices,
            ridge_vertices,
            faces: None,
        };
        if dim == 3 {
            polytope.faces = Some(polytope.validate_surface()?);
            polytope.check_three_connected()?;
        } else {
            polytope.validate_higher()?;
        }
        Ok(polytope)
    }

    /// Builds a polytope with default facet names `F1, F2, ...`.
    pub fn from_incidences(
        dim: usize,
        facet_count: usize,
        ridges: impl IntoIterator<Item = (usize, usize)>,
        vertices: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let names = (1..=facet_count).map(|k| format!("F{k}")).collect();
        Self::new(dim, names, ridges, vertices)
    }

    /// Builds a polytope from its one-based JSON description.
    pub fn from_raw(raw: &RawPolytope) -> Result<Self> {
        let f = raw.facets.len();
        let shift = |id: usize| -> Result<usize> {
            if id == 0 || id > f {
                Err(Error::DanglingFacet { id, count: f })
            } else {
                Ok(id - 1)
            }
        };
        let mut ridges = Vec::with_capacity(raw.ridges.len());
        for [i, j] in &raw.ridges {
            ridges.push((shift(*i)?, shift(*j)?));
        }
        let vertices = match &raw.vertices {
            Some(vs) => Some(
                vs.iter()
                    .map(|v| v.iter().map(|&id| shift(id)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Self::new(raw.n, raw.facets.clone(), ridges, vertices)
    }

    /// One-based JSON description of this polytope.
    pub fn to_raw(&self) -> RawPolytope {
        RawPolytope {
            n: self.dim,
            facets: self.names.clone(),
            ridges: self.ridges.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            vertices: self
                .vertices
                .as_ref()
                .map(|vs| vs.iter().map(|v| v.iter().map(|&i| i + 1).collect()).collect()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.names.len()
    }

    pub fn ridge_count(&self) -> usize {
        self.ridges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Ridges in lexicographic order.
    pub fn ridges(&self) -> &[Ridge] {
        &self.ridges
    }

    pub fn is_ridge(&self, i: usize, j: usize) -> bool {
        i != j && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Facets sharing a ridge with `i`, in increasing order.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Vertex incidences (sorted facet sets), if known.
    pub fn vertices(&self) -> Option<&[Vec<usize>]> {
        self.vertices.as_deref()
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.vertices.as_ref().map(Vec::len)
    }

    /// Vertices lying on the ridge `(i, j)`; for `dim == 3` these are the two
    /// endpoints of the corresponding edge.
    pub fn ridge_vertices(&self, i: usize, j: usize) -> &[usize] {
        self.ridge_vertices
            .get(&ridge(i, j))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Oriented cycle of vertex ids around facet `i` (dimension three only).
    /// Adjacent facets traverse their common edge in opposite directions.
    pub fn face_cycle(&self, i: usize) -> Option<&[usize]> {
        self.faces.as_ref().map(|faces| faces[i].as_slice())
    }

    /// The invariant `e - n f + n(n+1)/2`.
    pub fn delta(&self) -> i64 {
        let n = self.dim as i64;
        self.ridge_count() as i64 - n * self.facet_count() as i64 + n * (n + 1) / 2
    }

    /// Whether the polytope is combinatorially an `n`-simplex.
    pub fn is_simplex(&self) -> bool {
        let f = self.facet_count();
        f == self.dim + 1 && self.ridge_count() == f * (f - 1) / 2
    }

    /// Endpoints of the skeleton edge dual to ridge `(i, j)` (dimension three).
    pub fn edge_endpoints(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        match self.ridge_vertices(i, j) {
            [a, b] => Some((*a, *b)),
            _ => None,
        }
    }

    /// Skeleton edges as vertex pairs, listed in ridge order (dimension three).
    pub fn skeleton_edges(&self) -> Result<Vec<(usize, usize)>> {
        if self.dim != 3 {
            return Err(Error::NeedsDimensionThree);
        }
        self.ridges
            .iter()
            .map(|&(i, j)| self.edge_endpoints(i, j).ok_or(Error::MissingVertices))
            .collect()
    }

    /// All prismatic `k`-circuits of the dual graph (`k` is 3 or 4), each given
    /// as a facet cycle starting at its smallest facet.
    pub fn prismatic_circuits(&self, k: usize) -> Result<Vec<Vec<usize>>> {
        if self.dim != 3 {
            return Err(Error::NeedsDimensionThree);
        }
        if k != 3 && k != 4 {
            return Err(Error::CircuitLength(k));
        }
        let f = self.facet_count();
        let mut out = Vec::new();
        for a in 0..f {
            for &b in self.neighbors(a).iter().filter(|&&b| b > a) {
                if k == 3 {
                    for &c in self.neighbors(b).iter().filter(|&&c| c > b) {
                        if self.is_ridge(a, c) && self.crossings_distinct(&[a, b, c]) {
                            out.push(vec![a, b, c]);
                        }
                    }
                } else {
                    for &c in self.neighbors(b).iter().filter(|&&c| c > a && c != b) {
                        for &d in self.neighbors(c).iter().filter(|&&d| d > b && d != c) {
                            if self.is_ridge(d, a) && self.crossings_distinct(&[a, b, c, d]) {
                                out.push(vec![a, b, c, d]);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Whether the edges crossed by the facet cycle have pairwise distinct
    /// endpoints.
    fn crossings_distinct(&self, cycle: &[usize]) -> bool {
        let mut seen = BTreeSet::new();
        for (idx, &a) in cycle.iter().enumerate() {
            let b = cycle[(idx + 1) % cycle.len()];
            for &v in self.ridge_vertices(a, b) {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    /// Cuts off vertex `v` by a new facet, appended with the largest id.
    pub fn truncate_vertex(&self, v: usize) -> Result<Polytope> {
        let vertices = self.vertices.as_ref().ok_or(Error::MissingVertices)?;
        let cut = vertices.get(v).ok_or(Error::UnknownVertex(v))?;
        let new_id = self.facet_count();
        let mut names = self.names.clone();
        names.push(format!("F{}", new_id + 1));
        let mut ridges = self.ridges.clone();
        ridges.extend(cut.iter().map(|&i| (i, new_id)));
        let mut new_vertices: Vec<Vec<usize>> = vertices
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != v)
            .map(|(_, s)| s.clone())
            .collect();
        for skip in 0..cut.len() {
            let mut s: Vec<usize> = cut
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &i)| i)
                .collect();
            s.push(new_id);
            new_vertices.push(s);
        }
        Polytope::new(self.dim, names, ridges, Some(new_vertices))
    }

    /// Decides whether the polytope arises from a simplex by iterated vertex
    /// truncation.
    pub fn is_truncation_polytope(&self) -> TruncationVerdict {
        truncation::recognise(self)
    }

    /// Adjacency lists of the skeleton graph (dimension three).
    pub fn skeleton_adjacency(&self) -> Result<Vec<Vec<usize>>> {
        let v = self.vertex_count().ok_or(Error::MissingVertices)?;
        let mut adj = vec![Vec::new(); v];
        for (a, b) in self.skeleton_edges()? {
            adj[a].push(b);
            adj[b].push(a);
        }
        Ok(adj)
    }

    fn validate_surface(&self) -> Result<Vec<Vec<usize>>> {
        let vertices = self.vertices.as_ref().ok_or(Error::MissingVertices)?;
        for &(i, j) in &self.ridges {
            let count = self.ridge_vertices(i, j).len();
            if count != 2 {
                return Err(Error::NotSimple(format!(
                    "edge between facets {i} and {j} has {count} endpoints"
                )));
            }
        }
        let f = self.facet_count();
        let mut faces = Vec::with_capacity(f);
        for facet in 0..f {
            faces.push(self.face_cycle_unoriented(facet)?);
        }

        // Orient faces so that every edge is traversed in opposite directions
        // by its two faces.
        let mut oriented = vec![false; f];
        for start in 0..f {
            if oriented[start] {
                continue;
            }
            oriented[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(face) = queue.pop_front() {
                for &other in &self.neighbors[face] {
                    let (u, v) = self.edge_endpoints(face, other).expect("checked above");
                    let forward = traverses(&faces[face], u, v);
                    let other_forward = traverses(&faces[other], u, v);
                    if oriented[other] {
                        if forward == other_forward {
                            return Err(Error::NotPlanar("face orientations are inconsistent".into()));
                        }
                    } else {
                        if forward == other_forward {
                            faces[other].reverse();
                        }
                        oriented[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }

        let (v, e) = (vertices.len() as i64, self.ridge_count() as i64);
        if v - e + f as i64 != 2 {
            return Err(Error::NotPlanar(format!(
                "Euler characteristic v - e + f = {} (expected 2)",
                v - e + f as i64
            )));
        }
        Ok(faces)
    }

    fn face_cycle_unoriented(&self, facet: usize) -> Result<Vec<usize>> {
        let mut link: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &other in &self.neighbors[facet] {
            let (u, v) = self.edge_endpoints(facet, other).expect("every edge has two endpoints");
            link.entry(u).or_default().push(v);
            link.entry(v).or_default().push(u);
        }
        if link.len() < 3 || link.values().any(|adj| adj.len() != 2) {
            return Err(Error::NotSimple(format!("facet {facet} is not a polygon")));
        }
        let first = *link.keys().next().expect("non-empty");
        let mut cycle = vec![first];
        let mut prev = first;
        let mut cur = link[&first][0].min(link[&first][1]);
        while cur != first {
            cycle.push(cur);
            let next = if link[&cur][0] == prev { link[&cur][1] } else { link[&cur][0] };
            prev = cur;
            cur = next;
            if cycle.len() > link.len() {
                break;
            }
        }
        if cycle.len() != link.len() {
            return Err(Error::NotPlanar(format!(
                "the boundary of facet {facet} is not a single cycle"
            )));
        }
        Ok(cycle)
    }

    fn check_three_connected(&self) -> Result<()> {
        let adj = self.skeleton_adjacency()?;
        if !is_three_connected(&adj) {
            return Err(Error::NotThreeConnected);
        }
        Ok(())
    }

    fn validate_higher(&self) -> Result<()> {
        let n = self.dim;
        for facet in 0..self.facet_count() {
            if self.neighbors[facet].len() < n {
                return Err(Error::NotSimple(format!(
                    "facet {facet} meets only {} other facets",
                    self.neighbors[facet].len()
                )));
            }
        }
        if let Some(vs) = &self.vertices {
            for &(i, j) in &self.ridges {
                let count = self.ridge_vertices(i, j).len();
                if count < n - 1 {
                    return Err(Error::NotSimple(format!(
                        "ridge ({i}, {j}) contains only {count} vertices"
                    )));
                }
            }
            let mut per_facet = vec![0usize; self.facet_count()];
            for v in vs {
                for &i in v {
                    per_facet[i] += 1;
                }
            }
            if let Some(facet) = per_facet.iter().position(|&c| c < n) {
                return Err(Error::NotSimple(format!("facet {facet} has fewer than {n} vertices")));
            }
        }
        Ok(())
    }
}

/// Whether the cyclic sequence contains the step `u -> v`.
fn traverses(cycle: &[usize], u: usize, v: usize) -> bool {
    let len = cycle.len();
    (0..len).any(|k| cycle[k] == u && cycle[(k + 1) % len] == v)
}

fn normalise_vertices(
    dim: usize,
    f: usize,
    ridges: &BTreeSet<Ridge>,
    raw: Vec<Vec<usize>>,
) -> Result<Vec<Vec<usize>>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (index, mut v) in raw.into_iter().enumerate() {
        for &id in &v {
            if id >= f {
                return Err(Error::DanglingFacet { id, count: f });
            }
        }
        v.sort_unstable();
        v.dedup();
        if v.len() != dim {
            return Err(Error::VertexSize { index, found: v.len(), dim });
        }
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                if !ridges.contains(&(v[a], v[b])) {
                    return Err(Error::MissingRidge(v[a], v[b]));
                }
            }
        }
        if !seen.insert(v.clone()) {
            return Err(Error::NotSimple(format!("vertex {v:?} is listed twice")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Recovers the vertices of a simple 3-polytope from the triangles of its
/// ridge graph. This only succeeds when every triangle is a vertex.
fn reconstruct_vertices(
    f: usize,
    ridges: &BTreeSet<Ridge>,
    neighbors: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>> {
    let mut triangles = Vec::new();
    for a in 0..f {
        for &b in neighbors[a].iter().filter(|&&b| b > a) {
            for &c in neighbors[b].iter().filter(|&&c| c > b) {
                if ridges.contains(&(a, c)) {
                    triangles.push(vec![a, b, c]);
                }
            }
        }
    }
    if f >= 4 && triangles.len() == 2 * f - 4 {
        Ok(triangles)
    } else {
        Err(Error::NotSimple(
            "vertex incidences are ambiguous from ridges alone; supply \"vertices\"".into(),
        ))
    }
}

/// Exhaustive 3-connectivity test: the graph stays connected after removing
/// any two vertices.
pub(crate) fn is_three_connected(adj: &[Vec<usize>]) -> bool {
    let v = adj.len();
    if v < 4 {
        return false;
    }
    if !connected_without(adj, usize::MAX, usize::MAX) {
        return false;
    }
    for a in 0..v {
        for b in a + 1..v {
            if !connected_without(adj, a, b) {
                return false;
            }
        }
    }
    true
}

fn connected_without(adj: &[Vec<usize>], skip_a: usize, skip_b: usize) -> bool {
    let v = adj.len();
    let Some(start) = (0..v).find(|&x| x != skip_a && x != skip_b) else {
        return true;
    };
    let mut seen = vec![false; v];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if y != skip_a && y != skip_b && !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    let removed = [skip_a, skip_b].iter().filter(|&&s| s < v).count();
    count == v - removed
}

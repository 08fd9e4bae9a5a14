//! Normal form for the diagonal action `a_ij -> d_i a_ij / d_j`.
//!
//! The action cannot change `a_ij a_ji` or the product of entries around a
//! directed cycle. On a spanning tree of the non-zero pattern it can make the
//! matrix symmetric, and the tree then fixes `d` up to a common factor. Each
//! edge outside the tree carries one remaining invariant, reported as the
//! cycle coordinate `sqrt(a'_ij / a'_ji)`.
//!
//! Tree edges are chosen greedily by `(|i - j|, min(i, j))`, so a path through
//! consecutive indices is preferred whenever it exists.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{CartanMatrix, CartanTolerance};
use crate::error::{Error, Result};

/// The invariant attached to an edge outside the spanning tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleCoordinate {
    pub edge: (usize, usize),
    /// `sqrt(a'_ij / a'_ji)` for `i < j` in the normal form.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalForm {
    #[serde(serialize_with = "crate::serde_util::matrix")]
    pub matrix: DMatrix<f64>,
    /// The scaling `d` with `matrix = D A D^{-1}` and `d_0 = 1`.
    pub scaling: Vec<f64>,
    pub tree: Vec<(usize, usize)>,
    pub cycles: Vec<CycleCoordinate>,
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, x: usize) -> usize {
        let parent = self.0[x];
        if parent == x {
            return x;
        }
        let root = self.find(parent);
        self.0[x] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Rescales an indecomposable matrix satisfying the sign conditions to be
/// symmetric on a spanning tree of its non-zero pattern.
pub fn diagonal_normalize(a: &CartanMatrix, tol: CartanTolerance) -> Result<NormalForm> {
    let f = a.size();
    let support = a.support(tol);
    let mut edges: Vec<(usize, usize)> =
        (0..f).flat_map(|i| support[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect();
    for &(i, j) in &edges {
        if !(a.get(i, j) < 0.0 && a.get(j, i) < 0.0) {
            return Err(Error::SignPattern(i, j));
        }
    }
    edges.sort_by_key(|&(i, j)| (j - i, i));

    let mut sets = DisjointSets((0..f).collect());
    let mut tree = Vec::new();
    let mut rest = Vec::new();
    for &(i, j) in &edges {
        if sets.union(i, j) {
            tree.push((i, j));
        } else {
            rest.push((i, j));
        }
    }
    if tree.len() + 1 != f {
        return Err(Error::Decomposable);
    }

    let mut tree_adj = vec![Vec::new(); f];
    for &(i, j) in &tree {
        tree_adj[i].push(j);
        tree_adj[j].push(i);
    }
    let mut d = vec![0.0; f];
    d[0] = 1.0;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for &j in &tree_adj[i] {
            if d[j] == 0.0 {
                d[j] = d[i] * (a.get(i, j) / a.get(j, i)).sqrt();
                stack.push(j);
            }
        }
    }
    let mut matrix = DMatrix::from_fn(f, f, |i, j| d[i] * a.get(i, j) / d[j]);
    // Tree entries agree up to roundoff; make them agree exactly.
    for &(i, j) in &tree {
        let mean = -(matrix[(i, j)] * matrix[(j, i)]).sqrt();
        matrix[(i, j)] = mean;
        matrix[(j, i)] = mean;
    }
    rest.sort_unstable();
    let cycles = rest
        .into_iter()
        .map(|(i, j)| CycleCoordinate { edge: (i, j), value: (matrix[(i, j)] / matrix[(j, i)]).sqrt() })
        .collect();
    Ok(NormalForm { matrix, scaling: d, tree, cycles })
}

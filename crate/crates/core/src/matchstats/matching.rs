//! Perfect matchings of cubic graphs.

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;

use super::CubicGraph;
use crate::error::{Error, Result};

/// A set of edges, by index into [`CubicGraph::edges`], sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }
}

/// Whether `edges` covers every vertex of `g` exactly once.
pub fn is_perfect_matching(g: &CubicGraph, edges: &[usize]) -> bool {
    let mut covered = vec![0usize; g.vertex_count()];
    for &x in edges {
        let Some(&(a, b)) = g.edges().get(x) else { return false };
        covered[a] += 1;
        covered[b] += 1;
    }
    covered.iter().all(|&c| c == 1)
}

/// A perfect matching of `g` containing edge `edge`.
pub fn find_factor(g: &CubicGraph, edge: usize) -> Result<Matching> {
    let &(u, v) = g.edges().get(edge).ok_or_else(|| Error::GraphPrecondition(format!("no edge {edge}")))?;
    // Match the rest of the graph with u and v removed.
    let keep: Vec<usize> = (0..g.vertex_count()).filter(|&x| x != u && x != v).collect();
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (k, &x) in keep.iter().enumerate() {
        local[x] = k;
    }
    let mut rest: UnGraph<(), ()> = UnGraph::with_capacity(keep.len(), g.edge_count());
    for _ in &keep {
        rest.add_node(());
    }
    for &(a, b) in g.edges() {
        if local[a] != usize::MAX && local[b] != usize::MAX {
            rest.add_edge(NodeIndex::new(local[a]), NodeIndex::new(local[b]), ());
        }
    }
    let matching = maximum_matching(&rest);
    if !matching.is_perfect() {
        return Err(Error::NoFactor((u, v)));
    }
    let mut edges = vec![edge];
    for (a, b) in matching.edges() {
        edges.push(g.edge_index(keep[a.index()], keep[b.index()]).expect("matched along an edge"));
    }
    edges.sort_unstable();
    debug_assert!(is_perfect_matching(g, &edges));
    Ok(Matching { edges })
}

/// All perfect matchings of `g`, by exhaustive search. Exponential; meant for
/// small graphs.
pub fn all_perfect_matchings(g: &CubicGraph) -> Vec<Matching> {
    fn go(g: &CubicGraph, covered: &mut Vec<bool>, chosen: &mut Vec<usize>, out: &mut Vec<Matching>) {
        let Some(v) = covered.iter().position(|c| !c) else {
            let mut edges = chosen.clone();
            edges.sort_unstable();
            out.push(Matching { edges });
            return;
        };
        for &w in g.neighbors(v) {
            if !covered[w] {
                covered[v] = true;
                covered[w] = true;
                chosen.push(g.edge_index(v, w).expect("adjacent"));
                go(g, covered, chosen, out);
                chosen.pop();
                covered[v] = false;
                covered[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(g, &mut vec![false; g.vertex_count()], &mut Vec::new(), &mut out);
    out
}

//! The fraction of admissible order assignments on a 3-polytope whose
//! orbifold is weakly orderable.
//!
//! An assignment puts an order in `{2, ..., d}` on every edge. It is
//! admissible when every vertex group is spherical and every prismatic 3- and
//! 4-circuit has angle sum below `pi` and `2 pi`. Assignments are labeled:
//! symmetric assignments are counted separately.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbifold::andreev::{angle_sum_below, vertex_is_spherical};
use crate::orbifold::degeneracy_order;
use crate::polytope::Polytope;

/// Exact enumeration is refused above this many edges.
pub const EXACT_EDGE_BUDGET: usize = 14;

/// Draws allowed per sample before the circuit rejection step gives up.
const MAX_DRAWS: usize = 100_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCounts {
    pub admissible: u128,
    pub weakly_orderable: u128,
    /// Entry `j` counts admissible assignments with exactly `j` edges of
    /// order at least 7.
    pub by_large_orders: Vec<u128>,
    pub identity: IdentityCheck,
}

/// Literal counts by number of large edges for `d = 7` and `d = 8`, which
/// must satisfy `N_j(8) = N_j(7) * 2^j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub at_seven: Vec<u128>,
    pub at_eight: Vec<u128>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleCounts {
    pub samples: usize,
    pub seed: u64,
    pub weakly_orderable: usize,
    /// Entry `j` counts samples with exactly `j` edges of order at least 7.
    pub by_large_orders: Vec<usize>,
    /// Total draws including those rejected at a prismatic circuit.
    pub draws: usize,
    /// Number of assignments with spherical vertex groups, the population
    /// the sampler draws from before rejection.
    pub vertex_admissible: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakOrderStats {
    pub facets: usize,
    pub edges: usize,
    pub d: u32,
    pub fraction: f64,
    /// Wilson 95% interval, for sampled estimates.
    pub interval: Option<(f64, f64)>,
    pub exact: Option<ExactCounts>,
    pub sampled: Option<SampleCounts>,
}

/// The skeleton of a 3-polytope in the shape the counters need.
struct Skeleton {
    facets: usize,
    /// Facet pair dual to each edge.
    ridges: Vec<(usize, usize)>,
    /// Edges at each vertex.
    incident: Vec<[usize; 3]>,
    /// Prismatic circuits as edge lists, with the bound on their angle sum
    /// in units of `pi`.
    circuits: Vec<(Vec<usize>, u64)>,
    steps: Vec<Step>,
}

/// Processing one vertex: its edges to earlier vertices are on the cut,
/// its edges to later vertices are assigned here.
struct Step {
    vertex: usize,
    closing: Vec<(usize, usize)>,
    opening: Vec<usize>,
    /// Where each entry of the next cut comes from.
    next_cut: Vec<CutSource>,
}

#[derive(Clone, Copy)]
enum CutSource {
    Carried(usize),
    Opened(usize),
}

impl Skeleton {
    fn new(p: &Polytope) -> Result<Skeleton> {
        if p.dim() != 3 {
            return Err(Error::NeedsDimensionThree);
        }
        if p.is_simplex() {
            return Err(Error::GraphPrecondition("the tetrahedron has no admissible assignments".into()));
        }
        let edges = p.skeleton_edges()?;
        let ridges = p.ridges().to_vec();
        let v = p.vertex_count().ok_or(Error::MissingVertices)?;
        let mut incident_lists = vec![Vec::new(); v];
        for (x, &(a, b)) in edges.iter().enumerate() {
            incident_lists[a].push(x);
            incident_lists[b].push(x);
        }
        let incident: Vec<[usize; 3]> = incident_lists
            .iter()
            .map(|l| <[usize; 3]>::try_from(l.as_slice()).map_err(|_| Error::NotSimple("vertex degree is not 3".into())))
            .collect::<Result<_>>()?;
        let edge_of = |i: usize, j: usize| ridges.iter().position(|&r| r == (i.min(j), i.max(j))).expect("ridge");
        let mut circuits = Vec::new();
        for (k, bound) in [(3, 1), (4, 2)] {
            for cycle in p.prismatic_circuits(k)? {
                let along = (0..k).map(|t| edge_of(cycle[t], cycle[(t + 1) % k])).collect();
                circuits.push((along, bound));
            }
        }

        // Greedy vertex order keeping the cut small.
        let neighbors: Vec<Vec<usize>> = (0..v)
            .map(|a| incident[a].iter().map(|&x| if edges[x].0 == a { edges[x].1 } else { edges[x].0 }).collect())
            .collect();
        let mut done = vec![false; v];
        let mut order = Vec::with_capacity(v);
        for _ in 0..v {
            let next = (0..v)
                .filter(|&a| !done[a])
                .max_by_key(|&a| (neighbors[a].iter().filter(|&&b| done[b]).count(), std::cmp::Reverse(a)))
                .expect("vertices remain");
            done[next] = true;
            order.push(next);
        }
        let mut position = vec![0; v];
        for (k, &a) in order.iter().enumerate() {
            position[a] = k;
        }
        let mut cut: Vec<usize> = Vec::new();
        let mut steps = Vec::with_capacity(v);
        for (k, &a) in order.iter().enumerate() {
            let mut closing = Vec::new();
            let mut opening = Vec::new();
            for (&x, &b) in incident[a].iter().zip(&neighbors[a]) {
                if position[b] < k {
                    closing.push((x, cut.iter().position(|&y| y == x).expect("edge on cut")));
                } else {
                    opening.push(x);
                }
            }
            let mut next: Vec<usize> = cut.iter().copied().filter(|x| !closing.iter().any(|c| c.0 == *x)).collect();
            next.extend(&opening);
            next.sort_unstable();
            let next_cut = next
                .iter()
                .map(|x| match cut.iter().position(|y| y == x) {
                    Some(at) => CutSource::Carried(at),
                    None => CutSource::Opened(opening.iter().position(|y| y == x).expect("opened")),
                })
                .collect();
            steps.push(Step { vertex: a, closing, opening, next_cut });
            cut = next;
        }
        if cut.len() > 32 {
            return Err(Error::Shape("vertex order leaves a cut wider than 32 edges".into()));
        }
        Ok(Skeleton { facets: p.facet_count(), ridges, incident, circuits, steps })
    }

    fn edge_count(&self) -> usize {
        self.ridges.len()
    }

    fn circuits_hold(&self, orders: &[u32]) -> bool {
        self.circuits.iter().all(|(edges, bound)| {
            let along: Vec<u32> = edges.iter().map(|&x| orders[x]).collect();
            angle_sum_below(&along, *bound)
        })
    }

    fn weakly_orderable(&self, orders: &[u32]) -> bool {
        let mut adj = vec![Vec::new(); self.facets];
        for (x, &(i, j)) in self.ridges.iter().enumerate() {
            if orders[x] == 2 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        degeneracy_order(&adj, 3).is_ok()
    }
}

/// Tallies over admissible assignments.
#[derive(Clone, Debug, Default)]
struct Tally {
    admissible: u128,
    weakly_orderable: u128,
    by_large: Vec<u128>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Result<Tally> {
        self.admissible = self.admissible.checked_add(other.admissible).ok_or(Error::CountOverflow)?;
        self.weakly_orderable = self.weakly_orderable.checked_add(other.weakly_orderable).ok_or(Error::CountOverflow)?;
        if self.by_large.len() < other.by_large.len() {
            self.by_large.resize(other.by_large.len(), 0);
        }
        for (a, b) in self.by_large.iter_mut().zip(other.by_large) {
            *a = a.checked_add(b).ok_or(Error::CountOverflow)?;
        }
        Ok(self)
    }
}

/// Weighted depth-first enumeration: each edge takes a value from `values`,
/// contributing its weight. With `values = [(2,1), ..., (d,1)]` this is a
/// literal count; with a single representative of weight `d - 6` for all
/// orders from 7 up it counts by classes.
fn enumerate(s: &Skeleton, values: &[(u32, u128)]) -> Result<Tally> {
    fn go(s: &Skeleton, values: &[(u32, u128)], k: usize, orders: &mut Vec<u32>, weight: u128, tally: &mut Tally) -> Result<()> {
        if k == s.steps.len() {
            if !s.circuits_hold(orders) {
                return Ok(());
            }
            tally.admissible = tally.admissible.checked_add(weight).ok_or(Error::CountOverflow)?;
            if s.weakly_orderable(orders) {
                tally.weakly_orderable = tally.weakly_orderable.checked_add(weight).ok_or(Error::CountOverflow)?;
            }
            let j = orders.iter().filter(|&&m| m >= 7).count();
            tally.by_large[j] = tally.by_large[j].checked_add(weight).ok_or(Error::CountOverflow)?;
            return Ok(());
        }
        let step = &s.steps[k];
        let choices = values.len().pow(step.opening.len() as u32);
        for mut code in 0..choices {
            let mut w = weight;
            for &x in &step.opening {
                let (m, mw) = values[code % values.len()];
                code /= values.len();
                orders[x] = m;
                w = w.checked_mul(mw).ok_or(Error::CountOverflow)?;
            }
            let [a, b, c] = s.incident[step.vertex].map(|x| orders[x]);
            if w > 0 && vertex_is_spherical(a, b, c) {
                go(s, values, k + 1, orders, w, tally)?;
            }
        }
        Ok(())
    }
    // Split the first step across threads.
    let first = &s.steps[0];
    let choices = values.len().pow(first.opening.len() as u32);
    (0..choices)
        .into_par_iter()
        .map(|code| {
            let mut orders = vec![0u32; s.edge_count()];
            let mut tally = Tally { by_large: vec![0; s.edge_count() + 1], ..Tally::default() };
            let mut w: u128 = 1;
            let mut rest = code;
            for &x in &first.opening {
                let (m, mw) = values[rest % values.len()];
                rest /= values.len();
                orders[x] = m;
                w = w.checked_mul(mw).ok_or(Error::CountOverflow)?;
            }
            let [a, b, c] = s.incident[first.vertex].map(|x| orders[x]);
            if w > 0 && vertex_is_spherical(a, b, c) {
                go(s, values, 1, &mut orders, w, &mut tally)?;
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, Tally::merge)
}

fn literal_values(d: u32) -> Vec<(u32, u128)> {
    (2..=d).map(|m| (m, 1)).collect()
}

fn class_values(d: u32) -> Vec<(u32, u128)> {
    let mut values: Vec<(u32, u128)> = (2..=d.min(6)).map(|m| (m, 1)).collect();
    if d >= 7 {
        values.push((7, (d - 6) as u128));
    }
    values
}

/// Wilson score interval at 95% for `hits` successes in `n` trials.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (p, n) = (hits as f64 / n as f64, n as f64);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn trim(mut v: Vec<u128>) -> Vec<u128> {
    while v.len() > 1 && v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn exact_stats(s: &Skeleton, d: u32) -> Result<ExactCounts> {
    if s.edge_count() > EXACT_EDGE_BUDGET {
        return Err(Error::ExactBudget { edges: s.edge_count(), budget: EXACT_EDGE_BUDGET });
    }
    let tally = enumerate(s, &class_values(d))?;
    let at_seven = trim(enumerate(s, &literal_values(7))?.by_large);
    let at_eight = trim(enumerate(s, &literal_values(8))?.by_large);
    let holds = at_eight.len() == at_seven.len()
        && at_seven.iter().zip(&at_eight).enumerate().all(|(j, (&n7, &n8))| n7.checked_mul(1u128 << j) == Some(n8));
    Ok(ExactCounts {
        admissible: tally.admissible,
        weakly_orderable: tally.weakly_orderable,
        by_large_orders: trim(tally.by_large),
        identity: IdentityCheck { at_seven, at_eight, holds },
    })
}

/// Vertex classes: orders 2, 3, {4, 5} and 6 or more are interchangeable
/// as far as spherical vertex groups go.
const CLASS_REPS: [u32; 4] = [2, 3, 4, 6];

fn class_weights(d: u32) -> [f64; 4] {
    let upto = |hi: u32, lo: u32| (d.min(hi) + 1).saturating_sub(lo) as f64;
    [upto(2, 2), upto(3, 3), upto(5, 4), (d + 1).saturating_sub(6) as f64]
}

/// Counts completions of partial assignments cut by cut, then samples
/// vertex-admissible assignments exactly in proportion to their number.
struct FrontierSampler<'a> {
    skeleton: &'a Skeleton,
    weights: [f64; 4],
    /// `memo[k][state]`: weighted number of ways to finish steps `k..` from
    /// the packed cut classes `state`.
    memo: Vec<HashMap<u64, f64>>,
}

impl<'a> FrontierSampler<'a> {
    fn new(skeleton: &'a Skeleton, d: u32) -> FrontierSampler<'a> {
        let mut sampler = FrontierSampler {
            skeleton,
            weights: class_weights(d),
            memo: vec![HashMap::new(); skeleton.steps.len() + 1],
        };
        sampler.completions(0, 0);
        sampler
    }

    /// The successor state for opening classes `code` (base 4), or `None`
    /// when the vertex group is not spherical. Also returns the weight.
    fn transition(&self, k: usize, state: u64, code: usize) -> Option<(u64, f64)> {
        let step = &self.skeleton.steps[k];
        let class_at = |at: usize| ((state >> (2 * at)) & 3) as usize;
        let opened: Vec<usize> = (0..step.opening.len()).map(|t| (code >> (2 * t)) & 3).collect();
        let mut classes: Vec<usize> = step.closing.iter().map(|&(_, at)| class_at(at)).collect();
        classes.extend(&opened);
        let [a, b, c] = [0, 1, 2].map(|t| CLASS_REPS[classes[t]]);
        if !vertex_is_spherical(a, b, c) {
            return None;
        }
        let weight: f64 = opened.iter().map(|&c| self.weights[c]).product();
        if weight == 0.0 {
            return None;
        }
        let mut next = 0u64;
        for (t, source) in step.next_cut.iter().enumerate() {
            let class = match *source {
                CutSource::Carried(at) => class_at(at),
                CutSource::Opened(o) => opened[o],
            } as u64;
            next |= class << (2 * t);
        }
        Some((next, weight))
    }

    fn completions(&mut self, k: usize, state: u64) -> f64 {
        if k == self.skeleton.steps.len() {
            return 1.0;
        }
        if let Some(&v) = self.memo[k].get(&state) {
            return v;
        }
        let choices = 1usize << (2 * self.skeleton.steps[k].opening.len());
        let mut total = 0.0;
        for code in 0..choices {
            if let Some((next, w)) = self.transition(k, state, code) {
                total += w * self.completions(k + 1, next);
            }
        }
        self.memo[k].insert(state, total);
        total
    }

    fn total(&self) -> f64 {
        self.memo[0][&0]
    }

    fn lookup(&self, k: usize, state: u64) -> f64 {
        if k == self.skeleton.steps.len() {
            1.0
        } else {
            self.memo[k][&state]
        }
    }

    /// One vertex-admissible assignment of orders, uniformly at random.
    fn draw(&self, d: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let s = self.skeleton;
        let mut classes = vec![0usize; s.edge_count()];
        let mut state = 0u64;
        for k in 0..s.steps.len() {
            let choices = 1usize << (2 * s.steps[k].opening.len());
            let options: Vec<(usize, u64, f64)> = (0..choices)
                .filter_map(|code| {
                    self.transition(k, state, code).map(|(next, w)| (code, next, w * self.lookup(k + 1, next)))
                })
                .collect();
            let total: f64 = options.iter().map(|o| o.2).sum();
            let mut r = rng.random::<f64>() * total;
            let mut pick = options.len() - 1;
            for (t, o) in options.iter().enumerate() {
                if r < o.2 {
                    pick = t;
                    break;
                }
                r -= o.2;
            }
            let (code, next, _) = options[pick];
            for (t, &x) in s.steps[k].opening.iter().enumerate() {
                classes[x] = (code >> (2 * t)) & 3;
            }
            state = next;
        }
        classes
            .into_iter()
            .map(|c| match c {
                0 => 2,
                1 => 3,
                2 => rng.random_range(4..=d.min(5)),
                _ => rng.random_range(6..=d),
            })
            .collect()
    }
}

fn sampled_stats(s: &Skeleton, d: u32, samples: usize, seed: u64) -> Result<SampleCounts> {
    let sampler = FrontierSampler::new(s, d);
    if !(sampler.total() > 0.0) {
        return Err(Error::GraphPrecondition("no assignment has spherical vertex groups".into()));
    }
    let outcomes: Vec<(bool, usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            for draws in 1..=MAX_DRAWS {
                let orders = sampler.draw(d, &mut rng);
                if s.circuits_hold(&orders) {
                    let large = orders.iter().filter(|&&m| m >= 7).count();
                    return Ok((s.weakly_orderable(&orders), large, draws));
                }
            }
            Err(Error::SamplingStalled(MAX_DRAWS))
        })
        .collect::<Result<_>>()?;
    let mut by_large_orders = vec![0usize; s.edge_count() + 1];
    for &(_, j, _) in &outcomes {
        by_large_orders[j] += 1;
    }
    while by_large_orders.len() > 1 && by_large_orders.last() == Some(&0) {
        by_large_orders.pop();
    }
    Ok(SampleCounts {
        samples,
        seed,
        weakly_orderable: outcomes.iter().filter(|o| o.0).count(),
        by_large_orders,
        draws: outcomes.iter().map(|o| o.2).sum(),
        vertex_admissible: sampler.total(),
    })
}

/// The fraction of admissible assignments with orders up to `d` whose
/// orbifold is weakly orderable, counted exactly or estimated by sampling.
pub fn estimate_wo_fraction(p: &Polytope, d: u32, mode: SamplingMode) -> Result<WeakOrderStats> {
    if d < 2 {
        return Err(Error::OrderBound(d));
    }
    let s = Skeleton::new(p)?;
    let base = WeakOrderStats {
        facets: s.facets,
        edges: s.edge_count(),
        d,
        fraction: f64::NAN,
        interval: None,
        exact: None,
        sampled: None,
    };
    match mode {
        SamplingMode::Exact => {
            let counts = exact_stats(&s, d)?;
            if counts.admissible == 0 {
                return Err(Error::GraphPrecondition(format!("no admissible assignment with orders up to {d}")));
            }
            Ok(WeakOrderStats {
                fraction: counts.weakly_orderable as f64 / counts.admissible as f64,
                exact: Some(counts),
                ..base
            })
        }
        SamplingMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Shape("at least one sample is needed".into()));
            }
            let counts = sampled_stats(&s, d, samples, seed)?;
            Ok(WeakOrderStats {
                fraction: counts.weakly_orderable as f64 / samples as f64,
                interval: Some(wilson_interval(counts.weakly_orderable, samples)),
                sampled: Some(counts),
                ..base
            })
        }
    }
}

/// Admissible assignments by brute force over all of `{2..d}^E`, for
/// checking the counters on small polytopes.
#[cfg(test)]
pub(crate) fn brute_force_counts(p: &Polytope, d: u32) -> (u128, u128, Vec<u128>) {
    // Orbifolds with a non-spherical vertex are rejected on construction.
    let q = |orders: &[u32]| {
        match crate::orbifold::CoxeterOrbifold::new(p.clone(), p.ridges().iter().copied().zip(orders.iter().copied())) {
            Ok(q) => Some(q),
            Err(Error::NonElliptic { .. }) => None,
            Err(e) => panic!("{e}"),
        }
    };
    let e = p.ridge_count();
    let span = (d - 1) as u64;
    let mut admissible = 0;
    let mut wo = 0;
    let mut by_large = vec![0u128; e + 1];
    for mut code in 0..span.pow(e as u32) {
        let orders: Vec<u32> = (0..e)
            .map(|_| {
                let m = 2 + (code % span) as u32;
                code /= span;
                m
            })
            .collect();
        let Some(orbifold) = q(&orders) else { continue };
        if orbifold.andreev_necessary_check().expect("3-polytope").passed() {
            admissible += 1;
            if orbifold.weak_order_combinatorial().is_ordered() {
                wo += 1;
            }
            by_large[orders.iter().filter(|&&m| m >= 7).count()] += 1;
        }
    }
    (admissible, wo, trim(by_large))
}

//! Distance extension across overlapping blocks and extended neighbourhood
//! smoothing with iterative correction of unobserved entries.
//!
//! Each cover block only yields distances between its own vertices. Two blocks
//! `W₁`, `W₂` that share vertices are merged through the triangle inequality:
//! for `i ∈ W₁ \ W₂` and `j ∈ W₂ \ W₁`,
//!
//! ```text
//! upper(i, j) = min_{r ∈ W₁∩W₂} D₁[i][r] + D₂[j][r]
//! lower(i, j) = max_{r ∈ W₁∩W₂} |D₁[i][r] − D₂[j][r]|
//! D[i][j]     = ave(upper, lower)
//! ```
//!
//! and pairs inside the overlap take the arithmetic mean of both measurements.
//! Many blocks are merged one at a time along a traversal of a spanning tree of
//! the super-graph; the accumulated matrix, extended entries included, is the
//! left operand of every merge. Averaging several (tree, traversal) runs gives
//! the distance used to build neighbourhoods.
//!
//! Smoothing the zero-filled observed matrix underestimates edge probabilities
//! at unobserved pairs. The correction map replaces each unobserved entry in
//! the smoothing sums by the current estimate, keeping neighbourhoods fixed.
//! Starting from the zero-filled estimate, the iterates increase entrywise and
//! stay in `[0, 1]`, so the loop converges.

use std::fmt;
use std::str::FromStr;

use crate::cover::{
    build_supergraph, ensure_valid, generate_traversal, maximal_spanning_tree, observed_set,
    random_spanning_tree, Cover, SpanningTree, SuperGraph, Traversal,
};
use crate::distance::dist_for_blocks;
use crate::error::{Error, Result};
use crate::matrix::{frobenius_error, ObservedSet, SymMatrix};
use crate::par;
use crate::seed::derive_seed;
use crate::smoothing::{default_bandwidth, neighbourhoods, smooth, NeighbourhoodSet};

/// Distances known on a subset of the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDistance {
    vertices: Vec<usize>,
    dist: SymMatrix,
}

impl PartialDistance {
    /// `vertices` must be sorted, distinct, and match `dist` in size; `dist`
    /// must be a valid distance payload.
    pub fn new(vertices: Vec<usize>, dist: SymMatrix) -> Result<Self> {
        if vertices.len() != dist.n() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                found: dist.n(),
            });
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("vertex list must be strictly increasing".into()));
        }
        dist.validate_distance()?;
        Ok(PartialDistance { vertices, dist })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dist(&self) -> &SymMatrix {
        &self.dist
    }

    /// Local index of a global vertex id.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// The distance matrix, if this covers exactly `0..n`.
    pub fn into_full(self, n: usize) -> Result<SymMatrix> {
        if self.vertices.len() != n || self.vertices.last().is_some_and(|&v| v + 1 != n) {
            return Err(Error::InvalidArgument(format!(
                "partial distance covers {} of {n} vertices",
                self.vertices.len()
            )));
        }
        Ok(self.dist)
    }
}

/// Pairs each cover block with its distance matrix.
pub fn block_partials(cover: &Cover, dists: Vec<SymMatrix>) -> Result<Vec<PartialDistance>> {
    if dists.len() != cover.num_blocks() {
        return Err(Error::DimensionMismatch {
            expected: cover.num_blocks(),
            found: dists.len(),
        });
    }
    cover
        .blocks()
        .iter()
        .zip(dists)
        .map(|(b, d)| PartialDistance::new(b.clone(), d))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AveragingRule {
    #[default]
    Harmonic,
    Arithmetic,
    Geometric,
}

impl AveragingRule {
    /// Mean of two non-negative values; `ave(0, 0) = 0` for every rule and the
    /// result is kept within `[min, max]`.
    pub fn ave(self, x: f64, y: f64) -> f64 {
        if x == y {
            return x;
        }
        let (lo, hi) = (x.min(y), x.max(y));
        let v = match self {
            AveragingRule::Harmonic => {
                if x + y == 0.0 {
                    0.0
                } else {
                    2.0 * x * y / (x + y)
                }
            }
            AveragingRule::Arithmetic => 0.5 * (x + y),
            AveragingRule::Geometric => (x * y).sqrt(),
        };
        v.clamp(lo, hi)
    }
}

impl FromStr for AveragingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "harmonic" => Ok(AveragingRule::Harmonic),
            "arithmetic" => Ok(AveragingRule::Arithmetic),
            "geometric" => Ok(AveragingRule::Geometric),
            other => Err(Error::InvalidArgument(format!("unknown averaging rule {other:?}"))),
        }
    }
}

impl fmt::Display for AveragingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AveragingRule::Harmonic => "harmonic",
            AveragingRule::Arithmetic => "arithmetic",
            AveragingRule::Geometric => "geometric",
        })
    }
}

/// Triangle-inequality bounds through a set of shared vertices: given
/// `(d(i, r), d(j, r))` for each shared `r`, returns
/// `(max_r |d(i,r) − d(j,r)|, min_r d(i,r) + d(j,r))`.
pub fn triangle_bounds<I>(through: I) -> (f64, f64)
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    for (a, b) in through {
        lower = lower.max((a - b).abs());
        upper = upper.min(a + b);
    }
    (lower, upper)
}

/// Merges two partial distances whose vertex sets intersect.
pub fn de2(first: &PartialDistance, second: &PartialDistance, rule: AveragingRule) -> Result<PartialDistance> {
    // Union in sorted order with local positions in each operand.
    let mut union: Vec<(usize, Option<usize>, Option<usize>)> =
        Vec::with_capacity(first.vertices.len() + second.vertices.len());
    let (mut a, mut b) = (0, 0);
    while a < first.vertices.len() || b < second.vertices.len() {
        let va = first.vertices.get(a).copied().unwrap_or(usize::MAX);
        let vb = second.vertices.get(b).copied().unwrap_or(usize::MAX);
        match va.cmp(&vb) {
            std::cmp::Ordering::Less => {
                union.push((va, Some(a), None));
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                union.push((vb, None, Some(b)));
                b += 1;
            }
            std::cmp::Ordering::Equal => {
                union.push((va, Some(a), Some(b)));
                a += 1;
                b += 1;
            }
        }
    }
    let shared: Vec<(usize, usize)> = union
        .iter()
        .filter_map(|&(_, x, y)| Some((x?, y?)))
        .collect();
    if shared.is_empty() {
        return Err(Error::EmptyIntersection(format!(
            "merging blocks of {} and {} vertices",
            first.vertices.len(),
            second.vertices.len()
        )));
    }

    // Rows of distances to the shared vertices, for the vertices private to
    // each side.
    let only_first: Vec<usize> = union.iter().filter(|u| u.2.is_none()).map(|u| u.1.unwrap()).collect();
    let only_second: Vec<usize> = union.iter().filter(|u| u.1.is_none()).map(|u| u.2.unwrap()).collect();
    let gather = |pd: &PartialDistance, rows: &[usize], pick: fn(&(usize, usize)) -> usize| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&r| {
                let row = pd.dist.row(r);
                shared.iter().map(|s| row[pick(s)]).collect()
            })
            .collect()
    };
    let to_shared_first = gather(first, &only_first, |s| s.0);
    let to_shared_second = gather(second, &only_second, |s| s.1);

    let cross: Vec<Vec<f64>> = par::map_slice(&to_shared_first, |ri| {
        to_shared_second
            .iter()
            .map(|rj| {
                let (lower, upper) = triangle_bounds(ri.iter().copied().zip(rj.iter().copied()));
                rule.ave(upper, lower)
            })
            .collect()
    });

    // Rank of each union member among the private vertices of its side.
    let mut rank = vec![usize::MAX; union.len()];
    let (mut c1, mut c2) = (0, 0);
    for (u, &(_, x, y)) in union.iter().enumerate() {
        match (x, y) {
            (Some(_), None) => {
                rank[u] = c1;
                c1 += 1;
            }
            (None, Some(_)) => {
                rank[u] = c2;
                c2 += 1;
            }
            _ => {}
        }
    }

    let m = union.len();
    let mut data = vec![0.0f64; m * m];
    par::for_each_row(&mut data, m, |x, row| {
        let (_, x1, x2) = union[x];
        for (y, out) in row.iter_mut().enumerate() {
            if x == y {
                continue;
            }
            let (_, y1, y2) = union[y];
            *out = match (x1, x2, y1, y2) {
                (Some(p1), Some(p2), Some(q1), Some(q2)) => {
                    0.5 * (first.dist.get(p1, q1) + second.dist.get(p2, q2))
                }
                (Some(p1), _, Some(q1), _) => first.dist.get(p1, q1),
                (_, Some(p2), _, Some(q2)) => second.dist.get(p2, q2),
                (Some(_), None, None, Some(_)) => cross[rank[x]][rank[y]],
                (None, Some(_), Some(_), None) => cross[rank[y]][rank[x]],
                _ => unreachable!("every union member belongs to a side"),
            };
        }
    });
    Ok(PartialDistance {
        vertices: union.iter().map(|u| u.0).collect(),
        dist: SymMatrix::from_row_major_unchecked(m, data),
    })
}

/// Merges block distances in the first-visit order of `traversal`.
pub fn de(
    blocks: &[PartialDistance],
    tree: &SpanningTree,
    traversal: &Traversal,
    rule: AveragingRule,
) -> Result<PartialDistance> {
    if tree.num_nodes() != blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            found: tree.num_nodes(),
        });
    }
    let order = traversal.first_visits();
    if order.len() != blocks.len() || order.iter().any(|&t| t >= blocks.len()) {
        return Err(Error::InvalidArgument("traversal does not visit every block".into()));
    }
    for w in traversal.steps().windows(2) {
        if !tree.contains_edge(w[0], w[1]) {
            return Err(Error::InvalidArgument(format!(
                "traversal step {} -> {} is not a tree edge",
                w[0], w[1]
            )));
        }
    }
    let mut acc = blocks[order[0]].clone();
    for &t in &order[1..] {
        acc = de2(&acc, &blocks[t], rule)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeStrategy {
    /// `I` uniform random spanning trees, `J` traversals each.
    RandomTrees,
    /// The maximum-overlap spanning tree with `J` traversals.
    #[default]
    MaximalTree,
}

impl FromStr for TreeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random-trees" | "random" => Ok(TreeStrategy::RandomTrees),
            "maximal-tree" | "maximal" => Ok(TreeStrategy::MaximalTree),
            other => Err(Error::InvalidArgument(format!("unknown tree strategy {other:?}"))),
        }
    }
}

impl fmt::Display for TreeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeStrategy::RandomTrees => "random-trees",
            TreeStrategy::MaximalTree => "maximal-tree",
        })
    }
}

const TREE_STREAM: u64 = 0x7472_6565;
const TRAVERSAL_STREAM: u64 = 0x7472_6176;

/// The (tree, traversal) pairs used by [`average_distance`], in averaging order.
pub fn plan_traversals(
    sg: &SuperGraph,
    trees: usize,
    traversals: usize,
    strategy: TreeStrategy,
    seed: u64,
) -> Result<Vec<(SpanningTree, Traversal)>> {
    if trees == 0 || traversals == 0 {
        return Err(Error::InvalidArgument("tree and traversal counts must be positive".into()));
    }
    let tree_list = match strategy {
        TreeStrategy::MaximalTree => vec![maximal_spanning_tree(sg)?],
        TreeStrategy::RandomTrees => (0..trees)
            .map(|i| random_spanning_tree(sg, derive_seed(seed, i as u64, 0, TREE_STREAM)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut plan = Vec::with_capacity(tree_list.len() * traversals);
    for (i, tree) in tree_list.into_iter().enumerate() {
        for j in 0..traversals {
            let tr = generate_traversal(&tree, derive_seed(seed, i as u64, j as u64, TRAVERSAL_STREAM));
            plan.push((tree.clone(), tr));
        }
    }
    Ok(plan)
}

/// Entrywise mean of the extended distances over `plan`, accumulated in plan
/// order as a running mean (exact when all runs agree).
pub fn average_over(
    blocks: &[PartialDistance],
    plan: &[(SpanningTree, Traversal)],
    rule: AveragingRule,
    n: usize,
) -> Result<SymMatrix> {
    if plan.is_empty() {
        return Err(Error::InvalidArgument("no traversals to average".into()));
    }
    let runs = par::map_slice(plan, |(tree, tr)| de(blocks, tree, tr, rule)?.into_full(n));
    let mut runs = runs.into_iter();
    let mut mean = runs.next().expect("plan is nonempty")?.into_vec();
    for (k, run) in runs.enumerate() {
        let run = run?;
        let count = (k + 2) as f64;
        for (m, &x) in mean.iter_mut().zip(run.as_slice()) {
            *m += (x - *m) / count;
        }
    }
    // The running mean is symmetric entry by entry: each (i, j) and (j, i)
    // sees the same sequence of values.
    Ok(SymMatrix::from_row_major_unchecked(n, mean))
}

/// Averages extended distances over `trees × traversals` spanning-tree walks
/// (one tree for [`TreeStrategy::MaximalTree`]).
#[allow(clippy::too_many_arguments)]
pub fn average_distance(
    blocks: &[PartialDistance],
    sg: &SuperGraph,
    trees: usize,
    traversals: usize,
    strategy: TreeStrategy,
    rule: AveragingRule,
    n: usize,
    seed: u64,
) -> Result<SymMatrix> {
    let plan = plan_traversals(sg, trees, traversals, strategy, seed)?;
    average_over(blocks, &plan, rule, n)
}

/// Tuning for the extended estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct NbseParams {
    /// Number of random spanning trees (ignored for the maximal tree).
    pub trees: usize,
    /// Traversals per tree.
    pub traversals: usize,
    pub strategy: TreeStrategy,
    pub rule: AveragingRule,
    /// Bandwidth constant `C` in `h = C·sqrt(ln n / n)`.
    pub bandwidth_c: f64,
    /// Stop once `n⁻¹‖P⁽ᵗ⁾ − P⁽ᵗ⁻¹⁾‖_F < epsilon`.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for NbseParams {
    fn default() -> Self {
        NbseParams {
            trees: 1,
            traversals: 3,
            strategy: TreeStrategy::MaximalTree,
            rule: AveragingRule::Harmonic,
            bandwidth_c: 1.0,
            epsilon: 1e-4,
            max_iterations: 200,
            seed: 0,
        }
    }
}

impl NbseParams {
    pub fn bandwidth(&self, n: usize) -> f64 {
        default_bandwidth(n, self.bandwidth_c)
    }
}

#[derive(Debug, Clone)]
pub struct Nbse0Output {
    pub estimate: SymMatrix,
    pub neighbourhoods: NeighbourhoodSet,
    pub distance: SymMatrix,
}

fn check_inputs(adj_obs: &SymMatrix, cover: &Cover) -> Result<()> {
    if adj_obs.n() != cover.n() {
        return Err(Error::DimensionMismatch {
            expected: cover.n(),
            found: adj_obs.n(),
        });
    }
    ensure_valid(cover)
}

/// Distance over all vertices, extended from each block's own distances and
/// averaged over the planned spanning-tree traversals.
pub fn extended_distance(adj_obs: &SymMatrix, cover: &Cover, params: &NbseParams) -> Result<SymMatrix> {
    check_inputs(adj_obs, cover)?;
    let blocks = block_partials(cover, dist_for_blocks(adj_obs, cover)?)?;
    let sg = build_supergraph(cover);
    average_distance(
        &blocks,
        &sg,
        params.trees,
        params.traversals,
        params.strategy,
        params.rule,
        adj_obs.n(),
        params.seed,
    )
}

/// Extended distance followed by one round of smoothing of the zero-filled
/// observed matrix.
pub fn nbse0(adj_obs: &SymMatrix, cover: &Cover, params: &NbseParams) -> Result<Nbse0Output> {
    let distance = extended_distance(adj_obs, cover, params)?;
    nbse0_from_distance(adj_obs, distance, params)
}

pub fn nbse0_from_distance(adj_obs: &SymMatrix, distance: SymMatrix, params: &NbseParams) -> Result<Nbse0Output> {
    if distance.n() != adj_obs.n() {
        return Err(Error::DimensionMismatch {
            expected: adj_obs.n(),
            found: distance.n(),
        });
    }
    let nbhd = neighbourhoods(&distance, params.bandwidth(adj_obs.n()))?;
    let estimate = smooth(adj_obs.as_slice(), &nbhd);
    Ok(Nbse0Output {
        estimate,
        neighbourhoods: nbhd,
        distance,
    })
}

/// One correction step: smooth the observed adjacency with every unobserved
/// entry replaced by `current`.
pub fn f_corr(
    current: &SymMatrix,
    adj_obs: &SymMatrix,
    observed: &ObservedSet,
    nbhd: &NeighbourhoodSet,
) -> Result<SymMatrix> {
    let n = adj_obs.n();
    for found in [current.n(), observed.n(), nbhd.n()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let mut filled = vec![0.0f64; n * n];
    par::for_each_row(&mut filled, n, |i, row| {
        let seen = observed.row(i);
        let (a, p) = (adj_obs.row(i), current.row(i));
        for j in 0..n {
            row[j] = if seen[j] { a[j] } else { p[j] };
        }
    });
    Ok(smooth(&filled, nbhd))
}

#[derive(Debug, Clone)]
pub struct NbseOutput {
    pub estimate: SymMatrix,
    /// Number of correction steps applied.
    pub iterations: usize,
    /// `n⁻¹‖P⁽ᵗ⁾ − P⁽ᵗ⁻¹⁾‖_F` after each step.
    pub deltas: Vec<f64>,
    /// False when the iteration cap stopped the loop.
    pub converged: bool,
}

pub fn nbse(adj_obs: &SymMatrix, cover: &Cover, params: &NbseParams) -> Result<NbseOutput> {
    nbse_observed(adj_obs, cover, params, |_, _| {})
}

/// [`nbse`] that calls `on_step(previous, next)` after every correction.
pub fn nbse_observed<F>(adj_obs: &SymMatrix, cover: &Cover, params: &NbseParams, on_step: F) -> Result<NbseOutput>
where
    F: FnMut(&SymMatrix, &SymMatrix),
{
    check_epsilon(params)?;
    let start = nbse0(adj_obs, cover, params)?;
    correct_until_stable(adj_obs, &observed_set(cover), start, params, on_step)
}

/// The full estimator with a caller-supplied extended distance.
pub fn nbse_from_distance(
    adj_obs: &SymMatrix,
    cover: &Cover,
    distance: SymMatrix,
    params: &NbseParams,
) -> Result<NbseOutput> {
    check_epsilon(params)?;
    check_inputs(adj_obs, cover)?;
    let start = nbse0_from_distance(adj_obs, distance, params)?;
    correct_until_stable(adj_obs, &observed_set(cover), start, params, |_, _| {})
}

fn check_epsilon(params: &NbseParams) -> Result<()> {
    if params.epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("epsilon {} must be positive", params.epsilon)))
    }
}

/// Applies [`f_corr`] from the first-stage estimate until the step size drops
/// below `params.epsilon` or the iteration cap is hit. At least one step runs.
pub fn correct_until_stable<F>(
    adj_obs: &SymMatrix,
    observed: &ObservedSet,
    start: Nbse0Output,
    params: &NbseParams,
    mut on_step: F,
) -> Result<NbseOutput>
where
    F: FnMut(&SymMatrix, &SymMatrix),
{
    let mut current = start.estimate;
    let mut deltas = Vec::new();
    let mut delta = params.epsilon;
    while delta >= params.epsilon && deltas.len() < params.max_iterations {
        let next = f_corr(&current, adj_obs, observed, &start.neighbourhoods)?;
        delta = frobenius_error(&next, &current)?;
        on_step(&current, &next);
        deltas.push(delta);
        current = next;
    }
    Ok(NbseOutput {
        estimate: current,
        iterations: deltas.len(),
        converged: delta < params.epsilon,
        deltas,
    })
}

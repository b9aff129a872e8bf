//! Observed-subgraph covers and the block-level super-graph.
//!
//! Vertices are 0-indexed here; cover files use 1-indexed ids and are converted
//! on read and write.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::matrix::ObservedSet;
use crate::seed::{rng_from_seed, Rng};

/// An ordered list of vertex blocks over `0..n`. Blocks are stored sorted and
/// deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Cover {
    /// Builds a cover without checking the covering invariants; see
    /// [`validate_cover`]. Vertex ids must be below `n`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                match b.last() {
                    Some(&v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
                    _ => Ok(b),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cover { n, blocks })
    }

    /// The trivial cover: one block holding every vertex.
    pub fn full(n: usize) -> Self {
        Cover {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, t: usize) -> &[usize] {
        &self.blocks[t]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Parses one block per line of space-separated 1-indexed ids; `#` lines
    /// and blank lines are skipped.
    pub fn parse(text: &str, n: usize, path: &Path) -> Result<Self> {
        let mut blocks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|tok| match tok.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= n => Ok(v - 1),
                    Ok(v) => Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        msg: format!("vertex {v} outside 1..={n}"),
                    }),
                    Err(e) => Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        msg: format!("bad vertex id {tok:?}: {e}"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Cover::new(n, blocks)
    }

    pub fn read(path: &Path, n: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, n, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let ids: Vec<String> = b.iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    EmptyBlock(usize),
    /// 0-indexed vertices that no block contains.
    NotCovering(Vec<usize>),
    /// Number of connected components of the super-graph.
    Disconnected(usize),
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::EmptyBlock(t) => write!(f, "block {} is empty", t + 1),
            CoverViolation::NotCovering(missing) => {
                let shown: Vec<String> = missing.iter().take(10).map(|v| (v + 1).to_string()).collect();
                write!(f, "{} vertices not covered (e.g. {})", missing.len(), shown.join(", "))
            }
            CoverViolation::Disconnected(c) => write!(f, "super-graph has {c} components"),
        }
    }
}

/// Every invariant violation of `cover`; empty when the cover is valid.
pub fn validate_cover(cover: &Cover) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    if cover.blocks.is_empty() {
        out.push(CoverViolation::Disconnected(0));
    }
    for (t, b) in cover.blocks.iter().enumerate() {
        if b.is_empty() {
            out.push(CoverViolation::EmptyBlock(t));
        }
    }
    let mut seen = vec![false; cover.n];
    for b in &cover.blocks {
        for &v in b {
            seen[v] = true;
        }
    }
    let missing: Vec<usize> = (0..cover.n).filter(|&v| !seen[v]).collect();
    if !missing.is_empty() {
        out.push(CoverViolation::NotCovering(missing));
    }
    if !cover.blocks.is_empty() {
        let components = build_supergraph(cover).component_count();
        if components > 1 {
            out.push(CoverViolation::Disconnected(components));
        }
    }
    out
}

/// [`validate_cover`] as a `Result`.
pub fn ensure_valid(cover: &Cover) -> Result<()> {
    let violations = validate_cover(cover);
    if violations.is_empty() {
        return Ok(());
    }
    let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Error::InvalidCover(msg.join("; ")))
}

pub fn observed_set(cover: &Cover) -> ObservedSet {
    let mut o = ObservedSet::empty(cover.n);
    for b in &cover.blocks {
        o.insert_block(b);
    }
    o
}

/// Size of the intersection of two sorted vertex lists.
pub(crate) fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Undirected weighted edge `(a, b, weight)` with `a < b`.
pub type WeightedEdge = (usize, usize, usize);

/// Block-level graph: nodes are cover blocks, edges join blocks that share
/// vertices, weighted by the size of the overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperGraph {
    num_nodes: usize,
    edges: Vec<WeightedEdge>,
    neighbours: Vec<Vec<usize>>,
}

impl SuperGraph {
    pub fn from_edges(num_nodes: usize, edges: Vec<WeightedEdge>) -> Result<Self> {
        let mut neighbours = vec![Vec::new(); num_nodes];
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            if a >= num_nodes || b >= num_nodes || a == b {
                return Err(Error::InvalidArgument(format!("bad super-graph edge ({a}, {b})")));
            }
            let (a, b) = (a.min(b), a.max(b));
            if w == 0 {
                continue;
            }
            neighbours[a].push(b);
            neighbours[b].push(a);
            norm.push((a, b, w));
        }
        norm.sort_unstable();
        for nb in &mut neighbours {
            nb.sort_unstable();
        }
        Ok(SuperGraph {
            num_nodes,
            edges: norm,
            neighbours,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.neighbours[node]
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|&(x, y, _)| (x, y).cmp(&key))
            .map(|idx| self.edges[idx].2)
            .unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        let mut dsu = DisjointSets::new(self.num_nodes);
        let mut count = self.num_nodes;
        for &(a, b, _) in &self.edges {
            if dsu.union(a, b) {
                count -= 1;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes > 0 && self.component_count() == 1
    }
}

pub fn build_supergraph(cover: &Cover) -> SuperGraph {
    let t = cover.num_blocks();
    let mut edges = Vec::new();
    for a in 0..t {
        for b in (a + 1)..t {
            let w = intersection_size(&cover.blocks[a], &cover.blocks[b]);
            if w > 0 {
                edges.push((a, b, w));
            }
        }
    }
    SuperGraph::from_edges(t, edges).expect("indices are in range by construction")
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Spanning tree over super-graph nodes; edges stored as sorted `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl SpanningTree {
    /// Checks that `edges` form a tree on `num_nodes` nodes.
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_nodes == 0 || edges.len() + 1 != num_nodes {
            return Err(Error::InvalidArgument(format!(
                "{} edges cannot span {num_nodes} nodes as a tree",
                edges.len()
            )));
        }
        let mut dsu = DisjointSets::new(num_nodes);
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= num_nodes || b >= num_nodes || !dsu.union(a, b) {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) breaks the tree")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(SpanningTree {
            num_nodes,
            edges: norm,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        adj
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Total super-graph weight of the tree edges.
    pub fn weight(&self, sg: &SuperGraph) -> usize {
        self.edges.iter().map(|&(a, b)| sg.weight(a, b)).sum()
    }
}

/// Uniform spanning tree by Wilson's loop-erased random walks.
pub fn random_spanning_tree(sg: &SuperGraph, seed: u64) -> Result<SpanningTree> {
    if !sg.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rng = rng_from_seed(seed);
    let t = sg.num_nodes();
    let mut in_tree = vec![false; t];
    let mut next = vec![usize::MAX; t];
    in_tree[rng.random_range(0..t)] = true;
    let mut edges = Vec::with_capacity(t - 1);
    for start in 0..t {
        let mut u = start;
        while !in_tree[u] {
            let nb = sg.neighbours(u);
            next[u] = nb[rng.random_range(0..nb.len())];
            u = next[u];
        }
        // Retrace the walk; `next` holds the loop-erased successor of each node.
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            edges.push((u, next[u]));
            u = next[u];
        }
    }
    SpanningTree::new(t, edges)
}

/// Maximum-weight spanning tree (Kruskal). Ties are broken by the
/// lexicographic order of `(min endpoint, max endpoint)`.
pub fn maximal_spanning_tree(sg: &SuperGraph) -> Result<SpanningTree> {
    if !sg.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut order: Vec<WeightedEdge> = sg.edges().to_vec();
    order.sort_by(|x, y| y.2.cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    let mut dsu = DisjointSets::new(sg.num_nodes());
    let edges: Vec<(usize, usize)> = order
        .into_iter()
        .filter(|&(a, b, _)| dsu.union(a, b))
        .map(|(a, b, _)| (a, b))
        .collect();
    SpanningTree::new(sg.num_nodes(), edges)
}

/// Sequence of tree-adjacent super-graph nodes visiting every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Traversal(Vec<usize>);

impl Traversal {
    /// Checks adjacency of consecutive steps and coverage.
    pub fn new(steps: Vec<usize>, tree: &SpanningTree) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument("empty traversal".into()));
        }
        let mut seen = vec![false; tree.num_nodes()];
        for (k, &s) in steps.iter().enumerate() {
            if s >= tree.num_nodes() {
                return Err(Error::VertexOutOfRange {
                    vertex: s,
                    n: tree.num_nodes(),
                });
            }
            if k > 0 && !tree.contains_edge(steps[k - 1], s) {
                return Err(Error::InvalidArgument(format!(
                    "traversal step {} -> {s} is not a tree edge",
                    steps[k - 1]
                )));
            }
            seen[s] = true;
        }
        if let Some(missing) = seen.iter().position(|&b| !b) {
            return Err(Error::InvalidArgument(format!("traversal misses node {missing}")));
        }
        Ok(Traversal(steps))
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    /// Nodes in order of first visit.
    pub fn first_visits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.iter().max().map_or(0, |m| m + 1)];
        self.0
            .iter()
            .copied()
            .filter(|&s| !std::mem::replace(&mut seen[s], true))
            .collect()
    }
}

/// Depth-first walk from `root` that records each node on entry and again
/// whenever the walk backtracks into it, stopping once the last node has
/// been entered. Children are visited in ascending order, or shuffled by `rng`.
pub fn dfs_traversal(tree: &SpanningTree, root: usize, rng: Option<&mut Rng>) -> Result<Traversal> {
    if root >= tree.num_nodes() {
        return Err(Error::VertexOutOfRange {
            vertex: root,
            n: tree.num_nodes(),
        });
    }
    let mut adj = tree.adjacency();
    if let Some(rng) = rng {
        for nb in &mut adj {
            nb.shuffle(rng);
        }
    }
    let t = tree.num_nodes();
    let mut visited = vec![false; t];
    let mut steps = vec![root];
    visited[root] = true;
    let mut remaining = t - 1;
    // Stack of (node, index of next child to try).
    let mut stack = vec![(root, 0usize)];
    while remaining > 0 {
        let (node, idx) = stack.last_mut().expect("tree is connected");
        if let Some(&child) = adj[*node].get(*idx) {
            *idx += 1;
            if !visited[child] {
                visited[child] = true;
                remaining -= 1;
                steps.push(child);
                stack.push((child, 0));
            }
        } else {
            stack.pop();
            let &(parent, _) = stack.last().expect("tree is connected");
            steps.push(parent);
        }
    }
    Traversal::new(steps, tree)
}

/// DFS traversal from a seeded random root with seeded random child order.
pub fn generate_traversal(tree: &SpanningTree, seed: u64) -> Traversal {
    let mut rng = rng_from_seed(seed);
    let root = rng.random_range(0..tree.num_nodes());
    dfs_traversal(tree, root, Some(&mut rng)).expect("root is in range")
}

fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    perm
}

/// Two blocks over a random permutation sharing exactly `overlap` vertices.
/// Block sizes are `⌈(n + overlap)/2⌉` and `⌊(n + overlap)/2⌋`.
pub fn make_two_block_cover(n: usize, overlap: usize, seed: u64) -> Result<Cover> {
    if overlap == 0 || overlap + 2 > n {
        return Err(Error::InvalidArgument(format!(
            "overlap {overlap} must lie in 1..={} for n = {n}",
            n.saturating_sub(2)
        )));
    }
    chain_cover_unchecked(n, 2, overlap, seed)
}

/// `t` consecutive blocks over a random permutation. Adjacent blocks share
/// exactly `overlap` vertices and non-adjacent blocks are disjoint, so the
/// super-graph is a path. Sizes are balanced with the larger blocks first.
pub fn make_chain_cover(n: usize, t: usize, overlap: usize, seed: u64) -> Result<Cover> {
    if t < 2 {
        return Err(Error::InvalidArgument("chain cover needs at least 2 blocks".into()));
    }
    if overlap == 0 {
        return Err(Error::InvalidArgument("chain overlap must be positive".into()));
    }
    let total = n + (t - 1) * overlap;
    let smallest = total / t;
    // Every block needs a private vertex at the ends; interior blocks must
    // hold both of their overlaps without touching each other.
    let needed = if t == 2 { overlap + 1 } else { 2 * overlap + 1 };
    if smallest < needed {
        return Err(Error::InvalidArgument(format!(
            "chain cover with n = {n}, T = {t}, overlap = {overlap} is infeasible"
        )));
    }
    chain_cover_unchecked(n, t, overlap, seed)
}

fn chain_cover_unchecked(n: usize, t: usize, overlap: usize, seed: u64) -> Result<Cover> {
    let perm = seeded_permutation(n, seed);
    let total = n + (t - 1) * overlap;
    let (base, extra) = (total / t, total % t);
    let mut blocks = Vec::with_capacity(t);
    let mut start = 0;
    for k in 0..t {
        let size = base + usize::from(k < extra);
        blocks.push(perm[start..start + size].to_vec());
        start += size - overlap;
    }
    debug_assert_eq!(start + overlap, n);
    Cover::new(n, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn cover(n: usize, blocks: &[&[usize]]) -> Cover {
        Cover::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn supergraph_examples() {
        let c = cover(5, &[&[0, 1, 2, 3, 4], &[0, 1, 2, 3, 4]]);
        let sg = build_supergraph(&c);
        assert_eq!(sg.edges(), &[(0, 1, 5)]);

        // Four blocks over 16 vertices with chain-like overlaps.
        let c = make_chain_cover(16, 4, 1, 3).unwrap();
        let sg = build_supergraph(&c);
        assert_eq!(sg.edges(), &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
    }

    #[test]
    fn supergraph_weights_match_set_intersections() {
        let mut rng = rng_from_seed(41);
        for _ in 0..20 {
            let blocks: Vec<Vec<usize>> = (0..4)
                .map(|_| (0..20).filter(|_| rng.random_bool(0.4)).collect())
                .collect();
            let c = Cover::new(20, blocks.clone()).unwrap();
            let sg = build_supergraph(&c);
            for a in 0..4 {
                for b in (a + 1)..4 {
                    let sa: BTreeSet<_> = blocks[a].iter().collect();
                    let sb: BTreeSet<_> = blocks[b].iter().collect();
                    assert_eq!(sg.weight(a, b), sa.intersection(&sb).count());
                }
            }
        }
    }

    #[test]
    fn validation() {
        let c = cover(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(validate_cover(&c), vec![CoverViolation::Disconnected(2)]);

        let c = cover(4, &[&[0, 1], &[1, 2]]);
        assert_eq!(validate_cover(&c), vec![CoverViolation::NotCovering(vec![3])]);

        let c = cover(4, &[&[0, 1], &[]]);
        let v = validate_cover(&c);
        assert!(v.contains(&CoverViolation::EmptyBlock(1)));

        let c = cover(5, &[&[0, 1, 2], &[2, 3], &[3, 4]]);
        assert!(validate_cover(&c).is_empty());
        assert!(Cover::new(3, vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn observed_pairs() {
        let o = observed_set(&Cover::full(6));
        assert!(o.is_full());

        let c = cover(5, &[&[0, 1, 2], &[2, 3, 4]]);
        let o = observed_set(&c);
        for i in 0..5 {
            for j in 0..5 {
                let brute = c.blocks().iter().any(|b| b.contains(&i) && b.contains(&j));
                assert_eq!(o.contains(i, j), brute);
            }
        }
        assert!(!o.contains(0, 4));
        assert!(o.contains(2, 4));
    }

    #[test]
    fn random_tree_trivial_cases() {
        let sg = SuperGraph::from_edges(2, vec![(0, 1, 3)]).unwrap();
        assert_eq!(random_spanning_tree(&sg, 9).unwrap().edges(), &[(0, 1)]);

        let path = SuperGraph::from_edges(4, vec![(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        for seed in 0..10 {
            assert_eq!(
                random_spanning_tree(&path, seed).unwrap().edges(),
                &[(0, 1), (1, 2), (2, 3)]
            );
        }
        let disconnected = SuperGraph::from_edges(3, vec![(0, 1, 1)]).unwrap();
        assert!(matches!(random_spanning_tree(&disconnected, 0), Err(Error::Disconnected)));
        assert!(matches!(maximal_spanning_tree(&disconnected), Err(Error::Disconnected)));
    }

    #[test]
    fn maximal_tree_examples() {
        let cycle = SuperGraph::from_edges(4, vec![(0, 1, 2), (1, 2, 2), (2, 3, 2), (0, 3, 2)]).unwrap();
        assert_eq!(
            maximal_spanning_tree(&cycle).unwrap().edges(),
            &[(0, 1), (0, 3), (1, 2)]
        );
        let tri = SuperGraph::from_edges(3, vec![(0, 1, 5), (1, 2, 3), (0, 2, 1)]).unwrap();
        let tree = maximal_spanning_tree(&tri).unwrap();
        assert_eq!(tree.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(tree.weight(&tri), 8);
    }

    #[test]
    fn traversal_examples() {
        let single = SpanningTree::new(1, vec![]).unwrap();
        assert_eq!(generate_traversal(&single, 4).steps(), &[0]);

        let path = SpanningTree::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(dfs_traversal(&path, 0, None).unwrap().steps(), &[0, 1, 2]);
        assert_eq!(dfs_traversal(&path, 1, None).unwrap().steps(), &[1, 0, 1, 2]);

        let star = SpanningTree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let tr = dfs_traversal(&star, 0, Some(&mut rng)).unwrap();
            let s = tr.steps();
            assert_eq!(s.len(), 6);
            assert_eq!((s[0], s[2], s[4]), (0, 0, 0));
            let mut leaves = vec![s[1], s[3], s[5]];
            leaves.sort_unstable();
            assert_eq!(leaves, vec![1, 2, 3]);
        }
    }

    #[test]
    fn traversal_rejects_bad_steps() {
        let path = SpanningTree::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(Traversal::new(vec![0, 2, 1], &path).is_err());
        assert!(Traversal::new(vec![0, 1], &path).is_err());
        assert!(SpanningTree::new(3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn two_block_cover_sizes() {
        let c = make_two_block_cover(4, 2, 1).unwrap();
        assert_eq!(c.block(0).len(), 3);
        assert_eq!(c.block(1).len(), 3);
        assert_eq!(intersection_size(c.block(0), c.block(1)), 2);
        assert!(validate_cover(&c).is_empty());

        let c = make_two_block_cover(1000, 100, 7).unwrap();
        assert_eq!((c.block(0).len(), c.block(1).len()), (550, 550));
        assert_eq!(intersection_size(c.block(0), c.block(1)), 100);

        let c = make_two_block_cover(101, 4, 7).unwrap();
        assert_eq!((c.block(0).len(), c.block(1).len()), (53, 52));
        assert_eq!(intersection_size(c.block(0), c.block(1)), 4);

        assert!(make_two_block_cover(10, 10, 0).is_err());
        assert!(make_two_block_cover(10, 9, 0).is_err());
        assert!(make_two_block_cover(10, 0, 0).is_err());
    }

    #[test]
    fn chain_cover_structure() {
        assert_eq!(
            make_chain_cover(10, 2, 2, 5).unwrap(),
            make_two_block_cover(10, 2, 5).unwrap()
        );
        let c = make_chain_cover(16, 4, 1, 0).unwrap();
        assert_eq!(c.num_blocks(), 4);
        for (n, t, o) in [(16, 4, 1), (300, 5, 10), (1000, 5, 50), (57, 3, 7)] {
            let c = make_chain_cover(n, t, o, 11).unwrap();
            assert!(validate_cover(&c).is_empty());
            let sg = build_supergraph(&c);
            let expected: Vec<WeightedEdge> = (0..t - 1).map(|k| (k, k + 1, o)).collect();
            assert_eq!(sg.edges(), expected.as_slice());
        }
        assert!(make_chain_cover(10, 5, 3, 0).is_err());
        assert!(make_chain_cover(10, 1, 1, 0).is_err());
    }

    #[test]
    fn cover_file_roundtrip() {
        let c = make_chain_cover(30, 3, 2, 8).unwrap();
        let text = format!("# three blocks\n{}", c.to_text());
        assert_eq!(Cover::parse(&text, 30, Path::new("mem")).unwrap(), c);
        let err = Cover::parse("1 2\n3 x\n", 5, Path::new("mem")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Cover::parse("0 1\n", 5, Path::new("mem")).is_err());
    }
}

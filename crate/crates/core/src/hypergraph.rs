//! Hypergraph storage and the derived structure every other module reads.
//!
//! A [`Hypergraph`] is the single source of truth: a node count plus an
//! ordered multiset of hyperedges. Everything else is a cached view built
//! from it:
//!
//! * [`AdjacencyView`]: the weighted adjacency `A = I·Iᵀ − D` in CSR form,
//!   its binary pattern `Ã`, and the degree vectors `d_N`, `d_H`, `d_E`.
//! * [`TwoSimplexSet`]: node triples covered by at least one hyperedge,
//!   weighted by how many hyperedges cover them.
//! * [`LinkIndex`]: the directed links `i → j` of `Ã`, numbered in CSR order.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Nodes `0..num_nodes` and a multiset of hyperedges.
///
/// Hyperedges are stored with their members sorted. Repeated hyperedges are
/// kept; multiplicity raises the corresponding entries of `A` and `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    num_nodes: usize,
    hyperedges: Vec<Vec<NodeId>>,
}

impl Hypergraph {
    pub fn new(num_nodes: usize, hyperedges: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut hyperedges = hyperedges;
        for (idx, edge) in hyperedges.iter_mut().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyHyperedge { edge: idx });
            }
            edge.sort_unstable();
            for w in edge.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateNode {
                        edge: idx,
                        node: w[0] as u64,
                    });
                }
            }
            let last = *edge.last().unwrap();
            if last as usize >= num_nodes {
                return Err(Error::NodeOutOfRange {
                    edge: idx,
                    node: last as u64,
                    num_nodes,
                });
            }
        }
        Ok(Hypergraph {
            num_nodes,
            hyperedges,
        })
    }

    /// `num_nodes` isolated nodes.
    pub fn empty(num_nodes: usize) -> Self {
        Hypergraph {
            num_nodes,
            hyperedges: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_hyperedges(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<NodeId>] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, idx: usize) -> &[NodeId] {
        &self.hyperedges[idx]
    }

    pub fn hyperdegrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.num_nodes];
        for edge in &self.hyperedges {
            for &v in edge {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    pub fn edge_sizes(&self) -> Vec<u32> {
        self.hyperedges.iter().map(|e| e.len() as u32).collect()
    }

    /// For each node, the indices of the hyperedges containing it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.num_nodes];
        for (idx, edge) in self.hyperedges.iter().enumerate() {
            for &v in edge {
                inc[v as usize].push(idx as u32);
            }
        }
        inc
    }

    /// Copy with repeated hyperedges collapsed to one (first occurrence kept).
    pub fn dedup_hyperedges(&self) -> Hypergraph {
        let mut seen = std::collections::HashSet::new();
        let hyperedges = self
            .hyperedges
            .iter()
            .filter(|e| seen.insert((*e).clone()))
            .cloned()
            .collect();
        Hypergraph {
            num_nodes: self.num_nodes,
            hyperedges,
        }
    }

    /// Connected components under `Ã`, largest first; ties go to the
    /// component containing the lowest node id.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let inc = self.incidence();
        let mut comp = vec![usize::MAX; self.num_nodes];
        let mut edge_seen = vec![false; self.hyperedges.len()];
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.num_nodes {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start as NodeId];
            comp[start] = id;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &e in &inc[v] {
                    let e = e as usize;
                    if edge_seen[e] {
                        continue;
                    }
                    edge_seen[e] = true;
                    for &u in &self.hyperedges[e] {
                        if comp[u as usize] == usize::MAX {
                            comp[u as usize] = id;
                            members.push(u);
                            queue.push_back(u as usize);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        // stable sort keeps lowest-id-first among equal sizes
        out.sort_by(|a, b| b.len().cmp(&a.len()));
        out
    }

    /// Restriction to the largest connected component, relabelled `0..n`
    /// in increasing order of the original ids.
    pub fn giant_component(&self) -> (Hypergraph, NodeRemap) {
        let comps = self.components();
        let Some(giant) = comps.into_iter().next() else {
            return (Hypergraph::empty(0), NodeRemap::new(Vec::new(), 0));
        };
        let mut old_to_new = vec![None; self.num_nodes];
        for (new, &old) in giant.iter().enumerate() {
            old_to_new[old as usize] = Some(new as NodeId);
        }
        let hyperedges = self
            .hyperedges
            .iter()
            .filter_map(|edge| {
                let kept: Vec<NodeId> = edge
                    .iter()
                    .filter_map(|&v| old_to_new[v as usize])
                    .collect();
                (!kept.is_empty()).then_some(kept)
            })
            .collect();
        let n = giant.len();
        (
            Hypergraph {
                num_nodes: n,
                hyperedges,
            },
            NodeRemap::new(giant, self.num_nodes),
        )
    }
}

/// Old ↔ new node ids produced by [`Hypergraph::giant_component`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRemap {
    new_to_old: Vec<NodeId>,
    old_to_new: Vec<Option<NodeId>>,
}

impl NodeRemap {
    fn new(new_to_old: Vec<NodeId>, old_count: usize) -> Self {
        let mut old_to_new = vec![None; old_count];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old as usize] = Some(new as NodeId);
        }
        NodeRemap {
            new_to_old,
            old_to_new,
        }
    }

    pub fn to_old(&self, new: NodeId) -> NodeId {
        self.new_to_old[new as usize]
    }

    pub fn to_new(&self, old: NodeId) -> Option<NodeId> {
        self.old_to_new.get(old as usize).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.new_to_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_to_old.is_empty()
    }
}

/// Weighted adjacency in CSR form plus degree vectors.
///
/// Row `i` lists the neighbours `j` with `A_ij ≥ 1` in increasing order,
/// alongside `A_ij` (the number of hyperedges shared by `i` and `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyView {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Vec<u32>,
    hyperdegree: Vec<u32>,
    edge_size: Vec<u32>,
    weighted_degree: Vec<u64>,
}

impl AdjacencyView {
    pub fn build(h: &Hypergraph) -> Self {
        let n = h.num_nodes();
        // node -> hyperedge incidence in CSR form
        let hyperdegree = h.hyperdegrees();
        let mut inc_offsets = Vec::with_capacity(n + 1);
        inc_offsets.push(0usize);
        for &d in &hyperdegree {
            inc_offsets.push(inc_offsets.last().unwrap() + d as usize);
        }
        let mut fill = inc_offsets[..n].to_vec();
        let mut inc = vec![0u32; inc_offsets[n]];
        for (e, members) in h.hyperedges().iter().enumerate() {
            for &v in members {
                inc[fill[v as usize]] = e as u32;
                fill[v as usize] += 1;
            }
        }
        let bound: usize = h.hyperedges().iter().map(|e| e.len() * (e.len() - 1)).sum();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(bound);
        let mut weights = Vec::with_capacity(bound);
        let mut buf: Vec<NodeId> = Vec::new();
        for i in 0..n {
            buf.clear();
            for &e in &inc[inc_offsets[i]..inc_offsets[i + 1]] {
                buf.extend(h.hyperedge(e as usize).iter().filter(|&&v| v as usize != i));
            }
            buf.sort_unstable();
            let mut iter = buf.iter().peekable();
            while let Some(&j) = iter.next() {
                let mut count = 1u32;
                while iter.peek() == Some(&&j) {
                    iter.next();
                    count += 1;
                }
                neighbors.push(j);
                weights.push(count);
            }
            offsets.push(neighbors.len());
        }
        let weighted_degree = (0..n)
            .map(|i| {
                weights[offsets[i]..offsets[i + 1]]
                    .iter()
                    .map(|&w| w as u64)
                    .sum()
            })
            .collect();
        AdjacencyView {
            offsets,
            neighbors,
            weights,
            hyperdegree,
            edge_size: h.edge_sizes(),
            weighted_degree,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected binary links (pairs with `Ã_ij = 1`).
    pub fn num_links(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        let i = i as usize;
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `A_ij` for the neighbours returned by [`neighbors`](Self::neighbors).
    #[inline]
    pub fn weights(&self, i: NodeId) -> &[u32] {
        let i = i as usize;
        &self.weights[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn row(&self, i: NodeId) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.neighbors(i)
            .iter()
            .copied()
            .zip(self.weights(i).iter().copied())
    }

    /// `A_ij`; zero when `i` and `j` share no hyperedge (and on the diagonal).
    pub fn weight(&self, i: NodeId, j: NodeId) -> u32 {
        match self.neighbors(i).binary_search(&j) {
            Ok(p) => self.weights(i)[p],
            Err(_) => 0,
        }
    }

    pub fn is_adjacent(&self, i: NodeId, j: NodeId) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// `d_N(i)`, the number of distinct neighbours.
    #[inline]
    pub fn degree(&self, i: NodeId) -> usize {
        let i = i as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_nodes() as NodeId).map(|i| self.degree(i)).collect()
    }

    /// `d_H(i)`, the number of hyperedges containing `i`.
    pub fn hyperdegree(&self, i: NodeId) -> u32 {
        self.hyperdegree[i as usize]
    }

    pub fn hyperdegrees(&self) -> &[u32] {
        &self.hyperdegree
    }

    /// `d_E(α)` for every hyperedge.
    pub fn edge_sizes(&self) -> &[u32] {
        &self.edge_size
    }

    /// `Σ_j A_ij`, the weighted 1-simplex count of `i`.
    pub fn weighted_degree(&self, i: NodeId) -> u64 {
        self.weighted_degree[i as usize]
    }

    pub fn weighted_degrees(&self) -> &[u64] {
        &self.weighted_degree
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn all_neighbors(&self) -> &[NodeId] {
        &self.neighbors
    }

    /// True when `Ã` has no cycle.
    pub fn is_forest(&self) -> bool {
        let n = self.num_nodes();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..n {
            for &j in self.neighbors(i as NodeId) {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    return false;
                }
                parent[ri] = rj;
            }
        }
        true
    }
}

/// Which hyperedges contribute 2-simplices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSimplexRule {
    /// Every 3-subset of every hyperedge.
    #[default]
    Containment,
    /// Only hyperedges of size exactly three.
    #[serde(rename = "size3only")]
    Size3Only,
}

impl std::str::FromStr for TwoSimplexRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "containment" => Ok(TwoSimplexRule::Containment),
            "size3only" => Ok(TwoSimplexRule::Size3Only),
            other => Err(Error::InvalidParameter(format!(
                "unknown two-simplex rule `{other}` (expected containment or size3only)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplexOptions {
    pub rule: TwoSimplexRule,
    /// Hyperedges larger than this contribute no triples and are tallied as skipped.
    pub max_hyperedge_size: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            rule: TwoSimplexRule::Containment,
            max_hyperedge_size: 25,
        }
    }
}

/// The weighted 2-simplex tensor `B` stored as canonical triples `i < k < l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSimplexSet {
    triples: Vec<[NodeId; 3]>,
    weights: Vec<u32>,
    node_offsets: Vec<usize>,
    node_triples: Vec<u32>,
    skipped_hyperedges: usize,
}

impl TwoSimplexSet {
    pub fn build(h: &Hypergraph, opts: &SimplexOptions) -> Self {
        let mut all: Vec<[NodeId; 3]> = Vec::new();
        let mut skipped = 0;
        for edge in h.hyperedges() {
            let s = edge.len();
            if s < 3 {
                continue;
            }
            match opts.rule {
                TwoSimplexRule::Size3Only if s != 3 => continue,
                TwoSimplexRule::Containment if s > opts.max_hyperedge_size => {
                    skipped += 1;
                    continue;
                }
                _ => {}
            }
            for a in 0..s {
                for b in a + 1..s {
                    for c in b + 1..s {
                        all.push([edge[a], edge[b], edge[c]]);
                    }
                }
            }
        }
        if skipped > 0 {
            log::warn!(
                "{skipped} hyperedge(s) larger than {} contribute no 2-simplices",
                opts.max_hyperedge_size
            );
        }
        all.sort_unstable();
        let mut triples = Vec::new();
        let mut weights = Vec::new();
        for t in all {
            if triples.last() == Some(&t) {
                *weights.last_mut().unwrap() += 1;
            } else {
                triples.push(t);
                weights.push(1);
            }
        }
        let n = h.num_nodes();
        let mut counts = vec![0usize; n + 1];
        for t in &triples {
            for &v in t {
                counts[v as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let node_offsets = counts;
        let mut fill = node_offsets.clone();
        let mut node_triples = vec![0u32; node_offsets[n]];
        for (idx, t) in triples.iter().enumerate() {
            for &v in t {
                node_triples[fill[v as usize]] = idx as u32;
                fill[v as usize] += 1;
            }
        }
        TwoSimplexSet {
            triples,
            weights,
            node_offsets,
            node_triples,
            skipped_hyperedges: skipped,
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[[NodeId; 3]] {
        &self.triples
    }

    pub fn triple(&self, t: u32) -> [NodeId; 3] {
        self.triples[t as usize]
    }

    /// `B_ikl` of triple `t`.
    pub fn weight(&self, t: u32) -> u32 {
        self.weights[t as usize]
    }

    /// `B_ikl` for arbitrary (unordered) members; zero when absent.
    pub fn weight_of(&self, a: NodeId, b: NodeId, c: NodeId) -> u32 {
        let mut key = [a, b, c];
        key.sort_unstable();
        match self.triples.binary_search(&key) {
            Ok(p) => self.weights[p],
            Err(_) => 0,
        }
    }

    /// Triple ids containing node `i`.
    pub fn triples_of(&self, i: NodeId) -> &[u32] {
        let i = i as usize;
        &self.node_triples[self.node_offsets[i]..self.node_offsets[i + 1]]
    }

    /// The two members of triple `t` other than `i`.
    #[inline]
    pub fn others(&self, t: u32, i: NodeId) -> (NodeId, NodeId) {
        let [a, b, c] = self.triples[t as usize];
        if a == i {
            (b, c)
        } else if b == i {
            (a, c)
        } else {
            (a, b)
        }
    }

    /// `Σ_{k<l} B_ikl` for node `i`.
    pub fn weighted_count(&self, i: NodeId) -> u64 {
        self.triples_of(i)
            .iter()
            .map(|&t| self.weights[t as usize] as u64)
            .sum()
    }

    pub fn skipped_hyperedges(&self) -> usize {
        self.skipped_hyperedges
    }
}

/// Directed links `i → j` for every `Ã_ij = 1`, numbered in `(i, j)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkIndex {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    sources: Vec<NodeId>,
    reverse: Vec<u32>,
}

impl LinkIndex {
    pub fn build(view: &AdjacencyView) -> Self {
        let offsets = view.offsets().to_vec();
        let targets = view.all_neighbors().to_vec();
        let n = view.num_nodes();
        let mut sources = Vec::with_capacity(targets.len());
        for i in 0..n {
            sources.extend(std::iter::repeat(i as NodeId).take(offsets[i + 1] - offsets[i]));
        }
        let reverse = (0..targets.len())
            .map(|id| {
                let (i, j) = (sources[id], targets[id] as usize);
                let row = &targets[offsets[j]..offsets[j + 1]];
                let p = row
                    .binary_search(&i)
                    .expect("adjacency is symmetric");
                (offsets[j] + p) as u32
            })
            .collect();
        LinkIndex {
            offsets,
            targets,
            sources,
            reverse,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `(i, j)` of link `id`.
    #[inline]
    pub fn endpoints(&self, id: u32) -> (NodeId, NodeId) {
        (self.sources[id as usize], self.targets[id as usize])
    }

    pub fn lookup(&self, i: NodeId, j: NodeId) -> Option<u32> {
        let (lo, hi) = (self.offsets[i as usize], self.offsets[i as usize + 1]);
        self.targets[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|p| (lo + p) as u32)
    }

    /// Link id of `j → i` given the id of `i → j`.
    #[inline]
    pub fn reverse(&self, id: u32) -> u32 {
        self.reverse[id as usize]
    }

    /// Ids of links `i → *`, contiguous.
    #[inline]
    pub fn out_links(&self, i: NodeId) -> std::ops::Range<u32> {
        self.offsets[i as usize] as u32..self.offsets[i as usize + 1] as u32
    }

    /// Ids of links `* → i`, ordered like `out_links(i)` (by source).
    pub fn in_links(&self, i: NodeId) -> impl Iterator<Item = u32> + '_ {
        self.out_links(i).map(move |id| self.reverse[id as usize])
    }
}

/// All views of one hypergraph, built once and shared read-only.
#[derive(Clone, Debug)]
pub struct Views {
    pub adjacency: AdjacencyView,
    pub simplices: TwoSimplexSet,
    pub links: LinkIndex,
}

impl Views {
    pub fn build(h: &Hypergraph, opts: &SimplexOptions) -> Self {
        let adjacency = AdjacencyView::build(h);
        let simplices = TwoSimplexSet::build(h, opts);
        let links = LinkIndex::build(&adjacency);
        Views {
            adjacency,
            simplices,
            links,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.num_nodes()
    }

    /// `(⟨k1⟩, ⟨k2⟩)`.
    pub fn densities(&self) -> (f64, f64) {
        simplex_densities(&self.adjacency, &self.simplices)
    }
}

/// Mean weighted 1-simplex count `⟨k1⟩ = mean_i Σ_j A_ij` and mean weighted
/// 2-simplex count `⟨k2⟩ = mean_i Σ_{k<l} B_ikl`.
pub fn simplex_densities(adj: &AdjacencyView, simplices: &TwoSimplexSet) -> (f64, f64) {
    let n = adj.num_nodes();
    if n == 0 {
        return (0.0, 0.0);
    }
    let k1: u64 = adj.weighted_degrees().iter().sum();
    let k2: u64 = simplices.weights.iter().map(|&w| 3 * w as u64).sum();
    (k1 as f64 / n as f64, k2 as f64 / n as f64)
}

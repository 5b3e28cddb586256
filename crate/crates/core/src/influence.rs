//! Collective influence and seed selection.
//!
//! The radius-1 collective influence of node `i` is
//!
//! ```text
//! CI₁(i) = (β₁γ)² Σ_{j ∈ N(i)} A_ij · z_i^j · (d_N(j) − 1),   z_i^j = Σ_{k ∈ N(j)} A_ik
//! ```
//!
//! CIA ranks nodes by `CI₁` once and walks the ranking, skipping any node
//! adjacent to an already chosen seed. Every ranking in this module breaks
//! ties by weighted degree `Σ_j A_ij` (descending) and then by node id
//! (ascending).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{AdjacencyView, NodeId};
use crate::rng::rng_from_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CiScores {
    pub scores: Vec<f64>,
    pub beta1: f64,
    pub gamma: f64,
    pub radius: u32,
}

impl CiScores {
    /// `node_id,score,rank` rows, rank 1 being the highest score.
    pub fn write_csv<W: Write>(&self, adj: &AdjacencyView, mut w: W) -> std::io::Result<()> {
        let order = ranking(&self.scores, adj);
        let mut rank = vec![0usize; order.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r + 1;
        }
        writeln!(w, "node_id,score,rank")?;
        for (v, s) in self.scores.iter().enumerate() {
            writeln!(w, "{v},{s},{}", rank[v])?;
        }
        Ok(())
    }
}

const PARALLEL_MIN_NODES: usize = 20_000;

/// Radius-1 collective influence of every node.
pub fn collective_influence(adj: &AdjacencyView, beta1: f64, gamma: f64) -> CiScores {
    let n = adj.num_nodes();
    let prefactor = (beta1 * gamma).powi(2);
    let score = |i: NodeId| {
        let (ni, wi) = (adj.neighbors(i), adj.weights(i));
        let mut total = 0u64;
        for (j, a_ij) in adj.row(i) {
            let excess = adj.degree(j) as u64 - 1;
            if excess == 0 {
                continue;
            }
            // z = Σ A_ik over common neighbours k, by merging the sorted rows
            let nj = adj.neighbors(j);
            let (mut x, mut y, mut z) = (0, 0, 0u64);
            while x < ni.len() && y < nj.len() {
                match ni[x].cmp(&nj[y]) {
                    Ordering::Less => x += 1,
                    Ordering::Greater => y += 1,
                    Ordering::Equal => {
                        z += wi[x] as u64;
                        x += 1;
                        y += 1;
                    }
                }
            }
            total += a_ij as u64 * z * excess;
        }
        prefactor * total as f64
    };
    // waking the pool costs more than scoring small inputs
    let scores = if n < PARALLEL_MIN_NODES || rayon::current_num_threads() == 1 {
        (0..n as NodeId).map(score).collect()
    } else {
        (0..n as NodeId)
            .into_par_iter()
            .with_min_len(1024)
            .map(score)
            .collect()
    };
    CiScores {
        scores,
        beta1,
        gamma,
        radius: 1,
    }
}

/// Total order: score descending, weighted degree descending, id ascending.
fn rank_cmp(scores: &[f64], adj: &AdjacencyView, a: NodeId, b: NodeId) -> Ordering {
    scores[b as usize]
        .total_cmp(&scores[a as usize])
        .then_with(|| adj.weighted_degree(b).cmp(&adj.weighted_degree(a)))
        .then_with(|| a.cmp(&b))
}

/// Every node, best first.
pub fn ranking(scores: &[f64], adj: &AdjacencyView) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..scores.len() as NodeId).collect();
    order.sort_by(|&a, &b| rank_cmp(scores, adj, a, b));
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cia,
    Degree,
    #[serde(rename = "hd")]
    Hyperdegree,
    CiNaive,
    Hadp,
    Hsdp,
    Random,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Cia,
        Method::Degree,
        Method::Hyperdegree,
        Method::CiNaive,
        Method::Hadp,
        Method::Hsdp,
        Method::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cia => "cia",
            Method::Degree => "degree",
            Method::Hyperdegree => "hd",
            Method::CiNaive => "ci_naive",
            Method::Hadp => "hadp",
            Method::Hsdp => "hsdp",
            Method::Random => "random",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Chosen spreaders in selection order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub nodes: Vec<NodeId>,
    pub method: Method,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `rank,node_id` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rank,node_id")?;
        for (r, v) in self.nodes.iter().enumerate() {
            writeln!(w, "{},{v}", r + 1)?;
        }
        Ok(())
    }
}

fn check_k(adj: &AdjacencyView, k: usize) -> Result<()> {
    if k > adj.num_nodes() {
        return Err(Error::TooManySeeds {
            k,
            available: adj.num_nodes(),
        });
    }
    Ok(())
}

/// Walks the CI ranking, discarding candidates adjacent to a chosen seed.
/// When the ranking runs out first, the discarded candidates are admitted in
/// rank order.
pub fn cia_select(adj: &AdjacencyView, scores: &CiScores, k: usize) -> Result<SeedSet> {
    check_k(adj, k)?;
    let order = ranking(&scores.scores, adj);
    let mut blocked = vec![false; adj.num_nodes()];
    let mut chosen = Vec::with_capacity(k);
    let mut discarded = Vec::new();
    for &v in &order {
        if chosen.len() == k {
            break;
        }
        if blocked[v as usize] {
            discarded.push(v);
            continue;
        }
        chosen.push(v);
        for &u in adj.neighbors(v) {
            blocked[u as usize] = true;
        }
    }
    chosen.extend(discarded.into_iter().take(k - chosen.len()));
    Ok(SeedSet {
        nodes: chosen,
        method: Method::Cia,
    })
}

fn top_k(adj: &AdjacencyView, scores: &[f64], k: usize) -> Vec<NodeId> {
    let mut order = ranking(scores, adj);
    order.truncate(k);
    order
}

/// `(d_H(i) − 1) · Σ_{j ∈ N(i)} (d_H(j) − 1)`.
pub fn naive_ci_scores(adj: &AdjacencyView) -> Vec<f64> {
    (0..adj.num_nodes() as NodeId)
        .map(|i| {
            let own = adj.hyperdegree(i).saturating_sub(1) as f64;
            let ball: u64 = adj
                .neighbors(i)
                .iter()
                .map(|&j| adj.hyperdegree(j).saturating_sub(1) as u64)
                .sum();
            own * ball as f64
        })
        .collect()
}

#[derive(PartialEq, Eq)]
struct HeapEntry {
    score: i64,
    weighted_degree: u64,
    node: NodeId,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .cmp(&other.score)
            .then(self.weighted_degree.cmp(&other.weighted_degree))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Adaptive degree pruning: repeatedly take the node with the largest current
/// degree, then lower each of its neighbours' degrees by `penalty(seed, nb)`.
fn adaptive_degree_select(
    adj: &AdjacencyView,
    k: usize,
    penalty: impl Fn(NodeId, NodeId) -> i64,
) -> Vec<NodeId> {
    let n = adj.num_nodes();
    let mut current: Vec<i64> = (0..n as NodeId).map(|i| adj.degree(i) as i64).collect();
    let mut selected = vec![false; n];
    let mut heap: BinaryHeap<HeapEntry> = (0..n as NodeId)
        .map(|i| HeapEntry {
            score: current[i as usize],
            weighted_degree: adj.weighted_degree(i),
            node: i,
        })
        .collect();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let Some(top) = heap.pop() else { break };
        let v = top.node as usize;
        if selected[v] || top.score != current[v] {
            continue;
        }
        selected[v] = true;
        out.push(top.node);
        for &u in adj.neighbors(top.node) {
            let uu = u as usize;
            if selected[uu] {
                continue;
            }
            current[uu] = (current[uu] - penalty(top.node, u)).max(0);
            heap.push(HeapEntry {
                score: current[uu],
                weighted_degree: adj.weighted_degree(u),
                node: u,
            });
        }
    }
    out
}

fn common_neighbors(adj: &AdjacencyView, a: NodeId, b: NodeId) -> usize {
    let (x, y) = (adj.neighbors(a), adj.neighbors(b));
    let (mut p, mut q, mut count) = (0, 0, 0);
    while p < x.len() && q < y.len() {
        match x[p].cmp(&y[q]) {
            Ordering::Less => p += 1,
            Ordering::Greater => q += 1,
            Ordering::Equal => {
                count += 1;
                p += 1;
                q += 1;
            }
        }
    }
    count
}

/// Seeds from one of the non-CI heuristics (or CIA with default scores).
pub fn baseline_select(
    adj: &AdjacencyView,
    k: usize,
    method: Method,
    rng_seed: u64,
) -> Result<SeedSet> {
    check_k(adj, k)?;
    let nodes = match method {
        Method::Cia => {
            return cia_select(adj, &collective_influence(adj, 1.0, 1.0), k);
        }
        Method::Degree => {
            let scores: Vec<f64> = adj.degrees().iter().map(|&d| d as f64).collect();
            top_k(adj, &scores, k)
        }
        Method::Hyperdegree => {
            let scores: Vec<f64> = adj.hyperdegrees().iter().map(|&d| d as f64).collect();
            top_k(adj, &scores, k)
        }
        Method::CiNaive => top_k(adj, &naive_ci_scores(adj), k),
        Method::Hadp => adaptive_degree_select(adj, k, |seed, nb| {
            common_neighbors(adj, seed, nb) as i64 + 1
        }),
        Method::Hsdp => adaptive_degree_select(adj, k, |_, _| 1),
        Method::Random => {
            let mut rng = rng_from_seed(rng_seed);
            index::sample(&mut rng, adj.num_nodes(), k)
                .into_iter()
                .map(|v| v as NodeId)
                .collect()
        }
    };
    Ok(SeedSet { nodes, method })
}

/// Any method; CIA uses `CI₁` at the given `β₁γ` (the ranking does not depend on it).
pub fn select_seeds(
    adj: &AdjacencyView,
    k: usize,
    method: Method,
    beta1: f64,
    gamma: f64,
    rng_seed: u64,
) -> Result<SeedSet> {
    match method {
        Method::Cia => cia_select(adj, &collective_influence(adj, beta1, gamma), k),
        other => baseline_select(adj, k, other, rng_seed),
    }
}

/// Number of nodes in the top `n_percent` (at least one).
pub fn top_count(num_nodes: usize, n_percent: f64) -> usize {
    ((n_percent / 100.0 * num_nodes as f64).ceil() as usize).clamp(1, num_nodes.max(1))
}

/// Probability that a uniformly chosen neighbour of a uniformly chosen top-`n%`
/// node (by `scores`) is itself in the top `n%`. Isolated top nodes are skipped.
pub fn top_overlap_probability(adj: &AdjacencyView, scores: &[f64], n_percent: f64) -> Result<f64> {
    if !(n_percent > 0.0 && n_percent <= 100.0) {
        return Err(Error::InvalidParameter(format!(
            "n_percent = {n_percent} must lie in (0, 100]"
        )));
    }
    let n = adj.num_nodes();
    if n == 0 {
        return Ok(0.0);
    }
    let top = top_count(n, n_percent);
    let order = ranking(scores, adj);
    let mut in_top = vec![false; n];
    for &v in &order[..top] {
        in_top[v as usize] = true;
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for &v in &order[..top] {
        let nb = adj.neighbors(v);
        if nb.is_empty() {
            continue;
        }
        let hits = nb.iter().filter(|&&u| in_top[u as usize]).count();
        total += hits as f64 / nb.len() as f64;
        counted += 1;
    }
    Ok(if counted == 0 {
        0.0
    } else {
        total / counted as f64
    })
}

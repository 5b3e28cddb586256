//! Synthetic hypergraphs: scale-free (Chung-Lu), bipartite Erdős-Rényi and
//! d-uniform.
//!
//! All generators are deterministic functions of their [`GenSpec`]: the seed
//! is part of the spec and every random draw comes from one ChaCha8 stream.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId};
use crate::rng::{rng_from_seed, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Hyperdegrees and hyperedge sizes drawn from `p(d) ∝ d^{-exponent}`.
    ScaleFree {
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_degree: Option<u32>,
        /// Defaults to `⌈√(N·M)⌉`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_degree: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_size: Option<u32>,
        /// Defaults to `min(N, ⌈√(N·M)⌉)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_size: Option<u32>,
    },
    /// Every node–hyperedge pair present independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// `M` distinct uniformly random `d`-subsets.
    DUniform { d: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    pub num_nodes: usize,
    pub num_hyperedges: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn scale_free(num_nodes: usize, num_hyperedges: usize, exponent: f64, seed: u64) -> Self {
        GenSpec {
            family: Family::ScaleFree {
                exponent,
                min_degree: None,
                max_degree: None,
                min_size: None,
                max_size: None,
            },
            num_nodes,
            num_hyperedges,
            seed,
        }
    }

    pub fn erdos_renyi(num_nodes: usize, num_hyperedges: usize, p: f64, seed: u64) -> Self {
        GenSpec {
            family: Family::ErdosRenyi { p },
            num_nodes,
            num_hyperedges,
            seed,
        }
    }

    pub fn d_uniform(num_nodes: usize, num_hyperedges: usize, d: usize, seed: u64) -> Self {
        GenSpec {
            family: Family::DUniform { d },
            num_nodes,
            num_hyperedges,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_nodes == 0 {
            return Err(Error::InvalidSpec("num_nodes must be positive".into()));
        }
        match self.family {
            Family::ScaleFree { exponent, .. } if !(exponent > 1.0) => Err(Error::InvalidSpec(
                format!("scale-free exponent must exceed 1, got {exponent}"),
            )),
            Family::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => Err(Error::InvalidSpec(
                format!("bipartite probability must lie in [0, 1], got {p}"),
            )),
            Family::DUniform { d } if d < 2 || d > self.num_nodes => Err(Error::InvalidSpec(
                format!("uniform size d = {d} must satisfy 2 <= d <= N = {}", self.num_nodes),
            )),
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Hypergraph> {
        self.validate()?;
        let h = match self.family {
            Family::ScaleFree { .. } => gen_sf_chunglu(self)?,
            Family::ErdosRenyi { .. } => gen_er_bipartite(self)?,
            Family::DUniform { .. } => gen_d_uniform(self)?,
        };
        Ok(h)
    }
}

/// `⌈√(N·M)⌉`, the structural cutoff used for scale-free sequences.
pub fn structural_cutoff(num_nodes: usize, num_hyperedges: usize) -> u32 {
    ((num_nodes as f64) * (num_hyperedges as f64)).sqrt().ceil() as u32
}

/// Bipartite probability giving `⟨d_N⟩ ≈ target` when every hyperedge is
/// small compared to `N` (`⟨d_N⟩ ≈ M·N·p²`).
pub fn er_probability_for_mean_degree(num_nodes: usize, num_hyperedges: usize, target: f64) -> f64 {
    (target / (num_nodes as f64 * num_hyperedges as f64)).sqrt().min(1.0)
}

/// Hyperedge count giving `⟨d_N⟩ ≈ target` for a sparse d-uniform hypergraph
/// (`⟨d_N⟩ ≈ M·d·(d − 1)/N`).
pub fn d_uniform_edges_for_mean_degree(num_nodes: usize, d: usize, target: f64) -> usize {
    (target * num_nodes as f64 / (d * (d - 1)) as f64).round() as usize
}

fn power_law_sampler(exponent: f64, min: u32, max: u32) -> Result<WeightedIndex<f64>> {
    let weights = (min..=max).map(|d| (d as f64).powf(-exponent));
    WeightedIndex::new(weights)
        .map_err(|e| Error::InvalidSpec(format!("power-law range [{min}, {max}]: {e}")))
}

/// Chung-Lu bipartite matching: node `i` joins hyperedge `α` with probability
/// `min(1, w_i·s_α / Σw)`, where `w` are the sampled hyperdegrees and `s` the
/// sampled sizes. Realised hyperedges of size below 2 are dropped.
pub fn gen_sf_chunglu(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let Family::ScaleFree {
        exponent,
        min_degree,
        max_degree,
        min_size,
        max_size,
    } = spec.family
    else {
        return Err(Error::InvalidSpec("expected a scale_free spec".into()));
    };
    let (n, m) = (spec.num_nodes, spec.num_hyperedges);
    let cutoff = structural_cutoff(n, m).max(1);
    let (dmin, dmax) = (min_degree.unwrap_or(1), max_degree.unwrap_or(cutoff));
    let (smin, smax) = (
        min_size.unwrap_or(1),
        max_size.unwrap_or(cutoff.min(n as u32)),
    );
    if dmin == 0 || dmin > dmax || smin == 0 || smin > smax {
        return Err(Error::InvalidSpec(format!(
            "degree range [{dmin}, {dmax}] and size range [{smin}, {smax}] must be non-empty and start at 1 or more"
        )));
    }
    if smax as usize > n {
        return Err(Error::Infeasible(format!(
            "maximum hyperedge size {smax} exceeds N = {n}"
        )));
    }
    let mut rng = rng_from_seed(spec.seed);
    let degree_dist = power_law_sampler(exponent, dmin, dmax)?;
    let size_dist = power_law_sampler(exponent, smin, smax)?;
    let degrees: Vec<f64> = (0..n)
        .map(|_| (dmin as usize + degree_dist.sample(&mut rng)) as f64)
        .collect();
    let sizes: Vec<f64> = (0..m)
        .map(|_| (smin as usize + size_dist.sample(&mut rng)) as f64)
        .collect();
    let total_degree: f64 = degrees.iter().sum();
    let total_size: f64 = sizes.iter().sum();
    let capacity = n as f64 * m as f64;
    if total_size > capacity || total_degree > capacity {
        return Err(Error::Infeasible(format!(
            "sampled stub totals (degrees {total_degree}, sizes {total_size}) exceed N·M = {capacity}"
        )));
    }

    // nodes by decreasing weight so membership probabilities are non-increasing
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| degrees[b].total_cmp(&degrees[a]).then(a.cmp(&b)));
    let sorted_w: Vec<f64> = order.iter().map(|&i| degrees[i]).collect();

    let mut hyperedges = Vec::with_capacity(m);
    for &s in &sizes {
        let scale = s / total_degree;
        let mut members: Vec<NodeId> = Vec::new();
        chung_lu_row(&sorted_w, scale, &mut rng, |pos| {
            members.push(order[pos] as NodeId)
        });
        if members.len() >= 2 {
            members.sort_unstable();
            hyperedges.push(members);
        }
    }
    Hypergraph::new(n, hyperedges)
}

/// Visits each position `i` of a non-increasing weight list independently
/// with probability `min(1, w_i·scale)`, skipping geometrically through
/// runs of rejections.
fn chung_lu_row(weights: &[f64], scale: f64, rng: &mut Rng, mut visit: impl FnMut(usize)) {
    let n = weights.len();
    let mut i = 0;
    let mut p = (weights.first().copied().unwrap_or(0.0) * scale).min(1.0);
    while i < n && p > 0.0 {
        if p < 1.0 {
            let u: f64 = rng.gen();
            let skip = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
            if !skip.is_finite() || skip >= (n - i) as f64 {
                break;
            }
            i += skip as usize;
        }
        let q = (weights[i] * scale).min(1.0);
        if rng.gen::<f64>() < q / p {
            visit(i);
        }
        p = q;
        i += 1;
    }
}

/// Indices `< n` hit by independent Bernoulli(`p`) trials, in increasing order.
fn bernoulli_positions(n: usize, p: f64, rng: &mut Rng, out: &mut Vec<NodeId>) {
    out.clear();
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        out.extend(0..n as NodeId);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut i: usize = 0;
    loop {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (n - i) as f64 {
            break;
        }
        i += skip as usize;
        out.push(i as NodeId);
        i += 1;
        if i >= n {
            break;
        }
    }
}

/// Bipartite Erdős-Rényi: `⟨d_H⟩ = M·p`, `⟨d_E⟩ = N·p`. Empty hyperedges are dropped.
pub fn gen_er_bipartite(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let Family::ErdosRenyi { p } = spec.family else {
        return Err(Error::InvalidSpec("expected an erdos_renyi spec".into()));
    };
    let mut rng = rng_from_seed(spec.seed);
    let mut buf = Vec::new();
    let mut hyperedges = Vec::new();
    for _ in 0..spec.num_hyperedges {
        bernoulli_positions(spec.num_nodes, p, &mut rng, &mut buf);
        if !buf.is_empty() {
            hyperedges.push(buf.clone());
        }
    }
    Hypergraph::new(spec.num_nodes, hyperedges)
}

fn binomial_saturating(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// `M` distinct uniformly random `d`-subsets of the node set.
pub fn gen_d_uniform(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let Family::DUniform { d } = spec.family else {
        return Err(Error::InvalidSpec("expected a d_uniform spec".into()));
    };
    let (n, m) = (spec.num_nodes, spec.num_hyperedges);
    let available = binomial_saturating(n, d);
    if m as u128 > available {
        return Err(Error::Infeasible(format!(
            "{m} distinct {d}-subsets requested but only {available} exist for N = {n}"
        )));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut seen: HashSet<Vec<NodeId>> = HashSet::with_capacity(m);
    let mut hyperedges = Vec::with_capacity(m);
    while hyperedges.len() < m {
        let mut edge: Vec<NodeId> = index::sample(&mut rng, n, d)
            .into_iter()
            .map(|v| v as NodeId)
            .collect();
        edge.sort_unstable();
        if seen.insert(edge.clone()) {
            hyperedges.push(edge);
        }
    }
    Hypergraph::new(n, hyperedges)
}

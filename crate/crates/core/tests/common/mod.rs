//! Independent reference implementations shared by the integration suites.
//! Nothing here calls into the optimised code paths it is compared against.
#![allow(dead_code)]

use std::collections::HashMap;

use hypercia::{Hypergraph, NodeId};
use rand::seq::index;
use rand::{Rng, SeedableRng};

/// Dense `A = I·Iᵀ − D`, built directly from the hyperedge lists.
pub fn dense_adjacency(h: &Hypergraph) -> Vec<Vec<u32>> {
    let n = h.num_nodes();
    let mut a = vec![vec![0u32; n]; n];
    for e in h.hyperedges() {
        for &x in e {
            for &y in e {
                if x != y {
                    a[x as usize][y as usize] += 1;
                }
            }
        }
    }
    a
}

/// Dense `B_ikl` (every ordering) counting hyperedges of size ≤ `max_size` that contain all three.
pub fn dense_triples(h: &Hypergraph, max_size: usize) -> Vec<Vec<Vec<u32>>> {
    let n = h.num_nodes();
    let mut b = vec![vec![vec![0u32; n]; n]; n];
    for e in h.hyperedges().iter().filter(|e| e.len() <= max_size) {
        for &x in e {
            for &y in e {
                for &z in e {
                    if x != y && y != z && x != z {
                        b[x as usize][y as usize][z as usize] += 1;
                    }
                }
            }
        }
    }
    b
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    /// 0 = S, 1 = I, 2 = R
    status: Vec<u8>,
    age: Vec<u32>,
}

/// Exact distribution of the final recovered count, by exhaustive enumeration
/// of every stochastic trajectory of the synchronous SIR chain.
pub fn exact_final_size(
    h: &Hypergraph,
    seeds: &[NodeId],
    beta1: f64,
    beta2: f64,
    gamma: u32,
) -> Vec<f64> {
    let n = h.num_nodes();
    let a = dense_adjacency(h);
    let b = dense_triples(h, 25);
    let mut start = Config {
        status: vec![0; n],
        age: vec![0; n],
    };
    for &s in seeds {
        start.status[s as usize] = 1;
    }
    let mut layer: HashMap<Config, f64> = HashMap::from([(start, 1.0)]);
    let mut out = vec![0.0; n + 1];
    while !layer.is_empty() {
        let mut next: HashMap<Config, f64> = HashMap::new();
        for (cfg, p) in layer {
            let infected: Vec<usize> = (0..n).filter(|&v| cfg.status[v] == 1).collect();
            if infected.is_empty() {
                out[cfg.status.iter().filter(|&&s| s == 2).count()] += p;
                continue;
            }
            // infection probability of every susceptible node
            let mut risk: Vec<(usize, f64)> = Vec::new();
            for i in (0..n).filter(|&v| cfg.status[v] == 0) {
                let pairs: u32 = infected.iter().map(|&j| a[i][j]).sum();
                let mut triples = 0u32;
                for (x, &k) in infected.iter().enumerate() {
                    for &l in &infected[x + 1..] {
                        triples += b[i][k][l];
                    }
                }
                let escape = (1.0 - beta1).powi(pairs as i32) * (1.0 - beta2).powi(triples as i32);
                if escape < 1.0 {
                    risk.push((i, 1.0 - escape));
                }
            }
            let mut base = cfg.clone();
            for &j in &infected {
                if base.age[j] + 1 >= gamma {
                    base.status[j] = 2;
                } else {
                    base.age[j] += 1;
                }
            }
            for mask in 0u32..(1 << risk.len()) {
                let mut q = p;
                let mut succ = base.clone();
                for (bit, &(i, r)) in risk.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        q *= r;
                        succ.status[i] = 1;
                        succ.age[i] = 0;
                    } else {
                        q *= 1.0 - r;
                    }
                }
                if q > 0.0 {
                    *next.entry(succ).or_insert(0.0) += q;
                }
            }
        }
        layer = next;
    }
    out
}

/// Upper-tail standard-normal equivalent of a chi-square statistic
/// (Wilson–Hilferty).
pub fn chi_square_z(stat: f64, dof: f64) -> f64 {
    let c = 2.0 / (9.0 * dof);
    ((stat / dof).powf(1.0 / 3.0) - (1.0 - c)) / c.sqrt()
}

/// Brute-force radius-1 collective influence with plain index loops.
pub fn brute_force_ci(h: &Hypergraph, beta1: f64, gamma: f64) -> Vec<f64> {
    let a = dense_adjacency(h);
    let n = h.num_nodes();
    let adjacent = |x: usize, y: usize| x != y && a[x][y] > 0;
    let degree: Vec<usize> = (0..n).map(|x| (0..n).filter(|&y| adjacent(x, y)).count()).collect();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for j in 0..n {
                if !adjacent(i, j) {
                    continue;
                }
                let mut z = 0.0;
                for k in 0..n {
                    if adjacent(j, k) {
                        z += a[i][k] as f64;
                    }
                }
                total += a[i][j] as f64 * z * (degree[j] as f64 - 1.0);
            }
            (beta1 * gamma).powi(2) * total
        })
        .collect()
}

/// Directed links `(i, j)` of the clique expansion, in lexicographic order.
pub fn directed_links(h: &Hypergraph) -> Vec<(usize, usize)> {
    let a = dense_adjacency(h);
    let n = h.num_nodes();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] > 0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Dense WNB matrix indexed by [`directed_links`].
pub fn dense_wnb(h: &Hypergraph, beta1: f64, gamma: f64) -> nalgebra::DMatrix<f64> {
    let a = dense_adjacency(h);
    let links = directed_links(h);
    let pos: HashMap<(usize, usize), usize> = links.iter().enumerate().map(|(p, &l)| (l, p)).collect();
    let mut c = nalgebra::DMatrix::zeros(links.len(), links.len());
    for (row, &(i, j)) in links.iter().enumerate() {
        for k in 0..h.num_nodes() {
            if k != j && k != i && a[i][k] > 0 {
                c[(row, pos[&(k, i)])] = beta1 * gamma * a[i][k] as f64;
            }
        }
    }
    c
}

pub fn dense_spectral_radius(c: &nalgebra::DMatrix<f64>) -> f64 {
    if c.nrows() == 0 {
        return 0.0;
    }
    // unbounded QR sweeps can stall on cycle-like matrices; retry under a
    // random orthogonal similarity, which keeps the spectrum
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut m = c.clone();
    loop {
        if let Some(s) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
            return s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let n = c.nrows();
        let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let q = g.qr().q();
        m = &q * c * q.transpose();
    }
}

/// `m` random hyperedges with sizes uniform in `2..=max_size` on `n` nodes.
pub fn random_hypergraph<R: Rng>(rng: &mut R, n: usize, m: usize, max_size: usize) -> Hypergraph {
    let edges = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=max_size.min(n));
            index::sample(rng, n, size)
                .into_iter()
                .map(|v| v as NodeId)
                .collect()
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

/// Every multiset of at most `max_edges` hyperedges (size ≥ 2) on `n` nodes,
/// one representative per isomorphism class.
pub fn small_hypergraph_classes(n: usize, max_edges: usize) -> Vec<Hypergraph> {
    let subsets: Vec<Vec<NodeId>> = (1u32..(1 << n))
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..n as NodeId).filter(|&v| m >> v & 1 == 1).collect())
        .collect();
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((from, chosen)) = stack.pop() {
        let edges: Vec<Vec<NodeId>> = chosen.iter().map(|&c| subsets[c].clone()).collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut relabelled: Vec<Vec<NodeId>> = edges
                    .iter()
                    .map(|e| {
                        let mut r: Vec<NodeId> = e.iter().map(|&v| p[v as usize]).collect();
                        r.sort_unstable();
                        r
                    })
                    .collect();
                relabelled.sort();
                relabelled
            })
            .min()
            .unwrap();
        if seen.insert(canon.clone()) {
            out.push(Hypergraph::new(n, canon).unwrap());
        }
        if chosen.len() < max_edges {
            for c in from..subsets.len() {
                let mut next = chosen.clone();
                next.push(c);
                stack.push((c, next));
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<NodeId>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (n - 1) as NodeId);
            out.push(q);
        }
    }
    out
}

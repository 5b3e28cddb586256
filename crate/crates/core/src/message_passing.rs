//! Cavity message passing for the simplicial SIR model and the weighted
//! non-backtracking (WNB) operator that governs the stability of its
//! infection-free fixed point.
//!
//! Messages live on directed links `i → j` ([`LinkIndex`](crate::LinkIndex)
//! order): `S_{i→j}`, `I_{i→j}`, `R_{i→j}` are the state probabilities of `i`
//! with `j` removed. One step is
//!
//! ```text
//! P_{i→j}    = ∏_{k≠j} (1 − β₁ I_{k→i})^{A_ik} · ∏_{(i,m,l): m,l≠j} (1 − β₂ I_{m→i} I_{l→i})^{B_iml}
//! S_{i→j}'   = S_{i→j} · P_{i→j}
//! I_{i→j}'   = S_{i→j} · (1 − P_{i→j}) + I_{i→j} · (1 − 1/γ)
//! R_{i→j}'   = R_{i→j} + I_{i→j} / γ
//! ```
//!
//! Linearising the self-consistent form `I = γ S (1 − P)` around `(S, I) = (1, 0)`
//! gives `∂I_{i→j}/∂I_{k→i} = β₁ γ A_ik` for `k ≠ j`: the WNB matrix `C`.
//! The 2-simplex terms are quadratic in `I` and drop out, so `C` does not
//! depend on `β₂`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{NodeId, Views};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpParams {
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
}

impl MpParams {
    pub fn new(beta1: f64, beta2: f64, gamma: f64) -> Self {
        MpParams { beta1, beta2, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta1) || !(0.0..=1.0).contains(&self.beta2) {
            return Err(Error::InvalidParameter(format!(
                "infection probabilities ({}, {}) must lie in [0, 1]",
                self.beta1, self.beta2
            )));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {} must be at least 1",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Cavity messages on every directed link plus the node marginals evolved
/// alongside them.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageState {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub node_s: Vec<f64>,
    pub node_i: Vec<f64>,
    pub node_r: Vec<f64>,
    pub t: usize,
}

impl MessageState {
    /// `I_{i→j}(0) = 1` for seeds `i`, every other message fully susceptible.
    pub fn seeded(views: &Views, seeds: &[NodeId]) -> Result<Self> {
        let n = views.num_nodes();
        let links = views.links.len();
        let mut state = MessageState {
            s: vec![1.0; links],
            i: vec![0.0; links],
            r: vec![0.0; links],
            node_s: vec![1.0; n],
            node_i: vec![0.0; n],
            node_r: vec![0.0; n],
            t: 0,
        };
        for &seed in seeds {
            if seed as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "seed {seed} outside 0..{n}"
                )));
            }
            state.node_s[seed as usize] = 0.0;
            state.node_i[seed as usize] = 1.0;
            for id in views.links.out_links(seed) {
                state.s[id as usize] = 0.0;
                state.i[id as usize] = 1.0;
            }
        }
        Ok(state)
    }

    pub fn num_links(&self) -> usize {
        self.s.len()
    }

    /// Largest `|s + i + r − 1|` over links.
    pub fn normalization_error(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.i)
            .zip(&self.r)
            .map(|((s, i), r)| (s + i + r - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-node `(S, I, R)` marginals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeMarginal {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

/// Escape products for node `i`: the cavity product for each out-link
/// `i → nb[q]` written to `cavity[q]`, and the full product returned.
fn node_products(
    views: &Views,
    params: &MpParams,
    infected: &[f64],
    node: NodeId,
    factors: &mut Vec<f64>,
    triples: &mut Vec<(usize, usize, f64)>,
    cavity: &mut [f64],
) -> f64 {
    let adj = &views.adjacency;
    let links = &views.links;
    let nb = adj.neighbors(node);
    let w = adj.weights(node);

    factors.clear();
    for (q, in_id) in links.in_links(node).enumerate() {
        let x = infected[in_id as usize];
        factors.push((1.0 - params.beta1 * x).powi(w[q] as i32));
    }

    triples.clear();
    if params.beta2 > 0.0 {
        let simplices = &views.simplices;
        for &t in simplices.triples_of(node) {
            let (m, l) = simplices.others(t, node);
            let pm = nb.binary_search(&m).expect("triple members are neighbours");
            let pl = nb.binary_search(&l).expect("triple members are neighbours");
            let xm = infected[links.reverse(links.out_links(node).start + pm as u32) as usize];
            let xl = infected[links.reverse(links.out_links(node).start + pl as u32) as usize];
            let f = (1.0 - params.beta2 * xm * xl).powi(simplices.weight(t) as i32);
            triples.push((pm, pl, f));
        }
    }

    for (q, slot) in cavity.iter_mut().enumerate() {
        let mut p = 1.0;
        for (q2, f) in factors.iter().enumerate() {
            if q2 != q {
                p *= f;
            }
        }
        for &(pm, pl, f) in triples.iter() {
            if pm != q && pl != q {
                p *= f;
            }
        }
        *slot = p;
    }
    factors.iter().product::<f64>() * triples.iter().map(|t| t.2).product::<f64>()
}

/// Cavity products `P_{i→j}` per link and full products `P_i` per node.
fn all_products(views: &Views, params: &MpParams, infected: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = views.num_nodes();
    let mut cavity = vec![1.0; views.links.len()];
    let mut full = vec![1.0; n];
    let mut factors = Vec::new();
    let mut triples = Vec::new();
    for node in 0..n as NodeId {
        let range = views.links.out_links(node);
        full[node as usize] = node_products(
            views,
            params,
            infected,
            node,
            &mut factors,
            &mut triples,
            &mut cavity[range.start as usize..range.end as usize],
        );
    }
    (cavity, full)
}

/// One synchronous update of every message and node marginal.
pub fn mp_step(state: &MessageState, views: &Views, params: &MpParams) -> MessageState {
    let (cavity, full) = all_products(views, params, &state.i);
    let retain = 1.0 - 1.0 / params.gamma;
    let inv_gamma = 1.0 / params.gamma;
    let mut next = state.clone();
    for (id, &p) in cavity.iter().enumerate() {
        let (s, i) = (state.s[id], state.i[id]);
        next.s[id] = s * p;
        next.i[id] = s * (1.0 - p) + i * retain;
        next.r[id] = state.r[id] + i * inv_gamma;
    }
    for (v, &p) in full.iter().enumerate() {
        let (s, i) = (state.node_s[v], state.node_i[v]);
        next.node_s[v] = s * p;
        next.node_i[v] = s * (1.0 - p) + i * retain;
        next.node_r[v] = state.node_r[v] + i * inv_gamma;
    }
    next.t = state.t + 1;
    next
}

/// Right-hand sides of the self-consistent equations,
/// `(S·P, γ·S·(1 − P))` per link.
pub fn fixed_point_map(state: &MessageState, views: &Views, params: &MpParams) -> (Vec<f64>, Vec<f64>) {
    let (cavity, _) = all_products(views, params, &state.i);
    let s_rhs = cavity.iter().zip(&state.s).map(|(p, s)| s * p).collect();
    let i_rhs = cavity
        .iter()
        .zip(&state.s)
        .map(|(p, s)| params.gamma * s * (1.0 - p))
        .collect();
    (s_rhs, i_rhs)
}

/// Largest violations of the two self-consistent equations at `state`.
pub fn self_consistency_residuals(state: &MessageState, views: &Views, params: &MpParams) -> (f64, f64) {
    let (s_rhs, i_rhs) = fixed_point_map(state, views, params);
    let rs = s_rhs
        .iter()
        .zip(&state.s)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ri = i_rhs
        .iter()
        .zip(&state.i)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (rs, ri)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpSolution {
    pub state: MessageState,
    pub converged: bool,
    pub iterations: usize,
    /// Largest per-entry change in the final iteration.
    pub max_change: f64,
    pub s_residual: f64,
    pub i_residual: f64,
}

/// Iterates [`mp_step`] from the seeded state until no message or marginal
/// moves by more than `tol`.
pub fn mp_solve(
    views: &Views,
    params: &MpParams,
    seeds: &[NodeId],
    tol: f64,
    max_iters: usize,
) -> Result<MpSolution> {
    params.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let mut state = MessageState::seeded(views, seeds)?;
    let mut max_change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters {
        let next = mp_step(&state, views, params);
        iterations += 1;
        max_change = max_abs_diff(&state, &next);
        state = next;
        if max_change < tol {
            break;
        }
    }
    let converged = max_change < tol;
    if !converged {
        log::warn!("message passing did not converge in {max_iters} iterations (change {max_change:e})");
    }
    let (s_residual, i_residual) = self_consistency_residuals(&state, views, params);
    Ok(MpSolution {
        state,
        converged,
        iterations,
        max_change,
        s_residual,
        i_residual,
    })
}

fn max_abs_diff(a: &MessageState, b: &MessageState) -> f64 {
    let pairs = [
        (&a.s, &b.s),
        (&a.i, &b.i),
        (&a.r, &b.r),
        (&a.node_s, &b.node_s),
        (&a.node_i, &b.node_i),
        (&a.node_r, &b.node_r),
    ];
    pairs
        .iter()
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

pub fn node_marginals(state: &MessageState) -> Vec<NodeMarginal> {
    (0..state.node_s.len())
        .map(|v| NodeMarginal {
            s: state.node_s[v],
            i: state.node_i[v],
            r: state.node_r[v],
        })
        .collect()
}

/// `Σ_i R_i`, the expected final outbreak size predicted by message passing.
pub fn expected_outbreak(state: &MessageState) -> f64 {
    state.node_r.iter().sum()
}

/// Sparse WNB matrix `C = β₁γ·N_w` over directed links.
///
/// Row `i → j` holds `A_ik` at column `k → i` for every neighbour `k ≠ j`
/// of `i`; `N_w` is that skeleton and `scale = β₁γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WnbOperator {
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    skeleton: Vec<f64>,
    scale: f64,
    acyclic: bool,
}

/// Row-parallel mat-vec is reduction-order identical to the sequential one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyMode {
    #[default]
    Sequential,
    Parallel,
}

impl WnbOperator {
    /// The operator at `β₁γ = 1`.
    pub fn skeleton(views: &Views) -> Self {
        let adj = &views.adjacency;
        let links = &views.links;
        let mut row_offsets = Vec::with_capacity(links.len() + 1);
        row_offsets.push(0);
        let mut cols = Vec::new();
        let mut skeleton = Vec::new();
        for row in 0..links.len() as u32 {
            let (i, j) = links.endpoints(row);
            let nb = adj.neighbors(i);
            let w = adj.weights(i);
            for (q, in_id) in links.in_links(i).enumerate() {
                if nb[q] == j {
                    continue;
                }
                cols.push(in_id);
                skeleton.push(w[q] as f64);
            }
            row_offsets.push(cols.len());
        }
        WnbOperator {
            row_offsets,
            cols,
            skeleton,
            scale: 1.0,
            acyclic: adj.is_forest(),
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn dim(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// `β₁γ`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True when the underlying binary graph is a forest, in which case the
    /// operator is nilpotent.
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.skeleton[range].iter().map(move |&v| v * self.scale))
    }

    /// `(row, col, value)` for every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u32, f64)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn entry(&self, row: usize, col: u32) -> f64 {
        self.row(row)
            .find(|&(c, _)| c == col)
            .map_or(0.0, |(_, v)| v)
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in self.row_offsets[r]..self.row_offsets[r + 1] {
            acc += self.skeleton[k] * x[self.cols[k] as usize];
        }
        acc * self.scale
    }

    /// `out = C·x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64], mode: ApplyMode) {
        match mode {
            ApplyMode::Sequential => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = self.row_dot(r, x);
                }
            }
            ApplyMode::Parallel => {
                out.par_iter_mut()
                    .enumerate()
                    .for_each(|(r, o)| *o = self.row_dot(r, x));
            }
        }
    }

    /// Coordinate text dump, one `row col value` line per entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# wnb operator dim={} nnz={} scale={}", self.dim(), self.nnz(), self.scale)?;
        for (r, c, v) in self.entries() {
            writeln!(w, "{r} {c} {v:e}")?;
        }
        Ok(())
    }
}

/// `C = β₁γ·N_w`. Any `β₂` is irrelevant.
pub fn build_wnb(views: &Views, beta1: f64, gamma: f64) -> WnbOperator {
    WnbOperator::skeleton(views).scaled(beta1 * gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerOptions {
    /// Stop when successive eigenvalue estimates differ by less than `tol·max(1, λ)`.
    pub tol: f64,
    /// ... and `‖Cv − λv‖₁ ≤ residual_tol·max(1, λ)`.
    pub residual_tol: f64,
    pub max_iters: usize,
    pub mode: ApplyMode,
    pub record_trace: bool,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            residual_tol: 1e-9,
            max_iters: 100_000,
            mode: ApplyMode::Sequential,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Leading eigenvalue `λ_C`.
    pub lambda: f64,
    /// Non-negative leading eigenvector, unit 1-norm.
    pub eigvec: Vec<f64>,
    pub iterations: usize,
    /// `‖Cv − λv‖₁` for the returned pair.
    pub residual: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<f64>,
}

/// Leading eigenpair by power iteration from the all-ones vector.
///
/// Iterates `C + sI` with `s` the mean row sum of `C`: the Perron root of a
/// non-negative matrix becomes strictly dominant in modulus, so periodic
/// structures (bare cycles) converge instead of oscillating. The reported
/// eigenvalue is the 1-norm growth `‖Cv‖₁` of the normalised iterate.
pub fn leading_eigen(op: &WnbOperator, opts: &PowerOptions) -> SpectralResult {
    let n = op.dim();
    if n == 0 {
        return SpectralResult {
            lambda: 0.0,
            eigvec: Vec::new(),
            iterations: 0,
            residual: 0.0,
            converged: true,
            trace: Vec::new(),
        };
    }
    if op.nnz() == 0 || op.scale == 0.0 || op.acyclic {
        return nilpotent_result(op, opts);
    }

    let mut v = vec![1.0 / n as f64; n];
    let mut cv = vec![0.0; n];
    let ones = vec![1.0; n];
    op.apply(&ones, &mut cv, opts.mode);
    let shift = cv.iter().sum::<f64>() / n as f64;

    let mut lambda_prev = f64::INFINITY;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut lambda = 0.0;
    for it in 1..=opts.max_iters {
        op.apply(&v, &mut cv, opts.mode);
        lambda = cv.iter().sum::<f64>();
        residual = cv.iter().zip(&v).map(|(c, x)| (c - lambda * x).abs()).sum();
        if opts.record_trace {
            trace.push(lambda);
        }
        let scale = lambda.max(1.0);
        if (lambda - lambda_prev).abs() < opts.tol * scale && residual <= opts.residual_tol * scale {
            return SpectralResult {
                lambda,
                eigvec: v,
                iterations: it,
                residual,
                converged: true,
                trace,
            };
        }
        lambda_prev = lambda;
        let norm = lambda + shift;
        for (x, c) in v.iter_mut().zip(&cv) {
            *x = (c + shift * *x) / norm;
        }
    }
    log::warn!("power iteration stopped at {} iterations (residual {residual:e})", opts.max_iters);
    SpectralResult {
        lambda,
        eigvec: v,
        iterations: opts.max_iters,
        residual,
        converged: false,
        trace,
    }
}

/// `λ = 0` with a kernel vector: the last non-zero iterate of `C^t·1`.
fn nilpotent_result(op: &WnbOperator, opts: &PowerOptions) -> SpectralResult {
    let n = op.dim();
    let mut v = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    if op.scale != 0.0 {
        for _ in 0..=n {
            op.apply(&v, &mut next, opts.mode);
            iterations += 1;
            if next.iter().all(|&x| x == 0.0) {
                break;
            }
            std::mem::swap(&mut v, &mut next);
        }
    }
    let norm: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= norm);
    op.apply(&v, &mut next, opts.mode);
    let residual = next.iter().map(|x| x.abs()).sum();
    SpectralResult {
        lambda: 0.0,
        eigvec: v,
        iterations,
        residual,
        converged: residual == 0.0,
        trace: Vec::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Spectral radius `ρ(N_w)` of the skeleton.
    pub skeleton_radius: f64,
    /// `1 / (γ·ρ)`; infinite on forests.
    #[serde(with = "infinite_as_null")]
    pub beta1_star: f64,
    pub converged: bool,
}

/// Smallest `β₁` at which the infection-free fixed point loses stability.
pub fn critical_beta1(views: &Views, gamma: f64, opts: &PowerOptions) -> CriticalPoint {
    let res = leading_eigen(&WnbOperator::skeleton(views), opts);
    let rho = res.lambda;
    CriticalPoint {
        skeleton_radius: rho,
        beta1_star: if rho > 0.0 {
            1.0 / (gamma * rho)
        } else {
            f64::INFINITY
        },
        converged: res.converged,
    }
}

/// Serialises non-finite floats as `null` (JSON has no infinity).
pub(crate) mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

//! Discrete-time SIR on the simplicial contagion model.
//!
//! Each step is synchronous. A susceptible node `i` escapes infection with
//! probability
//!
//! ```text
//! ∏_{j ∈ I} (1 − β₁)^{A_ij} · ∏_{(i,k,l): k,l ∈ I} (1 − β₂)^{B_ikl}
//! ```
//!
//! evaluated on the states at time `t`. Infected nodes recover
//! deterministically `γ` steps after infection.

use std::io::Write;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{NodeId, Views};
use crate::rng::{stream_rng, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    pub beta1: f64,
    pub beta2: f64,
    /// Infectious period in steps.
    pub gamma: u32,
    /// Step cap; `None` means `10·N`.
    #[serde(default)]
    pub t_max: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl EpidemicParams {
    pub fn new(beta1: f64, beta2: f64, gamma: u32, seed: u64) -> Self {
        EpidemicParams {
            beta1,
            beta2,
            gamma,
            t_max: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {b} must lie in [0, 1]"
                )));
            }
        }
        if self.gamma == 0 {
            return Err(Error::InvalidParameter("gamma must be at least 1".into()));
        }
        Ok(())
    }

    fn step_cap(&self, num_nodes: usize) -> usize {
        self.t_max.unwrap_or(10 * num_nodes.max(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Susceptible,
    Infected,
    Recovered,
}

/// Per-node status, infection age and the step clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpidemicState {
    status: Vec<Status>,
    age: Vec<u32>,
    infected: Vec<NodeId>,
    t: usize,
}

impl EpidemicState {
    /// `seeds` infected with age 0, everyone else susceptible.
    pub fn seeded(num_nodes: usize, seeds: &[NodeId]) -> Result<Self> {
        let mut status = vec![Status::Susceptible; num_nodes];
        let mut infected = Vec::with_capacity(seeds.len());
        for &s in seeds {
            let slot = status.get_mut(s as usize).ok_or_else(|| {
                Error::InvalidParameter(format!("seed {s} outside 0..{num_nodes}"))
            })?;
            if *slot == Status::Infected {
                return Err(Error::InvalidParameter(format!("seed {s} listed twice")));
            }
            *slot = Status::Infected;
            infected.push(s);
        }
        Ok(EpidemicState {
            status,
            age: vec![0; num_nodes],
            infected,
            t: 0,
        })
    }

    pub fn status(&self, i: NodeId) -> Status {
        self.status[i as usize]
    }

    pub fn statuses(&self) -> &[Status] {
        &self.status
    }

    /// Steps since infection; meaningful for infected nodes only.
    pub fn age(&self, i: NodeId) -> u32 {
        self.age[i as usize]
    }

    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn is_absorbed(&self) -> bool {
        self.infected.is_empty()
    }

    /// `(#S, #I, #R)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        let r = self
            .status
            .iter()
            .filter(|&&s| s == Status::Recovered)
            .count();
        let i = self.infected.len();
        (self.status.len() - i - r, i, r)
    }

    pub fn num_recovered(&self) -> usize {
        self.counts().2
    }
}

/// Reusable scratch space for stepping one trajectory at a time.
pub struct Simulator<'a> {
    views: &'a Views,
    params: EpidemicParams,
    pair_exposure: Vec<u32>,
    triple_exposure: Vec<u32>,
    touched: Vec<NodeId>,
    next_infected: Vec<NodeId>,
}

impl<'a> Simulator<'a> {
    pub fn new(views: &'a Views, params: EpidemicParams) -> Result<Self> {
        params.validate()?;
        let n = views.num_nodes();
        Ok(Simulator {
            views,
            params,
            pair_exposure: vec![0; n],
            triple_exposure: vec![0; n],
            touched: Vec::new(),
            next_infected: Vec::new(),
        })
    }

    /// Advances `state` by one synchronous step.
    pub fn step(&mut self, state: &mut EpidemicState, rng: &mut Rng) {
        let adj = &self.views.adjacency;
        let simplices = &self.views.simplices;
        let status = &state.status;
        self.touched.clear();

        for &j in &state.infected {
            for (i, w) in adj.row(j) {
                let iu = i as usize;
                if status[iu] != Status::Susceptible {
                    continue;
                }
                if self.pair_exposure[iu] == 0 && self.triple_exposure[iu] == 0 {
                    self.touched.push(i);
                }
                self.pair_exposure[iu] += w;
            }
            if self.params.beta2 > 0.0 {
                for &t in simplices.triples_of(j) {
                    let (a, b) = simplices.others(t, j);
                    let (sa, sb) = (status[a as usize], status[b as usize]);
                    // credit each fully infected pair once, from its lower member
                    let target = match (sa, sb) {
                        (Status::Susceptible, Status::Infected) if j < b => a,
                        (Status::Infected, Status::Susceptible) if j < a => b,
                        _ => continue,
                    };
                    let tu = target as usize;
                    if self.pair_exposure[tu] == 0 && self.triple_exposure[tu] == 0 {
                        self.touched.push(target);
                    }
                    self.triple_exposure[tu] += simplices.weight(t);
                }
            }
        }

        let (q1, q2) = (1.0 - self.params.beta1, 1.0 - self.params.beta2);
        self.next_infected.clear();
        for &i in &self.touched {
            let iu = i as usize;
            let escape = q1.powi(self.pair_exposure[iu] as i32)
                * q2.powi(self.triple_exposure[iu] as i32);
            self.pair_exposure[iu] = 0;
            self.triple_exposure[iu] = 0;
            if rng.gen::<f64>() >= escape {
                self.next_infected.push(i);
            }
        }

        let gamma = self.params.gamma;
        let status = &mut state.status;
        let age = &mut state.age;
        state.infected.retain(|&j| {
            let ju = j as usize;
            if age[ju] + 1 >= gamma {
                status[ju] = Status::Recovered;
                false
            } else {
                age[ju] += 1;
                true
            }
        });
        for &i in &self.next_infected {
            status[i as usize] = Status::Infected;
            age[i as usize] = 0;
            state.infected.push(i);
        }
        state.t += 1;
    }

    /// Steps until absorption or the step cap; returns whether it absorbed.
    pub fn run_to_end(&mut self, state: &mut EpidemicState, rng: &mut Rng) -> bool {
        let cap = self.params.step_cap(self.views.num_nodes());
        while !state.is_absorbed() && state.t < cap {
            self.step(state, rng);
        }
        state.is_absorbed()
    }
}

/// One synchronous step from `state`, returning the successor.
pub fn step(
    state: &EpidemicState,
    views: &Views,
    params: &EpidemicParams,
    rng: &mut Rng,
) -> Result<EpidemicState> {
    let mut sim = Simulator::new(views, *params)?;
    let mut next = state.clone();
    sim.step(&mut next, rng);
    Ok(next)
}

/// Monte-Carlo outbreak sizes from one seed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutbreakStats {
    pub runs: usize,
    pub sigma_mean: f64,
    pub sigma_std: f64,
    /// Final recovered count per run.
    pub sigma_samples: Vec<usize>,
    pub absorbed: Vec<bool>,
    pub non_absorbed: usize,
    /// Node count of the simulated (giant-component) hypergraph.
    pub gcc_size: usize,
    pub fraction_of_gcc: f64,
}

impl OutbreakStats {
    pub fn from_samples(samples: Vec<usize>, absorbed: Vec<bool>, gcc_size: usize) -> Self {
        let runs = samples.len();
        let mean = samples.iter().sum::<usize>() as f64 / runs.max(1) as f64;
        let var = if runs > 1 {
            samples
                .iter()
                .map(|&s| (s as f64 - mean).powi(2))
                .sum::<f64>()
                / (runs - 1) as f64
        } else {
            0.0
        };
        let non_absorbed = absorbed.iter().filter(|&&a| !a).count();
        OutbreakStats {
            runs,
            sigma_mean: mean,
            sigma_std: var.sqrt(),
            sigma_samples: samples,
            absorbed,
            non_absorbed,
            gcc_size,
            fraction_of_gcc: if gcc_size > 0 {
                mean / gcc_size as f64
            } else {
                0.0
            },
        }
    }

    /// `run_id,sigma,absorbed` rows.
    pub fn write_runs_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "run_id,sigma,absorbed")?;
        for (run, (s, a)) in self.sigma_samples.iter().zip(&self.absorbed).enumerate() {
            writeln!(w, "{run},{s},{a}")?;
        }
        Ok(())
    }

    /// JSON summary without the per-run vectors.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "runs": self.runs,
            "sigma_mean": self.sigma_mean,
            "sigma_std": self.sigma_std,
            "non_absorbed": self.non_absorbed,
            "gcc_size": self.gcc_size,
            "fraction_of_gcc": self.fraction_of_gcc,
        })
    }
}

/// `runs` independent trajectories from `seeds`; run `r` uses stream `r` of
/// `params.seed`, so results do not depend on thread scheduling.
pub fn run_sir(
    views: &Views,
    seeds: &[NodeId],
    params: &EpidemicParams,
    runs: usize,
) -> Result<OutbreakStats> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    params.validate()?;
    let n = views.num_nodes();
    let initial = EpidemicState::seeded(n, seeds)?;
    let outcomes: Vec<(usize, bool)> = (0..runs)
        .into_par_iter()
        .map_init(
            || Simulator::new(views, *params).expect("validated above"),
            |sim, run| {
                let mut rng = stream_rng(params.seed, run as u64);
                let mut state = initial.clone();
                let absorbed = sim.run_to_end(&mut state, &mut rng);
                (state.num_recovered(), absorbed)
            },
        )
        .collect();
    let (samples, absorbed) = outcomes.into_iter().unzip();
    Ok(OutbreakStats::from_samples(samples, absorbed, n))
}

/// Like [`run_sir`], but every run starts from its own `k` distinct seeds drawn
/// uniformly from its stream before the dynamics begin.
pub fn run_sir_random_seeds(
    views: &Views,
    k: usize,
    params: &EpidemicParams,
    runs: usize,
) -> Result<OutbreakStats> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    params.validate()?;
    let n = views.num_nodes();
    if k == 0 || k > n {
        return Err(Error::TooManySeeds { k, available: n });
    }
    let outcomes: Vec<(usize, bool)> = (0..runs)
        .into_par_iter()
        .map_init(
            || Simulator::new(views, *params).expect("validated above"),
            |sim, run| {
                let mut rng = stream_rng(params.seed, run as u64);
                let seeds: Vec<NodeId> = index::sample(&mut rng, n, k)
                    .into_iter()
                    .map(|v| v as NodeId)
                    .collect();
                let mut state = EpidemicState::seeded(n, &seeds).expect("seeds in range");
                let absorbed = sim.run_to_end(&mut state, &mut rng);
                (state.num_recovered(), absorbed)
            },
        )
        .collect();
    let (samples, absorbed) = outcomes.into_iter().unzip();
    Ok(OutbreakStats::from_samples(samples, absorbed, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledParams {
    pub beta1: f64,
    pub beta2: f64,
    pub clamped: bool,
}

/// `β₁ = λ₁·μ/⟨k1⟩`, `β₂ = λ₂·μ/⟨k2⟩` with `μ = 1/γ`, clamped to `[0, 1]`.
pub fn rescale_with_densities(
    lambda1: f64,
    lambda2: f64,
    k1_mean: f64,
    k2_mean: f64,
    gamma: u32,
) -> Result<RescaledParams> {
    if gamma == 0 {
        return Err(Error::InvalidParameter("gamma must be at least 1".into()));
    }
    if lambda1 < 0.0 || lambda2 < 0.0 {
        return Err(Error::InvalidParameter(
            "rescaled infectivities must be non-negative".into(),
        ));
    }
    let mu = 1.0 / gamma as f64;
    let beta1 = if lambda1 == 0.0 {
        0.0
    } else if k1_mean > 0.0 {
        lambda1 * mu / k1_mean
    } else {
        return Err(Error::InvalidParameter(
            "<k1> = 0: no 1-simplices to rescale against".into(),
        ));
    };
    let beta2 = if lambda2 == 0.0 {
        0.0
    } else if k2_mean > 0.0 {
        lambda2 * mu / k2_mean
    } else {
        return Err(Error::NoTwoSimplices { lambda2 });
    };
    let clamped = beta1 > 1.0 || beta2 > 1.0;
    if clamped {
        log::warn!("rescaled infectivities ({beta1}, {beta2}) clamped to [0, 1]");
    }
    Ok(RescaledParams {
        beta1: beta1.min(1.0),
        beta2: beta2.min(1.0),
        clamped,
    })
}

pub fn rescale_params(lambda1: f64, lambda2: f64, views: &Views, gamma: u32) -> Result<RescaledParams> {
    let (k1, k2) = views.densities();
    rescale_with_densities(lambda1, lambda2, k1, k2, gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bistability {
    pub absorbing_fraction: f64,
    pub endemic_fraction: f64,
}

/// A run is absorbing when its final size is below `threshold_fraction` of the GCC.
pub fn classify_bistable(stats: &OutbreakStats, threshold_fraction: f64) -> Bistability {
    let cut = threshold_fraction * stats.gcc_size as f64;
    let absorbing = stats
        .sigma_samples
        .iter()
        .filter(|&&s| (s as f64) < cut)
        .count();
    let runs = stats.runs.max(1) as f64;
    let absorbing_fraction = absorbing as f64 / runs;
    Bistability {
        absorbing_fraction,
        endemic_fraction: 1.0 - absorbing_fraction,
    }
}

pub const DEFAULT_ABSORBING_THRESHOLD: f64 = 0.05;

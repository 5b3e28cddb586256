//! Experiment pipelines behind the command-line tool.
//!
//! Each pipeline takes a JSON-deserialisable config, works on the giant
//! component of its input hypergraph and writes CSV/JSON files with
//! provenance records (see [`crate::output`]). The in-memory halves
//! ([`run_cells`], [`bench_rows`], ...) are exposed separately for tests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{self, DatasetStats};
use crate::dynamics::{rescale_params, run_sir, EpidemicParams, OutbreakStats};
use crate::error::{Error, Result};
use crate::generators::{er_probability_for_mean_degree, GenSpec};
use crate::hypergraph::{Hypergraph, NodeRemap, SimplexOptions, Views};
use crate::influence::{collective_influence, select_seeds, top_overlap_probability, Method};
use crate::message_passing::{build_wnb, leading_eigen, PowerOptions};
use crate::output::{write_json, write_provenance, CsvFile};
use crate::rng::derive_seed;

/// Where an input hypergraph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Generate { spec: GenSpec },
    HyperedgeList { path: PathBuf },
    Benson {
        nverts: PathBuf,
        simplices: PathBuf,
        #[serde(default)]
        dedup: bool,
    },
}

impl Source {
    pub fn load(&self) -> Result<Hypergraph> {
        match self {
            Source::Generate { spec } => spec.generate(),
            Source::HyperedgeList { path } => datasets::load_hyperedge_list(path),
            Source::Benson {
                nverts,
                simplices,
                dedup,
            } => datasets::load_benson(nverts, simplices, *dedup),
        }
    }

    /// Short label used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            Source::Generate { spec } => format!("generated-{}", spec.seed),
            Source::HyperedgeList { path } => display_stem(path),
            Source::Benson { nverts, dedup, .. } => {
                let stem = display_stem(nverts);
                let stem = stem.strip_suffix("-nverts").unwrap_or(&stem).to_string();
                if *dedup {
                    format!("{stem}-dedup")
                } else {
                    stem
                }
            }
        }
    }
}

fn display_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

/// A source with an optional display name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSource {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub source: Source,
}

impl NamedSource {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.source.label())
    }
}

/// The giant component of a source, ready for simulation.
pub struct Prepared {
    pub input: Hypergraph,
    pub gcc: Hypergraph,
    pub remap: NodeRemap,
    pub views: Views,
}

pub fn prepare(h: Hypergraph, opts: &SimplexOptions) -> Prepared {
    let (gcc, remap) = h.giant_component();
    let views = Views::build(&gcc, opts);
    Prepared {
        input: h,
        gcc,
        remap,
        views,
    }
}

/// Infectivity grid: either rescaled `λ` values or raw probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sweep {
    Lambda { lambda1: Vec<f64>, lambda2: Vec<f64> },
    Beta { beta1: Vec<f64>, beta2: Vec<f64> },
}

impl Sweep {
    fn grids(&self) -> (&[f64], &[f64]) {
        match self {
            Sweep::Lambda { lambda1, lambda2 } => (lambda1, lambda2),
            Sweep::Beta { beta1, beta2 } => (beta1, beta2),
        }
    }

    pub fn is_lambda(&self) -> bool {
        matches!(self, Sweep::Lambda { .. })
    }

    /// Grid points, first axis outermost.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let (a, b) = self.grids();
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedCount {
    Absolute(usize),
    /// Percentage of the giant component, rounded half-up, at least one.
    Percent(f64),
}

impl SeedCount {
    pub fn resolve(self, gcc_size: usize) -> Result<usize> {
        let k = match self {
            SeedCount::Absolute(k) => k,
            SeedCount::Percent(p) => percent_of(gcc_size, p),
        };
        if k == 0 || k > gcc_size {
            return Err(Error::TooManySeeds {
                k,
                available: gcc_size,
            });
        }
        Ok(k)
    }
}

pub fn percent_of(n: usize, percent: f64) -> usize {
    ((percent / 100.0 * n as f64 + 0.5).floor() as usize).max(1)
}

fn default_runs() -> usize {
    100
}

fn default_gamma() -> u32 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_seeds() -> Vec<SeedCount> {
    vec![SeedCount::Percent(3.0)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: Source,
    pub sweep: Sweep,
    #[serde(default = "default_gamma")]
    pub gamma: u32,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<SeedCount>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub simplex: SimplexOptions,
    #[serde(default)]
    pub t_max: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.sweep.grids();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidParameter("sweep grids must be non-empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("seed schedule must be non-empty".into()));
        }
        for s in &self.seeds {
            if let SeedCount::Percent(p) = s {
                if !(*p > 0.0 && *p <= 100.0) {
                    return Err(Error::InvalidParameter(format!(
                        "seed percentage {p} must lie in (0, 100]"
                    )));
                }
            }
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("method list must be non-empty".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.gamma == 0 {
            return Err(Error::InvalidParameter("gamma must be at least 1".into()));
        }
        Ok(())
    }
}

/// One (parameter point × seed count × method) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub index: usize,
    pub method: Method,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub k: Option<usize>,
    /// Seeds in giant-component ids.
    pub seeds: Vec<u32>,
    pub stats: Option<OutbreakStats>,
    pub error: Option<String>,
}

const SELECT_STREAM: u64 = 0x5e1e_c7;
const SIM_STREAM: u64 = 0x51_0a11;

/// Runs every cell of `cfg` on prepared views. Methods sharing a parameter
/// point and seed count share simulation seeds.
pub fn run_cells(views: &Views, cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let gcc = views.num_nodes();
    let points = cfg.sweep.points();
    let mut cells = Vec::new();
    for (p, &point) in points.iter().enumerate() {
        for (s, &count) in cfg.seeds.iter().enumerate() {
            for &method in &cfg.methods {
                cells.push((p, point, s, count, method));
            }
        }
    }
    let results = cells
        .into_par_iter()
        .enumerate()
        .map(|(index, (p, (x, y), s, count, method))| {
            let mut cell = CellResult {
                index,
                method,
                lambda1: None,
                lambda2: None,
                beta1: None,
                beta2: None,
                k: None,
                seeds: Vec::new(),
                stats: None,
                error: None,
            };
            let outcome = (|| -> Result<()> {
                let (beta1, beta2) = if cfg.sweep.is_lambda() {
                    cell.lambda1 = Some(x);
                    cell.lambda2 = Some(y);
                    let r = rescale_params(x, y, views, cfg.gamma)?;
                    (r.beta1, r.beta2)
                } else {
                    (x, y)
                };
                cell.beta1 = Some(beta1);
                cell.beta2 = Some(beta2);
                let k = count.resolve(gcc)?;
                cell.k = Some(k);
                let seeds = select_seeds(
                    &views.adjacency,
                    k,
                    method,
                    beta1,
                    cfg.gamma as f64,
                    derive_seed(cfg.rng_seed, &[SELECT_STREAM, s as u64]),
                )?;
                let mut params = EpidemicParams::new(
                    beta1,
                    beta2,
                    cfg.gamma,
                    derive_seed(cfg.rng_seed, &[SIM_STREAM, p as u64, s as u64]),
                );
                params.t_max = cfg.t_max;
                cell.stats = Some(run_sir(views, &seeds.nodes, &params, cfg.runs)?);
                cell.seeds = seeds.nodes;
                Ok(())
            })();
            if let Err(e) = outcome {
                log::warn!("cell {index} ({method}) failed: {e}");
                cell.error = Some(e.to_string());
            }
            cell
        })
        .collect();
    Ok(results)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub results_csv: PathBuf,
    pub runs_csv: PathBuf,
    pub seeds_csv: PathBuf,
    pub gcc_size: usize,
    pub cells: usize,
    pub failed_cells: usize,
}

/// `results.csv`, `runs.csv` and `seeds.csv` under `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let prepared = prepare(cfg.source.load()?, &cfg.simplex);
    let gcc_size = prepared.gcc.num_nodes();
    log::info!(
        "input: {} nodes, {} hyperedges; giant component {} nodes",
        prepared.input.num_nodes(),
        prepared.input.num_hyperedges(),
        gcc_size
    );
    let cells = run_cells(&prepared.views, cfg)?;

    let dir = &cfg.output_dir;
    let mut results = CsvFile::create(
        dir.join("results.csv"),
        "experiment-results",
        &[
            "cell", "method", "lambda1", "lambda2", "beta1", "beta2", "gamma", "k", "runs",
            "sigma_mean", "sigma_std", "fraction_of_gcc", "non_absorbed", "gcc_size", "error",
        ],
    )?;
    let mut runs = CsvFile::create(
        dir.join("runs.csv"),
        "experiment-runs",
        &["cell", "method", "run_id", "sigma", "absorbed"],
    )?;
    let mut seeds = CsvFile::create(
        dir.join("seeds.csv"),
        "experiment-seeds",
        &["cell", "method", "rank", "node_id"],
    )?;
    for c in &cells {
        let st = c.stats.as_ref();
        results.row([
            c.index.to_string(),
            c.method.to_string(),
            opt(c.lambda1),
            opt(c.lambda2),
            opt(c.beta1),
            opt(c.beta2),
            cfg.gamma.to_string(),
            opt(c.k),
            opt(st.map(|s| s.runs)),
            opt(st.map(|s| s.sigma_mean)),
            opt(st.map(|s| s.sigma_std)),
            opt(st.map(|s| s.fraction_of_gcc)),
            opt(st.map(|s| s.non_absorbed)),
            gcc_size.to_string(),
            c.error.clone().unwrap_or_default(),
        ])?;
        if let Some(st) = st {
            for (r, (sigma, absorbed)) in st.sigma_samples.iter().zip(&st.absorbed).enumerate() {
                runs.row([
                    c.index.to_string(),
                    c.method.to_string(),
                    r.to_string(),
                    sigma.to_string(),
                    absorbed.to_string(),
                ])?;
            }
        }
        for (rank, &v) in c.seeds.iter().enumerate() {
            seeds.row([
                c.index.to_string(),
                c.method.to_string(),
                (rank + 1).to_string(),
                prepared.remap.to_old(v).to_string(),
            ])?;
        }
    }
    let report = ExperimentReport {
        results_csv: results.finish()?,
        runs_csv: runs.finish()?,
        seeds_csv: seeds.finish()?,
        gcc_size,
        cells: cells.len(),
        failed_cells: cells.iter().filter(|c| c.error.is_some()).count(),
    };
    for p in [&report.results_csv, &report.runs_csv, &report.seeds_csv] {
        write_provenance(p, "experiment", cfg)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub spec: GenSpec,
    pub output: PathBuf,
}

/// Writes the generated hypergraph as a hyperedge list plus provenance.
pub fn run_generate(cfg: &GenerateConfig) -> Result<Hypergraph> {
    let h = cfg.spec.generate()?;
    if h.num_hyperedges() == 0 {
        log::warn!("generated hypergraph has no hyperedges");
    }
    if let Some(parent) = cfg.output.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    datasets::save_hyperedge_list(&h, &cfg.output)?;
    write_provenance(&cfg.output, "generate", cfg)?;
    Ok(h)
}

fn default_bench_sizes() -> Vec<usize> {
    vec![1000, 2000, 4000, 8000]
}

fn default_mean_degree() -> f64 {
    3.5
}

fn default_bench_methods() -> Vec<Method> {
    vec![Method::Cia]
}

fn default_k_percent() -> f64 {
    3.0
}

fn default_repeats() -> usize {
    5
}

fn default_warmup() -> usize {
    1
}

fn default_beta1() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    #[serde(default = "default_bench_sizes")]
    pub sizes: Vec<usize>,
    /// Target mean node degree `⟨d_N⟩` of the ER instances (with `M = N`).
    #[serde(default = "default_mean_degree")]
    pub mean_degree: f64,
    #[serde(default = "default_bench_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_k_percent")]
    pub k_percent: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub simplex: SimplexOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    /// Fastest of the timed repeats; interference only ever adds time.
    pub seconds: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least two paired points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("slope fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}


/// Times views construction, scoring and selection on the giant component of
/// an ER hypergraph; generation is excluded.
pub fn time_selection(h: &Hypergraph, method: Method, k_percent: f64, opts: &SimplexOptions, seed: u64) -> Result<(usize, f64)> {
    let (gcc, _) = h.giant_component();
    let start = Instant::now();
    let views = Views::build(&gcc, opts);
    let k = percent_of(gcc.num_nodes(), k_percent).min(gcc.num_nodes());
    let seeds = select_seeds(&views.adjacency, k, method, default_beta1(), 1.0, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(seeds);
    Ok((k, elapsed))
}

/// Sequential timing loop (timings would be distorted by concurrent cells).
pub fn bench_rows(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        let p = er_probability_for_mean_degree(n, n, cfg.mean_degree);
        let h = GenSpec::erdos_renyi(n, n, p, derive_seed(cfg.rng_seed, &[si as u64])).generate()?;
        for &method in &cfg.methods {
            for _ in 0..cfg.warmup {
                time_selection(&h, method, cfg.k_percent, &cfg.simplex, cfg.rng_seed)?;
            }
            let mut times = Vec::with_capacity(cfg.repeats);
            let mut k = 0;
            for _ in 0..cfg.repeats {
                let (kk, t) = time_selection(&h, method, cfg.k_percent, &cfg.simplex, cfg.rng_seed)?;
                k = kk;
                times.push(t);
            }
            rows.push(BenchRow {
                method,
                n,
                k,
                seconds: times.into_iter().fold(f64::INFINITY, f64::min),
            });
        }
    }
    Ok(rows)
}

/// Fitted slope per method, in the order methods first appear.
pub fn bench_slopes(rows: &[BenchRow]) -> Vec<(Method, Result<f64>)> {
    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    methods
        .into_iter()
        .map(|m| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.method == m)
                .map(|r| (r.n as f64, r.seconds))
                .unzip();
            (m, fit_loglog_slope(&xs, &ys))
        })
        .collect()
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let rows = bench_rows(cfg)?;
    let mut csv = CsvFile::create(
        cfg.output_dir.join("bench.csv"),
        "bench-timings",
        &["method", "n", "k", "seconds"],
    )?;
    for r in &rows {
        csv.row([r.method.to_string(), r.n.to_string(), r.k.to_string(), r.seconds.to_string()])?;
    }
    let path = csv.finish()?;
    write_provenance(&path, "bench", cfg)?;
    let mut fit = CsvFile::create(cfg.output_dir.join("bench_fit.csv"), "bench-fit", &["method", "slope", "error"])?;
    for (m, slope) in bench_slopes(&rows) {
        match slope {
            Ok(s) => fit.row([m.to_string(), s.to_string(), String::new()])?,
            Err(e) => fit.row([m.to_string(), String::new(), e.to_string()])?,
        }
    }
    let path = fit.finish()?;
    write_provenance(&path, "bench", cfg)?;
    Ok(rows)
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub source: Source,
    #[serde(default = "one")]
    pub beta1: f64,
    #[serde(default = "default_gamma")]
    pub gamma: u32,
    #[serde(default)]
    pub power: PowerOptions,
    /// Restrict to the giant component first.
    #[serde(default = "default_true")]
    pub giant_component: bool,
    /// Also write the operator in coordinate form.
    #[serde(default)]
    pub dump_operator: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub num_nodes: usize,
    pub num_directed_links: usize,
    pub acyclic: bool,
    pub beta1: f64,
    pub gamma: u32,
    pub lambda: f64,
    #[serde(with = "crate::message_passing::infinite_as_null")]
    pub beta1_star: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub fn spectrum_report(h: &Hypergraph, cfg: &SpectrumConfig) -> SpectrumReport {
    let h = if cfg.giant_component {
        h.giant_component().0
    } else {
        h.clone()
    };
    let views = Views::build(&h, &SimplexOptions::default());
    let op = build_wnb(&views, cfg.beta1, cfg.gamma as f64);
    let res = leading_eigen(&op, &cfg.power);
    // λ_C is linear in β₁γ, so the threshold follows from one solve.
    let scale = cfg.beta1 * cfg.gamma as f64;
    let beta1_star = if res.lambda > 0.0 && scale > 0.0 {
        scale / (cfg.gamma as f64 * res.lambda)
    } else {
        f64::INFINITY
    };
    SpectrumReport {
        num_nodes: h.num_nodes(),
        num_directed_links: op.dim(),
        acyclic: op.is_acyclic(),
        beta1: cfg.beta1,
        gamma: cfg.gamma,
        lambda: res.lambda,
        beta1_star,
        iterations: res.iterations,
        residual: res.residual,
        converged: res.converged,
    }
}

pub fn run_spectrum(cfg: &SpectrumConfig) -> Result<SpectrumReport> {
    let h = cfg.source.load()?;
    let report = spectrum_report(&h, cfg);
    let path = cfg.output_dir.join("spectrum.json");
    write_json(&path, &report)?;
    write_provenance(&path, "spectrum", cfg)?;
    if cfg.dump_operator {
        let gcc = if cfg.giant_component { h.giant_component().0 } else { h };
        let views = Views::build(&gcc, &SimplexOptions::default());
        let op = build_wnb(&views, cfg.beta1, cfg.gamma as f64);
        let dump = cfg.output_dir.join("wnb.coo");
        let file = std::fs::File::create(&dump).map_err(|e| Error::io(&dump, e))?;
        op.write_coordinate(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(&dump, e))?;
        write_provenance(&dump, "spectrum", cfg)?;
    }
    Ok(report)
}

fn default_n_grid() -> Vec<f64> {
    (1..=20).map(f64::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig3Config {
    pub sources: Vec<NamedSource>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub source: String,
    pub n_percent: f64,
    pub probability: f64,
    pub null_rate: f64,
}

/// Top-`n%` neighbour-overlap probability under CI ranking on the giant component.
pub fn overlap_curve(h: &Hypergraph, n_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (gcc, _) = h.giant_component();
    let views = Views::build(&gcc, &SimplexOptions::default());
    let ci = collective_influence(&views.adjacency, 1.0, 1.0);
    n_grid
        .iter()
        .map(|&n| Ok((n, top_overlap_probability(&views.adjacency, &ci.scores, n)?)))
        .collect()
}

pub fn fig3_rows(cfg: &Fig3Config) -> Result<Vec<OverlapRow>> {
    let mut rows = Vec::new();
    for src in &cfg.sources {
        let h = src.source.load()?;
        let label = src.label();
        for (n, prob) in overlap_curve(&h, &cfg.n_grid)? {
            rows.push(OverlapRow {
                source: label.clone(),
                n_percent: n,
                probability: prob,
                null_rate: n / 100.0,
            });
        }
    }
    Ok(rows)
}

pub fn run_fig3(cfg: &Fig3Config) -> Result<Vec<OverlapRow>> {
    let rows = fig3_rows(cfg)?;
    let mut csv = CsvFile::create(
        cfg.output_dir.join("overlap.csv"),
        "top-overlap",
        &["source", "n_percent", "probability", "null_rate"],
    )?;
    for r in &rows {
        csv.row([
            r.source.clone(),
            r.n_percent.to_string(),
            r.probability.to_string(),
            r.null_rate.to_string(),
        ])?;
    }
    let path = csv.finish()?;
    write_provenance(&path, "fig3", cfg)?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub sources: Vec<NamedSource>,
    #[serde(default)]
    pub simplex: SimplexOptions,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

pub fn run_stats(cfg: &StatsConfig) -> Result<Vec<(String, DatasetStats)>> {
    let mut out = Vec::new();
    for src in &cfg.sources {
        let h = src.source.load()?;
        out.push((src.label(), datasets::dataset_stats(&h, &cfg.simplex)));
    }
    let header: Vec<&str> = DatasetStats::CSV_HEADER.split(',').collect();
    let mut csv = CsvFile::create(cfg.output_dir.join("stats.csv"), "dataset-stats", &header)?;
    for (name, s) in &out {
        csv.row(s.csv_row(&crate::output::escape(name)).split(','))?;
    }
    let path = csv.finish()?;
    write_provenance(&path, "stats", cfg)?;
    let json_path = cfg.output_dir.join("stats.json");
    let map: serde_json::Map<String, serde_json::Value> = out
        .iter()
        .map(|(n, s)| Ok((n.clone(), serde_json::to_value(s)?)))
        .collect::<Result<_>>()?;
    write_json(&json_path, &map)?;
    write_provenance(&json_path, "stats", cfg)?;
    Ok(out)
}

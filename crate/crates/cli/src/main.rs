use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hypercia::experiment::{
    self, BenchConfig, ExperimentConfig, Fig3Config, GenerateConfig, SpectrumConfig, StatsConfig,
};
use serde_json::{json, Map, Value};

/// Simplicial-contagion experiments on hypergraphs.
#[derive(Parser)]
#[command(name = "hypercia", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override any config key: `--set runs=20`, `--set 'methods=["cia","random"]'`.
    #[arg(long = "set", value_name = "KEY=JSON")]
    sets: Vec<String>,
    /// Output directory; relative paths resolve against $HYPERCIA_OUTPUT_ROOT.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random hypergraph and write it as a hyperedge list.
    Generate {
        #[command(flatten)]
        common: Common,
        /// scale_free, erdos_renyi or d_uniform.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        hyperedges: Option<usize>,
        /// Power-law exponent (scale_free).
        #[arg(long)]
        exponent: Option<f64>,
        /// Membership probability (erdos_renyi).
        #[arg(long)]
        p: Option<f64>,
        /// Hyperedge size (d_uniform).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (defaults to <output-dir>/hypergraph.txt).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run seed-selection methods over an infectivity grid.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Hyperedge-list input, replacing the config source.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated method list.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(long)]
        gamma: Option<u32>,
    },
    /// Time seed selection on Erdős-Rényi hypergraphs of growing size.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
    },
    /// Leading eigenvalue of the weighted non-backtracking operator.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        beta1: Option<f64>,
        #[arg(long)]
        gamma: Option<u32>,
        /// Also write the operator in coordinate form.
        #[arg(long)]
        dump_operator: bool,
    },
    /// Top-n% neighbour-overlap curves.
    Fig3 {
        #[command(flatten)]
        common: Common,
        /// Hyperedge-list inputs, replacing the config sources.
        #[arg(long)]
        input: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<f64>>,
    },
    /// Summary statistics of hypergraph files.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Hyperedge-list inputs.
        #[arg(long)]
        input: Vec<PathBuf>,
        /// nverts/simplices pair prefix, e.g. `data/NDC-classes/NDC-classes`.
        #[arg(long)]
        benson: Vec<PathBuf>,
        /// Collapse repeated hyperedges in nverts/simplices inputs.
        #[arg(long)]
        dedup: bool,
    },
}

fn load_config(common: &Common) -> Result<Map<String, Value>> {
    let Some(path) = &common.config else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))? {
        Value::Object(map) => Ok(map),
        _ => bail!("config {} must be a JSON object", path.display()),
    }
}

fn apply_sets(map: &mut Map<String, Value>, sets: &[String]) -> Result<()> {
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .with_context(|| format!("--set expects KEY=JSON, got `{s}`"))?;
        // bare words are taken as strings
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(key.to_string(), value);
    }
    Ok(())
}

fn set<T: serde::Serialize>(map: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        map.insert(key.to_string(), json!(v));
    }
}

fn output_root() -> Option<PathBuf> {
    std::env::var_os("HYPERCIA_OUTPUT_ROOT").map(PathBuf::from)
}

fn resolve_output(path: &Path) -> PathBuf {
    match output_root() {
        Some(root) if path.is_relative() => root.join(path),
        _ => path.to_path_buf(),
    }
}

/// Applies flags and `--set` overrides, then resolves the output directory.
fn finish<T: serde::de::DeserializeOwned>(
    mut map: Map<String, Value>,
    common: &Common,
    output_key: &str,
    default_output: &str,
) -> Result<T> {
    set(&mut map, output_key, common.output_dir.clone());
    apply_sets(&mut map, &common.sets)?;
    let out = map
        .get(output_key)
        .and_then(Value::as_str)
        .unwrap_or(default_output)
        .to_string();
    map.insert(output_key.to_string(), json!(resolve_output(Path::new(&out))));
    serde_json::from_value(Value::Object(map)).context("invalid configuration")
}

fn hyperedge_sources(inputs: &[PathBuf]) -> Value {
    Value::Array(
        inputs
            .iter()
            .map(|p| json!({"kind": "hyperedge_list", "path": p}))
            .collect(),
    )
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate {
            common,
            family,
            nodes,
            hyperedges,
            exponent,
            p,
            d,
            seed,
            output,
        } => {
            let mut map = load_config(&common)?;
            let mut spec = match map.remove("spec") {
                Some(Value::Object(s)) => s,
                Some(_) => bail!("`spec` must be an object"),
                None => Map::new(),
            };
            set(&mut spec, "family", family);
            set(&mut spec, "num_nodes", nodes);
            set(&mut spec, "num_hyperedges", hyperedges);
            set(&mut spec, "exponent", exponent);
            set(&mut spec, "p", p);
            set(&mut spec, "d", d);
            set(&mut spec, "seed", seed);
            map.insert("spec".into(), Value::Object(spec));
            let dir = common
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("results"));
            let target = output
                .or_else(|| map.get("output").and_then(Value::as_str).map(PathBuf::from))
                .unwrap_or_else(|| dir.join("hypergraph.txt"));
            map.insert("output".into(), json!(resolve_output(&target)));
            apply_sets(&mut map, &common.sets)?;
            let cfg: GenerateConfig =
                serde_json::from_value(Value::Object(map)).context("invalid configuration")?;
            let h = experiment::run_generate(&cfg)?;
            println!(
                "wrote {} ({} nodes, {} hyperedges)",
                cfg.output.display(),
                h.num_nodes(),
                h.num_hyperedges()
            );
            Ok(true)
        }
        Command::Experiment {
            common,
            input,
            methods,
            runs,
            rng_seed,
            gamma,
        } => {
            let mut map = load_config(&common)?;
            if let Some(path) = input {
                map.insert("source".into(), json!({"kind": "hyperedge_list", "path": path}));
            }
            set(&mut map, "methods", methods);
            set(&mut map, "runs", runs);
            set(&mut map, "rng_seed", rng_seed);
            set(&mut map, "gamma", gamma);
            let cfg: ExperimentConfig = finish(map, &common, "output_dir", "results")?;
            let report = experiment::run_experiment(&cfg)?;
            println!(
                "{} cells ({} failed) on a giant component of {} nodes -> {}",
                report.cells,
                report.failed_cells,
                report.gcc_size,
                report.results_csv.display()
            );
            Ok(report.failed_cells == 0)
        }
        Command::Bench {
            common,
            sizes,
            methods,
            repeats,
            rng_seed,
        } => {
            let mut map = load_config(&common)?;
            set(&mut map, "sizes", sizes);
            set(&mut map, "methods", methods);
            set(&mut map, "repeats", repeats);
            set(&mut map, "rng_seed", rng_seed);
            let cfg: BenchConfig = finish(map, &common, "output_dir", "results")?;
            let rows = experiment::run_bench(&cfg)?;
            for r in &rows {
                println!("{:<9} N={:<7} k={:<5} {:.6}s", r.method, r.n, r.k, r.seconds);
            }
            let mut ok = true;
            for (m, slope) in experiment::bench_slopes(&rows) {
                match slope {
                    Ok(s) => println!("{m}: log-log slope {s:.3}"),
                    Err(e) if cfg.sizes.len() < 2 => log::info!("{m}: {e}"),
                    Err(e) => {
                        ok = false;
                        eprintln!("{m}: {e}");
                    }
                }
            }
            Ok(ok)
        }
        Command::Spectrum {
            common,
            input,
            beta1,
            gamma,
            dump_operator,
        } => {
            let mut map = load_config(&common)?;
            if let Some(path) = input {
                map.insert("source".into(), json!({"kind": "hyperedge_list", "path": path}));
            }
            set(&mut map, "beta1", beta1);
            set(&mut map, "gamma", gamma);
            if dump_operator {
                map.insert("dump_operator".into(), json!(true));
            }
            let cfg: SpectrumConfig = finish(map, &common, "output_dir", "results")?;
            let report = experiment::run_spectrum(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.converged)
        }
        Command::Fig3 {
            common,
            input,
            n_grid,
        } => {
            let mut map = load_config(&common)?;
            if !input.is_empty() {
                map.insert("sources".into(), hyperedge_sources(&input));
            }
            set(&mut map, "n_grid", n_grid);
            let cfg: Fig3Config = finish(map, &common, "output_dir", "results")?;
            for r in experiment::run_fig3(&cfg)? {
                println!("{}\t{}\t{:.4}", r.source, r.n_percent, r.probability);
            }
            Ok(true)
        }
        Command::Stats {
            common,
            input,
            benson,
            dedup,
        } => {
            let mut map = load_config(&common)?;
            if !input.is_empty() || !benson.is_empty() {
                let Value::Array(mut sources) = hyperedge_sources(&input) else {
                    unreachable!()
                };
                for prefix in &benson {
                    let name = prefix.to_string_lossy();
                    sources.push(json!({
                        "kind": "benson",
                        "nverts": format!("{name}-nverts.txt"),
                        "simplices": format!("{name}-simplices.txt"),
                        "dedup": dedup,
                    }));
                }
                map.insert("sources".into(), Value::Array(sources));
            }
            let cfg: StatsConfig = finish(map, &common, "output_dir", "results")?;
            let stats = experiment::run_stats(&cfg)?;
            println!("{}", hypercia::datasets::DatasetStats::CSV_HEADER);
            for (name, s) in &stats {
                println!("{}", s.csv_row(name));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! The `localmrf` command line.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on a usage error.
//! `--config FILE` reads a JSON object whose keys are long flag names; its
//! values are applied before the command-line flags, so explicit flags win.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::dobrushin::{self, DEFAULT_ENUMERATION_CAP};
use crate::error::Error;
use crate::expansion::{self, ExpansionConfig, Inference};
use crate::experiments::{self, CitationSpec, ComparisonSpec, CoraSpec, ExpansionMethod, GridSpec, HeatmapSpec, SweepSpec};
use crate::meanfield::MeanFieldConfig;
use crate::model::{BoundaryMethod, IsingModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "localmrf", version, about = "Localized marginal inference for sparse Ising models", args_override_self = true)]
pub struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for trial-level parallelism (default: available cores).
    #[arg(long, global = true, env = "LOCALMRF_THREADS")]
    pub threads: Option<usize>,

    /// JSON file of default flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded lattice model and write it as JSON.
    GenGrid(GenGridArgs),
    /// Print the Dobrushin coefficient of a model and the row attaining it.
    CheckDobrushin(CheckArgs),
    /// Distance to the region boundary that guarantees a given accuracy.
    Radius(RadiusArgs),
    /// Answer a marginal query with a certified error bound.
    Query(QueryArgs),
    /// Run a region expansion and print its trace as JSON lines.
    Expand(ExpandArgs),
    /// Mean Dobrushin coefficient over a grid of field and coupling strengths.
    Heatmap(HeatmapArgs),
    /// Compare greedy expansion against the random and max-norm baselines.
    CompareExpansion(CompareArgs),
    /// Final error and bound of greedy expansion as the field strength varies.
    I1Sweep(SweepArgs),
    /// Local versus global classification on a citation graph.
    Cora(CoraArgs),
    /// Write a synthetic citation graph in the edge and label TSV formats.
    GenCitation(GenCitationArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    /// Fields are drawn from U[-I1, I1].
    #[arg(long, default_value_t = 1.0)]
    pub i1: f64,
    /// Couplings are drawn from U[-I2, I2].
    #[arg(long, default_value_t = 0.25)]
    pub i2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec { rows: self.rows, cols: self.cols, i1: self.i1, i2: self.i2, seed: self.seed }
    }
}

#[derive(Debug, Args)]
pub struct GenGridArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Model JSON file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: usize,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    /// Dobrushin coefficient, in [0, 1).
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    /// Model JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Query node id.
    #[arg(long)]
    pub node: usize,
    /// Maximum region size.
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    /// Minimum bound improvement needed to grow the region.
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    /// Boundary treatment: drop or mf.
    #[arg(long, default_value = "drop")]
    pub method: BoundaryMethod,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: usize,
    /// Update D incrementally instead of re-inverting per candidate.
    #[arg(long)]
    pub incremental: bool,
    /// Leave the original fields out of the boundary mean-field objective.
    #[arg(long)]
    pub exclude_boundary_fields: bool,
}

impl ExpansionArgs {
    fn config(&self) -> ExpansionConfig {
        ExpansionConfig {
            k: self.k,
            delta: self.delta,
            method: self.method,
            enumeration_cap: self.enumeration_cap,
            incremental: self.incremental,
            parallel: true,
            mean_field: MeanFieldConfig { include_boundary_fields: !self.exclude_boundary_fields, ..Default::default() },
        }
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub expansion: ExpansionArgs,
    /// Inference on the final region: exact or mf.
    #[arg(long, default_value = "exact")]
    pub inference: Inference,
    /// Also write the trace as JSON lines to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    Greedy,
    Random,
    Maxnorm,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub expansion: ExpansionArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
    pub strategy: StrategyArg,
    /// Seed of the random strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1")]
    pub i1_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1")]
    pub i2_values: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "greedy-drop,greedy-mf,random,maxnorm")]
    pub methods: Vec<ExpansionMethod>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6,6.5,7,7.5,8,8.5,9,9.5,10")]
    pub i1_values: Vec<f64>,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value = "drop")]
    pub method: BoundaryMethod,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoraArgs {
    /// Edge list: `citing<TAB>cited` per line.
    #[arg(long)]
    pub edges: PathBuf,
    /// Labels: `paper<TAB>class` per line.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "Neural_Networks")]
    pub positive_label: String,
    #[arg(long, default_value_t = 15)]
    pub degree_cap: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9,10")]
    pub i1_values: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub j_mean: f64,
    #[arg(long, default_value_t = 0.05)]
    pub j_spread: f64,
    #[arg(long, default_value_t = 0.1)]
    pub h_scale: f64,
    /// Read the spreads as variances rather than standard deviations.
    #[arg(long)]
    pub variance: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub queries: usize,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenCitationArgs {
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub max_citations: usize,
    #[arg(long, default_value_t = 0.8)]
    pub homophily: f64,
    #[arg(long, default_value_t = 0.5)]
    pub preferential: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

const SUBCOMMANDS: [&str; 10] = [
    "gen-grid",
    "check-dobrushin",
    "radius",
    "query",
    "expand",
    "heatmap",
    "compare-expansion",
    "i1-sweep",
    "cora",
    "gen-citation",
];

#[derive(Debug)]
enum Failure {
    Usage(String),
    Computation(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::NodeOutOfRange { .. } | Error::DobrushinViolated { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Computation(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Computation(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Computation(e.into())
    }
}

/// Config values as flag tokens, e.g. `{"k": 8, "incremental": true}` gives `--k 8 --incremental`.
fn config_tokens(path: &Path) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(Failure::Usage(format!("config {} must hold a JSON object", path.display())));
    };
    let scalar = |v: &Value| -> Result<String, Failure> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Failure::Usage(format!("config value {other} is not a string or number"))),
        }
    };
    let mut tokens = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => tokens.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                tokens.extend([flag, parts.join(",")]);
            }
            other => tokens.extend([flag, scalar(&other)?]),
        }
    }
    Ok(tokens)
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts config-file tokens right after the subcommand name.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let tokens = config_tokens(&path)?;
    let Some(at) = argv.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(argv) };
    let mut out = argv[..at + 2].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[at + 2..]);
    Ok(out)
}

/// Parses `argv` (including the program name), runs the command, and returns the exit code.
pub fn run(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(Failure::Usage(msg)) | Err(Failure::Computation(Error::Data(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Computation(e)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let threads = match cli.threads {
        Some(0) => {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {threads} worker threads: {e}");
            return EXIT_COMPUTATION;
        }
    };
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buffer));
    let _ = out.write_all(&buffer);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Computation(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_COMPUTATION
        }
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string(value)?)?;
    Ok(())
}

fn load_model(path: &Path) -> Result<IsingModel, Failure> {
    IsingModel::load(path).map_err(|e| match e {
        Error::Io(io) => Failure::Usage(format!("cannot read model {}: {io}", path.display())),
        other => Failure::Computation(other),
    })
}

#[derive(Serialize)]
struct Written<'a> {
    outputs: &'a [PathBuf],
}

fn report_outputs(json: bool, out: &mut dyn Write, paths: &[PathBuf]) -> Result<(), Failure> {
    if json {
        return emit_json(out, &Written { outputs: paths });
    }
    for p in paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::GenGrid(a) => {
            let spec = a.grid.spec();
            let model = experiments::gen_grid(&spec)?;
            model.save(&a.out)?;
            #[derive(Serialize)]
            struct Generated<'a> {
                path: &'a Path,
                nodes: usize,
                edges: usize,
                query: usize,
            }
            let g = Generated { path: &a.out, nodes: model.n(), edges: model.num_edges(), query: spec.query() };
            if cli.json {
                emit_json(out, &g)?;
            } else {
                writeln!(out, "wrote {} ({} nodes, {} edges, default query {})", g.path.display(), g.nodes, g.edges, g.query)?;
            }
        }
        Command::CheckDobrushin(a) => {
            let model = load_model(&a.model)?;
            let coef = dobrushin::dobrushin_coefficient(&model, a.enumeration_cap)?;
            #[derive(Serialize)]
            struct Checked {
                c: f64,
                argmax: usize,
                holds: bool,
            }
            let r = Checked { c: coef.c, argmax: coef.argmax, holds: coef.c < 1.0 };
            if cli.json {
                emit_json(out, &r)?;
            } else {
                writeln!(out, "c = {}", r.c)?;
                writeln!(out, "argmax node = {}", r.argmax)?;
                writeln!(out, "dobrushin condition {}", if r.holds { "holds" } else { "fails" })?;
            }
        }
        Command::Radius(a) => {
            let r = dobrushin::theorem2_radius(a.c, a.eps)?;
            if cli.json {
                emit_json(out, &r)?;
            } else {
                writeln!(out, "radius = {}", r.radius)?;
                writeln!(out, "t = {}", r.t)?;
                writeln!(out, "radius at t=2 = {}", r.radius_t2)?;
            }
        }
        Command::Query(a) => {
            let model = load_model(&a.expansion.model)?;
            let answer = expansion::query_marginal(&model, a.expansion.node, &a.expansion.config(), a.inference)?;
            if let Some(path) = &a.trace {
                std::fs::write(path, answer.trace.to_json_lines())?;
            }
            if cli.json {
                #[derive(Serialize)]
                struct Full<'a> {
                    #[serde(flatten)]
                    summary: expansion::QuerySummary<'a>,
                    steps: &'a [expansion::StepRecord],
                }
                emit_json(out, &Full { summary: answer.summary(), steps: &answer.trace.steps })?;
            } else {
                writeln!(out, "marginal p(x_{} = +1) = {}", a.expansion.node, answer.marginal)?;
                writeln!(out, "bound = {}", answer.bound)?;
                writeln!(out, "certified = {}", answer.valid)?;
                writeln!(out, "region = {:?}", answer.trace.final_alpha)?;
                writeln!(out, "stop = {:?}", answer.trace.stop_reason)?;
            }
        }
        Command::Expand(a) => {
            let model = load_model(&a.expansion.model)?;
            let config = a.expansion.config();
            let node = a.expansion.node;
            let trace = match a.strategy {
                StrategyArg::Greedy => expansion::greedy_expand(&model, node, &config)?,
                StrategyArg::Random => expansion::random_expand(&model, node, &config, a.seed)?,
                StrategyArg::Maxnorm => expansion::maxnorm_expand(&model, node, &config)?,
            };
            out.write_all(trace.to_json_lines().as_bytes())?;
        }
        Command::Heatmap(a) => {
            let spec = HeatmapSpec {
                rows: a.rows,
                cols: a.cols,
                i1_values: a.i1_values.clone(),
                i2_values: a.i2_values.clone(),
                trials: a.trials,
                seed: a.seed,
            };
            let heat = experiments::heatmap_c(&spec)?;
            let paths = experiments::write_outputs(&a.out, "heatmap", &spec, &[("heatmap_c.csv", &heat.to_table())], &())?;
            report_outputs(cli.json, out, &paths)?;
        }
        Command::CompareExpansion(a) => {
            let spec = ComparisonSpec { grid: a.grid.spec(), k: a.k, delta: a.delta, trials: a.trials, methods: a.methods.clone() };
            let cmp = experiments::expansion_comparison(&spec)?;
            let paths = experiments::write_outputs(
                &a.out,
                "compare-expansion",
                &spec,
                &[("expansion_comparison.csv", &cmp.to_table())],
                &serde_json::json!({ "query": spec.grid.query(), "violations": cmp.violations() }),
            )?;
            report_outputs(cli.json, out, &paths)?;
        }
        Command::I1Sweep(a) => {
            let spec = SweepSpec {
                grid: a.grid.spec(),
                i1_values: a.i1_values.clone(),
                k: a.k,
                delta: a.delta,
                trials: a.trials,
                method: a.method,
            };
            let rows = experiments::i1_sweep(&spec)?;
            let paths = experiments::write_outputs(&a.out, "i1-sweep", &spec, &[("i1_sweep.csv", &experiments::sweep_table(&rows))], &rows)?;
            report_outputs(cli.json, out, &paths)?;
        }
        Command::Cora(a) => {
            let spec = CoraSpec {
                edge_file: a.edges.clone(),
                label_file: a.labels.clone(),
                positive_label: a.positive_label.clone(),
                degree_cap: a.degree_cap,
                i1_values: a.i1_values.clone(),
                j_mean: a.j_mean,
                j_spread: a.j_spread,
                h_scale: a.h_scale,
                variance: a.variance,
                seed: a.seed,
                n_queries: a.queries,
                k: a.k,
                delta: a.delta,
            };
            let result = experiments::cora_pipeline(&spec)?;
            #[derive(Serialize)]
            struct CoraSummary<'a> {
                graph: experiments::GraphStats,
                rows: &'a [experiments::CoraRow],
            }
            let paths = experiments::write_outputs(
                &a.out,
                "cora",
                &spec,
                &[("cora_metrics.csv", &result.to_table())],
                &CoraSummary { graph: result.stats, rows: &result.rows },
            )?;
            report_outputs(cli.json, out, &paths)?;
        }
        Command::GenCitation(a) => {
            let spec = CitationSpec {
                nodes: a.nodes,
                max_citations: a.max_citations,
                homophily: a.homophily,
                preferential: a.preferential,
                seed: a.seed,
            };
            let (e, l) = experiments::write_citation(&spec, &a.out)?;
            report_outputs(cli.json, out, &[e, l])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn run_str(s: &str) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(argv(s), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn radius_reports_t() {
        let (code, out, _) = run_str("localmrf radius --c 0.5 --eps 0.01 --json");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["radius"].as_u64().unwrap() <= 14);
        assert!(v["t"].as_f64().unwrap() > 1.0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str("localmrf radius --c 0.5").0, 2);
        assert_eq!(run_str("localmrf radius --c 0.5 --eps 0.1 --bogus").0, 2);
        assert_eq!(run_str("localmrf radius --c 1.5 --eps 0.1").0, 2);
        assert_eq!(run_str("localmrf nope").0, 2);
        assert_eq!(run_str("localmrf --threads 0 radius --c 0.5 --eps 0.1").0, 2);
    }

    #[test]
    fn help_exits_zero() {
        for sub in SUBCOMMANDS {
            let (code, out, _) = run_str(&format!("localmrf {sub} --help"));
            assert_eq!(code, 0, "{sub}");
            assert!(out.contains("Usage"), "{sub}");
        }
    }

    #[test]
    fn config_tokens_follow_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"eps": 0.5, "c": 0.2, "json": true}"#).unwrap();
        let args = vec!["localmrf".into(), "--config".into(), path.display().to_string(), "radius".into(), "--eps".into(), "0.01".into()];
        let expanded = expand_config(args).unwrap();
        let eps_at: Vec<usize> = expanded.iter().enumerate().filter(|(_, a)| *a == "--eps").map(|(i, _)| i).collect();
        assert_eq!(eps_at.len(), 2);
        assert_eq!(expanded[eps_at[1] + 1], "0.01");
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(expanded, &mut o, &mut e), 0);
        let v: Value = serde_json::from_slice(&o).unwrap();
        let direct = dobrushin::theorem2_radius(0.2, 0.01).unwrap();
        assert_eq!(v["radius"].as_u64().unwrap() as usize, direct.radius);
    }
}

//! Batch front end for the halving-polyhedron laboratory: seeded
//! experiment harnesses, moment tables, k-distance evaluation, and
//! direction-net construction, all emitting re-runnable manifests.

mod config;
mod points;
mod reports;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use halving_lab::experiments::{
    run_complexity_experiment, run_general_k_experiment, run_halving_experiment,
    ExperimentReport,
};
use halving_lab::geom::{build_delta_net_with_budget, DEFAULT_NET_BUDGET};
use halving_lab::kdistance::{eval_kdistance, KDistSpec};
use halving_lab::moments::moment_row;

use config::{FlatConfig, RunManifest};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys, or input file contents.
    Config(String),
    Core(halving_lab::Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(halving_lab::Error::ResourceLimit(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<halving_lab::Error> for CliError {
    fn from(e: halving_lab::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser)]
#[command(
    name = "halving-lab",
    version,
    about = "Random halving polyhedra: k-distance geometry and seeded experiments"
)]
struct Cli {
    /// Run configuration: flat key=value file, or a manifest.json from a
    /// previous run to reproduce it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Overrides the seed from the config file.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Worker threads for trial parallelism; 0 picks the machine default.
    /// Reports do not depend on this value.
    #[arg(long, global = true, value_name = "INT", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate mean and variance of |<u, X>| for X uniform on the sphere
    Moments {
        /// Dimensions to tabulate, e.g. 2,3,10,1000
        #[arg(long, value_delimiter = ',', value_name = "D,...")]
        dims: Vec<usize>,
    },
    /// Certify random halving polytopes against the ball over seeded trials
    HalvingExp,
    /// Measure uniform k-set support deviations against the union tail bound
    GeneralK,
    /// Build weighted sites for one k-distance and measure how well they
    /// reproduce it
    Complexity,
    /// Evaluate the k-distance of a point set at query points
    KdistEval {
        /// Point set file (first line dim=<d>)
        #[arg(long, value_name = "PATH")]
        points: Option<PathBuf>,
        /// Number of nearest points averaged
        #[arg(short, long, value_name = "INT")]
        k: Option<usize>,
        /// Query file in the same format; may contain zero points
        #[arg(long, value_name = "PATH")]
        queries: Option<PathBuf>,
    },
    /// Build and save a delta-covering of the unit sphere
    NetBuild {
        /// Ambient dimension
        #[arg(long, value_name = "INT")]
        dim: Option<usize>,
        /// Covering radius
        #[arg(long, value_name = "FLOAT")]
        delta: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let flat = match &cli.config {
        Some(path) => FlatConfig::load(path)?,
        None => FlatConfig::default(),
    };

    match &cli.command {
        Command::Moments { dims } => cmd_moments(&cli, &flat, dims),
        Command::HalvingExp => cmd_experiment(&cli, &flat, "halving-exp"),
        Command::GeneralK => cmd_experiment(&cli, &flat, "general-k"),
        Command::Complexity => cmd_experiment(&cli, &flat, "complexity"),
        Command::KdistEval { points, k, queries } => {
            cmd_kdist_eval(&cli, &flat, points.as_deref(), *k, queries.as_deref())
        }
        Command::NetBuild { dim, delta } => cmd_net_build(&cli, &flat, *dim, *delta),
    }
}

/// Writes the named files plus a manifest listing all of them, then
/// reports the output location on stdout.
fn finish(
    out_dir: &Path,
    mut manifest: RunManifest,
    files: Vec<(&'static str, String)>,
) -> Result<(), CliError> {
    manifest.outputs = files.iter().map(|(name, _)| name.to_string()).collect();
    manifest.outputs.push("manifest.json".to_string());
    manifest.outputs.sort();
    for (name, text) in &files {
        reports::write_text(&out_dir.join(name), text)?;
    }
    reports::write_json(&out_dir.join("manifest.json"), &manifest)?;
    println!(
        "{}: wrote {} to {}",
        manifest.subcommand,
        manifest.outputs.join(", "),
        out_dir.display()
    );
    Ok(())
}

fn json_string<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("serializing report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn cmd_moments(cli: &Cli, flat: &FlatConfig, dims_flag: &[usize]) -> Result<(), CliError> {
    flat.restrict(&["dims"])?;
    let dims: Vec<usize> = if dims_flag.is_empty() {
        flat.get("dims")
            .ok_or_else(|| CliError::config("moments needs --dims or config key \"dims\""))?
            .split(',')
            .map(|item| {
                item.trim().parse::<usize>().map_err(|e| {
                    CliError::config(format!("config key \"dims\": bad entry {item:?}: {e}"))
                })
            })
            .collect::<Result<Vec<usize>, CliError>>()?
    } else {
        dims_flag.to_vec()
    };

    let rows = dims
        .iter()
        .map(|&d| moment_row(d))
        .collect::<halving_lab::Result<Vec<_>>>()?;
    let csv = reports::moments_csv(&rows);

    let mut echo = BTreeMap::new();
    echo.insert(
        "dims".to_string(),
        dims.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    let manifest = RunManifest::new("moments", cli.seed.unwrap_or(0), echo);
    finish(&cli.out, manifest, vec![("moments.csv", csv)])
}

fn cmd_experiment(cli: &Cli, flat: &FlatConfig, kind: &str) -> Result<(), CliError> {
    let cfg = config::experiment_config(flat, cli.seed)?;
    let report: ExperimentReport = match kind {
        "halving-exp" => run_halving_experiment(&cfg)?,
        "general-k" => run_general_k_experiment(&cfg)?,
        "complexity" => run_complexity_experiment(&cfg)?,
        other => unreachable!("unknown experiment {other}"),
    };

    let mut files = vec![("report.json", json_string(&report)?)];
    if kind == "complexity" {
        files.push(("summary.csv", reports::complexity_csv(&report)?));
    } else {
        files.push(("trials.csv", reports::trials_csv(&report.records)));
    }

    let manifest = RunManifest::new(kind, cfg.seed, config::echo_experiment(&cfg));
    finish(&cli.out, manifest, files)
}

fn cmd_kdist_eval(
    cli: &Cli,
    flat: &FlatConfig,
    points_flag: Option<&Path>,
    k_flag: Option<usize>,
    queries_flag: Option<&Path>,
) -> Result<(), CliError> {
    flat.restrict(&["points", "k", "queries"])?;
    let points_path = points_flag
        .map(Path::to_path_buf)
        .or_else(|| flat.get("points").map(PathBuf::from))
        .ok_or_else(|| CliError::config("kdist-eval needs --points or config key \"points\""))?;
    let queries_path = queries_flag
        .map(Path::to_path_buf)
        .or_else(|| flat.get("queries").map(PathBuf::from))
        .ok_or_else(|| CliError::config("kdist-eval needs --queries or config key \"queries\""))?;
    let k = match k_flag {
        Some(k) => k,
        None => flat
            .parse::<usize>("k")?
            .ok_or_else(|| CliError::config("kdist-eval needs --k or config key \"k\""))?,
    };

    let cloud = points::read_points(&points_path)?;
    let (query_dim, queries) = points::read_queries(&queries_path)?;
    if !queries.is_empty() && query_dim != cloud.dim() {
        return Err(CliError::config(format!(
            "{}: queries have dimension {query_dim}, points have dimension {}",
            queries_path.display(),
            cloud.dim()
        )));
    }
    let dim = cloud.dim();
    let spec = KDistSpec::new(cloud, k)?;
    let rows = queries
        .into_iter()
        .map(|q| {
            let value = eval_kdistance(&spec, &q)?;
            Ok((q, value))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let csv = reports::kdist_csv(dim, &rows);

    let mut echo = BTreeMap::new();
    echo.insert("points".to_string(), points_path.display().to_string());
    echo.insert("k".to_string(), k.to_string());
    echo.insert("queries".to_string(), queries_path.display().to_string());
    let manifest = RunManifest::new("kdist-eval", cli.seed.unwrap_or(0), echo);
    finish(&cli.out, manifest, vec![("kdist.csv", csv)])
}

fn cmd_net_build(
    cli: &Cli,
    flat: &FlatConfig,
    dim_flag: Option<usize>,
    delta_flag: Option<f64>,
) -> Result<(), CliError> {
    flat.restrict(&["d", "delta", "seed", "net_budget"])?;
    let dim = match dim_flag {
        Some(d) => d,
        None => flat
            .parse::<usize>("d")?
            .ok_or_else(|| CliError::config("net-build needs --dim or config key \"d\""))?,
    };
    let delta = match delta_flag {
        Some(x) => x,
        None => flat
            .parse::<f64>("delta")?
            .ok_or_else(|| CliError::config("net-build needs --delta or config key \"delta\""))?,
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => flat.parse_or("seed", 1)?,
    };
    let mut budget = flat.parse_or("net_budget", DEFAULT_NET_BUDGET)?;
    if let Some(cap) = config::memory_cap(dim)? {
        budget = budget.min(cap.try_into().unwrap_or(usize::MAX));
    }

    let net = build_delta_net_with_budget(dim, delta, seed, budget)?;
    let json = json_string(&net)?;

    let mut echo = BTreeMap::new();
    echo.insert("d".to_string(), dim.to_string());
    echo.insert("delta".to_string(), delta.to_string());
    echo.insert("seed".to_string(), seed.to_string());
    echo.insert("net_budget".to_string(), budget.to_string());
    let manifest = RunManifest::new("net-build", seed, echo);
    finish(&cli.out, manifest, vec![("net.json", json)])
}

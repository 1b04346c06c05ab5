//! `vergo`: run trials and benchmark suites, and inspect targets and footprints.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vergo::config::{reference_document, RunConfig};
use vergo::dynamics::Platform;
use vergo::spatial::io::write_coefficients_csv;
use vergo::spatial::reconstruct;
use vergo::tasks::{self, report, Method, Suite};
use vergo::Error;

/// Environment variable that replaces `output_dir`.
const OUTPUT_ROOT_VAR: &str = "VERGO_OUTPUT_ROOT";

#[derive(Parser)]
#[command(name = "vergo", version, about = "Volumetric ergodic control benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults are used when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Dotted overrides such as `--controller.horizon=15`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and write its records.
    Run {
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        method: Option<Method>,
        /// Restrict the q1 suite to one platform.
        #[arg(long, value_parser = parse_platform)]
        platform: Option<Platform>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded suite and write the report.
    Bench {
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dump target coefficients and a reconstruction grid.
    Coeffs {
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_platform)]
        platform: Option<Platform>,
        /// Cells per side of the reconstruction grid.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print the footprint samples of a state as CSV.
    Footprint {
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_platform)]
        platform: Option<Platform>,
        #[arg(long)]
        method: Option<Method>,
        /// Comma-separated state vector.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the documented default configuration.
    ConfigReference {
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn parse_platform(s: &str) -> Result<Platform, String> {
    match s {
        "double-integrator" => Ok(Platform::DoubleIntegrator),
        "diff-drive" => Ok(Platform::DiffDrive),
        "quadcopter" => Ok(Platform::Quadcopter),
        _ => Err(format!("unknown platform `{s}` (expected double-integrator, diff-drive or quadcopter)")),
    }
}

enum Failure {
    Usage(Error),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => Failure::Runtime(e.to_string()),
            other => Failure::Usage(other),
        }
    }
}

/// Any failure to obtain a valid configuration, unreadable files included, is a usage error.
fn load_config(common: &Common, extra: Vec<String>) -> Result<RunConfig, Failure> {
    let mut overrides = extra;
    overrides.extend(common.overrides.iter().cloned());
    match &common.config {
        Some(path) => RunConfig::from_file(path, &overrides),
        None => RunConfig::from_toml_str("", &overrides),
    }
    .map_err(Failure::Usage)
}

fn selection_overrides(suite: Option<Suite>, seed: Option<u64>, method: Option<Method>) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(s) = suite {
        v.push(format!("task.suite=\"{s}\""));
    }
    if let Some(s) = seed {
        v.push(format!("seed={s}"));
    }
    if let Some(m) = method {
        v.push(format!("task.method=\"{m}\""));
    }
    v
}

fn output_root(cfg: &RunConfig) -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&cfg.output_dir))
}

fn pick_platform(suite: Suite, platform: Option<Platform>) -> Result<Platform, Error> {
    match platform {
        Some(p) if suite.platforms().contains(&p) => Ok(p),
        Some(p) => Err(Error::InvalidConfig(format!("suite {suite} does not run on {p}"))),
        None => Ok(suite.platforms()[0]),
    }
}

fn cmd_run(cfg: &RunConfig, platform: Option<Platform>) -> Result<(), Failure> {
    let suite = cfg.task.suite;
    let platforms: Vec<Platform> = match platform {
        Some(_) => vec![pick_platform(suite, platform)?],
        None => suite.platforms().to_vec(),
    };
    let root = output_root(cfg);
    let mut failed = Vec::new();
    for p in platforms {
        let rec = tasks::run_trial(cfg, suite, p, cfg.task.method, cfg.seed)?;
        let dir = report::write_trial(&root, cfg, &rec)?;
        let outcome = match (rec.completion_step, &rec.failure) {
            (_, Some(f)) => format!("failed: {f}"),
            (Some(c), None) => format!("completed at step {c}"),
            (None, None) if suite == Suite::Q1 => format!(
                "metric {:.6} -> {:.6}",
                rec.metric_trace.first().copied().unwrap_or(f64::NAN),
                rec.metric_trace.last().copied().unwrap_or(f64::NAN)
            ),
            (None, None) => format!("not completed within {} steps", rec.max_steps),
        };
        println!("{suite} {p} {} seed {}: {outcome} ({})", rec.method, rec.seed, dir.display());
        if let Some(f) = rec.failure {
            failed.push(f);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(failed.join("; ")))
    }
}

fn cmd_bench(cfg: &RunConfig, jobs: usize) -> Result<(), Failure> {
    let suite = cfg.task.suite;
    let report = tasks::run_benchmark(cfg, suite, cfg.task.n_trials, jobs, &|rec| {
        eprintln!(
            "  seed {} {} {}: {}",
            rec.seed,
            rec.platform,
            rec.method,
            rec.completion_step.map_or_else(|| "-".to_string(), |c| c.to_string())
        );
    })?;
    let dir = report::write_benchmark(&output_root(cfg), cfg, &report)?;
    print!("{}", report::format_table(&report));
    println!("report: {}", dir.join("report.json").display());
    if report.trials.iter().all(|t| t.failure.is_some()) {
        return Err(Failure::Runtime("every trial failed".into()));
    }
    Ok(())
}

fn cmd_coeffs(cfg: &RunConfig, platform: Option<Platform>, grid: usize) -> Result<(), Failure> {
    let suite = cfg.task.suite;
    let platform = pick_platform(suite, platform)?;
    if grid == 0 {
        return Err(Failure::Usage(Error::InvalidConfig("--grid must be positive".into())));
    }
    let sc = tasks::build_scenario(cfg, suite, platform, cfg.seed)?;
    let dir = output_root(cfg).join(suite.name()).join(format!("seed{}", cfg.seed)).join("coeffs");
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    write_coefficients_csv(&sc.basis, &sc.phi, std::fs::File::create(dir.join("coefficients.csv")).map_err(Error::from)?)?;
    let lengths = sc.space().lengths().to_vec();
    let mut text = String::from("x,y,density\n");
    for j in 0..grid {
        for i in 0..grid {
            let x = (i as f64 + 0.5) / grid as f64 * lengths[0];
            let y = (j as f64 + 0.5) / grid as f64 * lengths[1];
            text.push_str(&format!("{x},{y},{}\n", reconstruct(&sc.basis, &sc.phi, &[x, y])));
        }
    }
    std::fs::write(dir.join("reconstruction.csv"), text).map_err(Error::from)?;
    let nonzero = sc.phi.values().iter().filter(|v| v.abs() > 1e-12).count();
    println!("{} modes, {nonzero} nonzero coefficients", sc.phi.len());
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_footprint(cfg: &RunConfig, platform: Option<Platform>, state: &str) -> Result<(), Failure> {
    let suite = cfg.task.suite;
    let platform = pick_platform(suite, platform)?;
    let s: Vec<f64> = state
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(Error::Parse(format!("--state: {e}"))))?;
    let sc = tasks::build_scenario(cfg, suite, platform, cfg.seed)?;
    if s.len() != sc.dynamics.state_dim() {
        return Err(Failure::Usage(Error::DimensionMismatch { expected: sc.dynamics.state_dim(), got: s.len() }));
    }
    let pts = match cfg.task.method {
        Method::Vec => sc.model.sample_points(&sc.dynamics, sc.space(), &s)?,
        Method::Baseline => {
            vergo::volumetric::VolumetricModel::Point.sample_points(&sc.dynamics, sc.space(), &s)?
        }
    };
    println!("x,y");
    for p in pts {
        println!("{},{}", p[0], p[1]);
    }
    Ok(())
}

fn write_reference(output: Option<&Path>) -> Result<(), Failure> {
    let doc = reference_document();
    match output {
        Some(p) => std::fs::write(p, doc).map_err(|e| Failure::Runtime(e.to_string())),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { suite, seed, method, platform, common } => {
            let cfg = load_config(&common, selection_overrides(suite, seed, method))?;
            cmd_run(&cfg, platform)
        }
        Command::Bench { suite, trials, jobs, common } => {
            let mut extra = selection_overrides(suite, None, None);
            if let Some(n) = trials {
                extra.push(format!("task.n_trials={n}"));
            }
            let cfg = load_config(&common, extra)?;
            cmd_bench(&cfg, jobs)
        }
        Command::Coeffs { suite, seed, platform, grid, common } => {
            let cfg = load_config(&common, selection_overrides(suite, seed, None))?;
            cmd_coeffs(&cfg, platform, grid)
        }
        Command::Footprint { suite, seed, platform, method, state, common } => {
            let cfg = load_config(&common, selection_overrides(suite, seed, method))?;
            cmd_footprint(&cfg, platform, &state)
        }
        Command::ConfigReference { output } => write_reference(output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("trial failure: {m}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end: lists experiment presets and runs them (or an
//! explicit config file) with flag overrides, writing traces as CSV and a
//! summary as JSON.

use crate::envs::GameSpec;
use crate::error::{Error, Result};
use crate::experiments::{find_preset, presets, poly_structure_check, ExperimentPreset, PresetRun};
use crate::harness::{coverage_rate, run_batch, scaling_exponent, AgentSpec, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "STACKBANDIT_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "stackbandit",
    about = "Simulation harness for decentralized leader/follower bandit games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the experiment presets with their claims and default parameters.
    List,
    /// Run a preset or an explicit config file, with flag overrides.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Preset name (see `list`).
    #[arg(long, conflicts_with = "config")]
    experiment: Option<String>,
    /// TOML config file; may name a preset and/or carry overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Horizon override.
    #[arg(long = "T")]
    horizon: Option<usize>,
    /// Ambient dimension override.
    #[arg(long)]
    d: Option<usize>,
    /// Seed count `N` (meaning seeds 0..N) or explicit comma-separated list.
    #[arg(long)]
    seeds: Option<String>,
    /// Reward noise scale override.
    #[arg(long = "sigma-r")]
    sigma_r: Option<f64>,
    /// Response noise scale override.
    #[arg(long = "sigma-b")]
    sigma_b: Option<f64>,
    /// Gap parameter override (relu-curse, expert-guided, optimism-trap).
    #[arg(long)]
    delta: Option<f64>,
    /// Expert-cap alignment override (expert-guided).
    #[arg(long)]
    zeta: Option<f64>,
    /// Polynomial degree parameter override.
    #[arg(long)]
    k: Option<u32>,
    /// Net resolution override for net-based agents.
    #[arg(long)]
    eps: Option<f64>,
    /// Output directory (default: $STACKBANDIT_OUT, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which output files to write.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads for the episode batch (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

/// Seeds in a config file: either a count or an explicit list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SeedsField {
    Count(u64),
    List(Vec<u64>),
}

impl SeedsField {
    fn resolve(&self) -> Result<Vec<u64>> {
        match self {
            SeedsField::Count(n) => {
                if *n == 0 {
                    return Err(Error::Config("seed count must be >= 1".into()));
                }
                Ok((0..*n).collect())
            }
            SeedsField::List(v) => {
                if v.is_empty() {
                    return Err(Error::Config("seed list must be nonempty".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Schema of `--config` files. Either `experiment` selects a preset to start
/// from, or `[run]` gives a full run configuration; the remaining fields are
/// overrides with the same meaning as the equivalent flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    /// Name used in outputs when `[run]` is given without `experiment`.
    name: Option<String>,
    run: Option<RunConfig>,
    #[serde(rename = "T")]
    horizon: Option<usize>,
    d: Option<usize>,
    seeds: Option<SeedsField>,
    sigma_r: Option<f64>,
    sigma_b: Option<f64>,
    delta: Option<f64>,
    zeta: Option<f64>,
    k: Option<u32>,
    eps: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
    threads: Option<usize>,
}

/// Scalar overrides collected from flags and config file, flags winning.
#[derive(Debug, Default, Clone)]
struct Overrides {
    horizon: Option<usize>,
    d: Option<usize>,
    seeds: Option<Vec<u64>>,
    sigma_r: Option<f64>,
    sigma_b: Option<f64>,
    delta: Option<f64>,
    zeta: Option<f64>,
    k: Option<u32>,
    eps: Option<f64>,
}

fn parse_seeds_flag(s: &str) -> Result<Vec<u64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.is_empty() {
        return Err(Error::Config("empty --seeds value".into()));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| Error::Config(format!("invalid seed '{p}'")))
        })
        .collect::<Result<_>>()?;
    if parts.len() == 1 && !s.contains(',') {
        SeedsField::Count(nums[0]).resolve()
    } else {
        Ok(nums)
    }
}

/// Apply a dimension override to a spec, keeping the other parameters.
fn override_d(spec: &GameSpec, d: usize) -> GameSpec {
    match *spec {
        GameSpec::ReluCurse { delta, .. } => GameSpec::ReluCurse { d, delta },
        GameSpec::Imitation { .. } => GameSpec::Imitation { d },
        GameSpec::ExpertGuided { delta, zeta, .. } => GameSpec::ExpertGuided { d, delta, zeta },
        GameSpec::Polynomial { k, .. } => GameSpec::Polynomial { d, k },
        GameSpec::OptimismTrap { delta, .. } => GameSpec::OptimismTrap { d, delta },
    }
}

/// Apply one set of overrides to one run config. Returns `true` for each
/// variant-specific field that found a home, so the caller can reject
/// overrides that apply to no run of a preset.
#[derive(Debug, Default, Clone, Copy)]
struct Applied {
    delta: bool,
    zeta: bool,
    k: bool,
    eps: bool,
}

fn apply_overrides(config: &mut RunConfig, ov: &Overrides) -> Applied {
    let mut applied = Applied::default();
    if let Some(t) = ov.horizon {
        config.horizon = t;
        // Explicit checkpoints are tied to the old horizon.
        config.checkpoints = None;
    }
    if let Some(d) = ov.d {
        config.spec = override_d(&config.spec, d);
    }
    if let Some(seeds) = &ov.seeds {
        config.seeds = seeds.clone();
    }
    if let Some(s) = ov.sigma_r {
        config.noise.sigma_r = s;
    }
    if let Some(s) = ov.sigma_b {
        config.noise.sigma_b = s;
    }
    if let Some(delta) = ov.delta {
        match &mut config.spec {
            GameSpec::ReluCurse { delta: x, .. }
            | GameSpec::ExpertGuided { delta: x, .. }
            | GameSpec::OptimismTrap { delta: x, .. } => {
                *x = delta;
                applied.delta = true;
            }
            _ => {}
        }
    }
    if let Some(zeta) = ov.zeta {
        if let GameSpec::ExpertGuided { zeta: x, .. } = &mut config.spec {
            *x = zeta;
            applied.zeta = true;
        }
    }
    if let Some(k) = ov.k {
        if let GameSpec::Polynomial { k: x, .. } = &mut config.spec {
            *x = k;
            applied.k = true;
        }
    }
    if let Some(eps) = ov.eps {
        match &mut config.agent {
            AgentSpec::Covering { eps: x, .. } | AgentSpec::ExpertGuided { eps: x, .. } => {
                *x = Some(eps);
                applied.eps = true;
            }
            AgentSpec::LinUcbNet { eps: x } | AgentSpec::OptimisticSphere { eps: x } => {
                *x = eps;
                applied.eps = true;
            }
            _ => {}
        }
    }
    applied
}

/// Fitted regret scaling exponent for one run.
#[derive(Debug, Clone, Serialize)]
struct ExponentReport {
    slope: f64,
    stderr: f64,
    window: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
struct RunReport {
    label: String,
    /// Experiment column value used for this run's trace rows.
    experiment: String,
    config: RunConfig,
    checkpoints: Vec<usize>,
    mean_regret: Vec<f64>,
    stderr_regret: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<ExponentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent_error: Option<String>,
    /// Fraction of seeds whose confidence ball covered the parameter at
    /// every round (imitation agent only).
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<f64>,
    wall_time_s: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    experiment: String,
    runs: Vec<RunReport>,
    /// Structural property checks, for the property-check preset.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    property_checks: Vec<crate::experiments::PolyCheckReport>,
    runtime_s: f64,
}

/// One CSV value: decimal scientific notation with 17 significant digits,
/// locale-independent.
fn fmt_val(x: f64) -> String {
    format!("{x:.16e}")
}

fn traces_csv(runs: &[(RunReport, Vec<crate::harness::RegretTrace>)]) -> String {
    let mut out = String::from("experiment,seed,checkpoint,cum_regret,empty_intersection_count\n");
    for (report, traces) in runs {
        for trace in traces {
            for (i, &c) in trace.checkpoints.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    report.experiment,
                    trace.seed,
                    c,
                    fmt_val(trace.cum_regret[i]),
                    trace.empty_intersections[i]
                );
            }
        }
    }
    out
}

fn write_outputs(dir: &Path, format: OutputFormat, csv: &str, summary: &Summary) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        std::fs::write(dir.join("traces.csv"), csv)?;
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let json = serde_json::to_string_pretty(summary)
            .map_err(|e| Error::Runtime(format!("summary serialization failed: {e}")))?;
        std::fs::write(dir.join("summary.json"), json)?;
    }
    Ok(())
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        "both" => Ok(OutputFormat::Both),
        other => Err(Error::Config(format!(
            "unknown format '{other}' (expected csv, json, or both)"
        ))),
    }
}

fn list_presets() {
    for p in presets() {
        println!("{}", p.name);
        println!("  claim: {}", p.claim);
        println!("  expected: {}", p.expected);
        for r in &p.runs {
            let c = &r.config;
            println!(
                "  run {}: {} d={} T={} seeds={} sigma_r={} sigma_b={}",
                r.label,
                c.spec.name(),
                c.spec.d(),
                c.horizon,
                c.seeds.len(),
                c.noise.sigma_r,
                c.noise.sigma_b
            );
        }
    }
}

/// The preset whose claim is checked analytically rather than by episodes.
const PROPERTY_PRESET: &str = "poly-lipschitz-check";

fn resolve_runs(args: &RunArgs) -> Result<(String, Vec<PresetRun>, FileConfig)> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let preset_name = args.experiment.clone().or_else(|| file.experiment.clone());
    let (name, runs) = match (&preset_name, &file.run) {
        (Some(name), None) => {
            let preset: ExperimentPreset = find_preset(name)?;
            (preset.name.to_string(), preset.runs)
        }
        (None, Some(run)) => {
            let name = file.name.clone().unwrap_or_else(|| "custom".to_string());
            (
                name,
                vec![PresetRun {
                    label: "run".to_string(),
                    config: run.clone(),
                    fit_window: None,
                }],
            )
        }
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "config file must give either 'experiment' or '[run]', not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "nothing to run: pass --experiment NAME or --config PATH".into(),
            ))
        }
    };
    Ok((name, runs, file))
}

fn collect_overrides(args: &RunArgs, file: &FileConfig) -> Result<Overrides> {
    let seeds = match (&args.seeds, &file.seeds) {
        (Some(flag), _) => Some(parse_seeds_flag(flag)?),
        (None, Some(field)) => Some(field.resolve()?),
        (None, None) => None,
    };
    Ok(Overrides {
        horizon: args.horizon.or(file.horizon),
        d: args.d.or(file.d),
        seeds,
        sigma_r: args.sigma_r.or(file.sigma_r),
        sigma_b: args.sigma_b.or(file.sigma_b),
        delta: args.delta.or(file.delta),
        zeta: args.zeta.or(file.zeta),
        k: args.k.or(file.k),
        eps: args.eps.or(file.eps),
    })
}

fn run_command(args: &RunArgs) -> Result<()> {
    let started = Instant::now();
    let (name, mut runs, file) = resolve_runs(args)?;
    let overrides = collect_overrides(args, &file)?;
    let mut applied = Applied::default();
    for r in &mut runs {
        let a = apply_overrides(&mut r.config, &overrides);
        applied.delta |= a.delta;
        applied.zeta |= a.zeta;
        applied.k |= a.k;
        applied.eps |= a.eps;
    }
    for (flag, set, requested) in [
        ("--delta", applied.delta, overrides.delta.is_some()),
        ("--zeta", applied.zeta, overrides.zeta.is_some()),
        ("--k", applied.k, overrides.k.is_some()),
        ("--eps", applied.eps, overrides.eps.is_some()),
    ] {
        if requested && !set {
            return Err(Error::Config(format!(
                "{flag} does not apply to any run of '{name}'"
            )));
        }
    }
    for r in &runs {
        r.config.validate()?;
    }

    if let Some(n) = args.threads.or(file.threads) {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Runtime(format!("thread pool setup failed: {e}")))?;
    }

    let out_dir = args
        .out
        .clone()
        .or(file.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let format = match (&args.format, &file.format) {
        (Some(f), _) => *f,
        (None, Some(s)) => parse_format(s)?,
        (None, None) => OutputFormat::Both,
    };

    let multi = runs.len() > 1;
    let mut reports = Vec::new();
    for r in &runs {
        let run_started = Instant::now();
        let (summary, traces) = run_batch(&r.config)?;
        let experiment = if multi {
            format!("{name}:{}", r.label)
        } else {
            name.clone()
        };
        let (exponent, exponent_error) = match r.fit_window {
            Some(window) => match scaling_exponent(&summary, window) {
                Ok((slope, stderr)) => (
                    Some(ExponentReport {
                        slope,
                        stderr,
                        window,
                    }),
                    None,
                ),
                Err(e) => (None, Some(e.to_string())),
            },
            None => (None, None),
        };
        let coverage = match &r.config.agent {
            AgentSpec::Imitation { .. } => Some(coverage_rate(&r.config)?),
            _ => None,
        };
        reports.push((
            RunReport {
                label: r.label.clone(),
                experiment,
                config: r.config.clone(),
                checkpoints: summary.checkpoints,
                mean_regret: summary.mean_regret,
                stderr_regret: summary.stderr_regret,
                exponent,
                exponent_error,
                coverage,
                wall_time_s: run_started.elapsed().as_secs_f64(),
            },
            traces,
        ));
    }

    let property_checks = if name == PROPERTY_PRESET {
        let (d, seed) = match &runs[0].config.spec {
            GameSpec::Polynomial { d, .. } => (*d, runs[0].config.net_seed),
            _ => (4, 0),
        };
        [1u32, 2, 3]
            .iter()
            .map(|&k| poly_structure_check(d, k, 10_000, 1_000, seed))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let csv = traces_csv(&reports);
    let summary = Summary {
        experiment: name,
        runs: reports.into_iter().map(|(r, _)| r).collect(),
        property_checks,
        runtime_s: started.elapsed().as_secs_f64(),
    };
    write_outputs(&out_dir, format, &csv, &summary)?;
    println!(
        "wrote {} ({} run{}) to {}",
        summary.experiment,
        summary.runs.len(),
        if summary.runs.len() == 1 { "" } else { "s" },
        out_dir.display()
    );
    Ok(())
}

/// Entry point; returns the process exit code (0 success, 2 configuration
/// error, 3 runtime error).
pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list_presets();
            0
        }
        Command::Run(args) => match run_command(&args) {
            Ok(()) => 0,
            Err(e @ Error::Config(_)) => {
                eprintln!("{e}");
                2
            }
            Err(e) => {
                eprintln!("{e}");
                3
            }
        },
    }
}

//! `mesbench`: run benchmark campaigns, analyse them and plot the results.
//!
//! Exit codes: 0 ok, 1 usage, 2 invalid input, 3 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use mesbench::analysis::SobolOptions;
use mesbench::campaign::{
    analyze_metamodel, analyze_oat, analyze_sobol, emit_plots, load_campaign, run_campaign, run_single, CampaignError,
    CampaignOptions, PlotKind,
};
use mesbench::sampling::{grid_design, oat_design, saltelli_design, CampaignDesign, SamplingError};
use mesbench::scenario::{
    default_factors, load_factors, load_profiles, read_recipe, select_factors, write_factors, BenchmarkConfig,
    ScenarioError,
};

#[derive(Parser)]
#[command(name = "mesbench", version, about = "Multi-energy benchmark campaigns and scaling analysis")]
struct Cli {
    /// Log level (error, warn, info, debug, trace); RUST_LOG overrides it.
    #[arg(long, global = true, default_value = "info")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Oat,
    Sobol,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Sobol,
    Oat,
    Metamodel,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotArg {
    Sobol,
    Oat,
    Ranking,
    Surface,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a design and run every recipe of it.
    Campaign {
        #[arg(long, value_enum)]
        design: DesignArg,
        /// Factor definitions; the built-in factor set when omitted.
        #[arg(long)]
        factors: Option<PathBuf>,
        /// Benchmark configuration; the built-in baseline when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Saltelli base sample count N.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Add the BA blocks to the Saltelli layout.
        #[arg(long)]
        second_order: bool,
        /// Leading Sobol points to skip.
        #[arg(long, default_value_t = 0)]
        skip: u64,
        /// Restrict the design to these factors (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Grid axes (one or two factor names, comma separated).
        #[arg(long, value_delimiter = ',')]
        axes: Vec<String>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Skip writing per-run trajectories.
        #[arg(long)]
        no_trajectories: bool,
    },
    /// Simulate one recipe.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        recipe: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyse a campaign directory.
    Analyze {
        #[arg(long, value_enum)]
        kind: AnalyzeKind,
        /// Campaign output directory.
        #[arg(long)]
        runs: PathBuf,
        /// Metric column; all metrics when omitted (required for metamodel).
        #[arg(long)]
        metric: Option<String>,
        /// Meta-model polynomial degree.
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Output file; defaults to analysis.json, ranking.json or metamodel.json in the campaign directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        /// Bootstrap seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Render figures (SVG plus CSV) from an analysis file.
    Plot {
        #[arg(long, value_enum)]
        kind: PlotArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the built-in config.json, factors.json and profiles.csv.
    Defaults {
        #[arg(long)]
        out: PathBuf,
    },
}

/// An error plus the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn validation(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }

    fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 3, error: error.into() }
    }
}

impl From<CampaignError> for Failure {
    fn from(e: CampaignError) -> Self {
        if e.is_validation() {
            Self::validation(e)
        } else {
            Self::runtime(e)
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        if e.is_validation() {
            Self::validation(e)
        } else {
            Self::runtime(e)
        }
    }
}

impl From<SamplingError> for Failure {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::Scenario(s) => s.into(),
            other => Self::validation(other),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<BenchmarkConfig, Failure> {
    match path {
        Some(p) => BenchmarkConfig::load(p)
            .with_context(|| format!("loading {}", p.display()))
            .map_err(|e| {
                let validation = e.downcast_ref::<ScenarioError>().is_some_and(ScenarioError::is_validation);
                Failure { code: if validation { 2 } else { 3 }, error: e }
            }),
        None => Ok(BenchmarkConfig::default()),
    }
}

fn write_report<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::runtime)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::runtime)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::runtime)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build_design(
    kind: DesignArg,
    factors: Option<&Path>,
    only: &[String],
    samples: usize,
    second_order: bool,
    skip: u64,
    axes: &[String],
    points: usize,
) -> Result<CampaignDesign, Failure> {
    let all = match factors {
        Some(p) => load_factors(p)?,
        None => default_factors(),
    };
    let factors = if only.is_empty() {
        all
    } else {
        select_factors(&all, &only.iter().map(String::as_str).collect::<Vec<_>>())?
    };
    let design = match kind {
        DesignArg::Oat => oat_design(&factors)?,
        DesignArg::Sobol => saltelli_design(&factors, samples, second_order, skip)?,
        DesignArg::Grid => {
            if axes.is_empty() {
                return Err(Failure::validation(anyhow!("--axes is required for a grid design")));
            }
            let names: Vec<&str> = axes.iter().map(String::as_str).collect();
            grid_design(&factors, &names, points)?
        }
    };
    Ok(design)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Campaign {
            design,
            factors,
            config,
            samples,
            second_order,
            skip,
            only,
            axes,
            points,
            out,
            jobs,
            seed,
            no_trajectories,
        } => {
            let config = load_config(config.as_deref())?;
            let design =
                build_design(design, factors.as_deref(), &only, samples, second_order, skip, &axes, points)?;
            let mut opts = CampaignOptions::new(&out);
            if let Some(j) = jobs {
                opts.jobs = j.max(1);
            }
            opts.seed = seed;
            opts.write_trajectories = !no_trajectories;
            log::info!("{} runs, {} workers, output {}", design.len(), opts.jobs, out.display());
            let result = run_campaign(&design, &config, &opts)?;
            let failed = result.failed().count();
            if failed > 0 {
                log::warn!("{failed} of {} runs failed; see runs/<id>/metrics.json", result.runs.len());
            }
            println!("{}", out.join("results.csv").display());
        }
        Command::Run { config, recipe, out } => {
            let config = load_config(config.as_deref())?;
            let recipe = read_recipe(&recipe)?;
            let record = run_single(&config, &recipe, &out)?;
            if let Some(reason) = record.reason {
                return Err(Failure::runtime(anyhow!("run {} failed: {reason}", record.run_id)));
            }
            println!("{}", out.join("metrics.json").display());
        }
        Command::Analyze { kind, runs, metric, degree, out, resamples, seed, jobs } => {
            if !runs.is_dir() {
                return Err(Failure::validation(anyhow!("{} is not a campaign directory", runs.display())));
            }
            let campaign = load_campaign(&runs)?;
            let metrics: Vec<String> = metric.iter().cloned().collect();
            let path = match kind {
                AnalyzeKind::Sobol => {
                    let opts = SobolOptions {
                        resamples,
                        jobs: jobs.unwrap_or_else(mesbench::par::default_jobs).max(1),
                        ..Default::default()
                    };
                    let report = analyze_sobol(&campaign, &metrics, &opts, seed)?;
                    let path = out.unwrap_or_else(|| runs.join("analysis.json"));
                    write_report(&path, &report)?;
                    path
                }
                AnalyzeKind::Oat => {
                    let report = analyze_oat(&campaign, &metrics)?;
                    let path = out.unwrap_or_else(|| runs.join("ranking.json"));
                    write_report(&path, &report)?;
                    path
                }
                AnalyzeKind::Metamodel => {
                    let metric = metric
                        .ok_or_else(|| Failure::validation(anyhow!("--metric is required for a meta-model")))?;
                    let report = analyze_metamodel(&campaign, &metric, degree)?;
                    log::info!("R² = {:.6}, SSE = {:.6e}", report.model.stats.r2, report.model.stats.sse);
                    let path = out.unwrap_or_else(|| runs.join("metamodel.json"));
                    write_report(&path, &report)?;
                    path
                }
            };
            println!("{}", path.display());
        }
        Command::Plot { kind, input, out } => {
            let kind = match kind {
                PlotArg::Sobol => PlotKind::Sobol,
                PlotArg::Oat => PlotKind::Oat,
                PlotArg::Ranking => PlotKind::Ranking,
                PlotArg::Surface => PlotKind::Surface,
            };
            for f in emit_plots(kind, &input, &out)? {
                println!("{}", f.display());
            }
        }
        Command::Defaults { out } => {
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::runtime)?;
            let config = BenchmarkConfig::default();
            config.save(out.join("config.json"))?;
            write_factors(&default_factors(), out.join("factors.json"))?;
            load_profiles(&config)?.write_csv(out.join("profiles.csv"))?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

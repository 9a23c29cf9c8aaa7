use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tripartite_core::ScalarTimeSeries;
use tripartite_cli::config::{ConfigError, EpsilonRuleChoice, RawConfig, OUTPUT_DIR_ENV};
use tripartite_cli::output::{num, write_analysis, write_series, Metrics};
use tripartite_cli::pipeline::{analyze_series, simulate};
use tripartite_cli::sweep::run_sweep;
use tripartite_cli::verify;

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "tripartite", version, about = "Photon-number dynamics of a Lambda atom in two Kerr fields, and its nonlinear analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the mean photon number series of the first field.
    Simulate(SimulateArgs),
    /// Run the analysis pipeline on an existing series file.
    Analyze(AnalyzeArgs),
    /// Simulate and analyse every coupling value of a sweep.
    Sweep(SweepArgs),
    /// Run the built-in exactness and consistency checks of the model.
    Verify,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 25.0)]
    alpha_sq: f64,
    #[arg(long, default_value_t = 5.0)]
    chi_over_lambda: f64,
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 35_000)]
    total_steps: usize,
    #[arg(long, default_value_t = 10_000)]
    burn_in_steps: usize,
    /// Output CSV; defaults to `series.csv` in the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
}

/// Flags shared by `analyze` and `sweep`; each mirrors a configuration key.
#[derive(Args, Default)]
struct AnalysisFlags {
    #[arg(long, value_enum)]
    epsilon_rule: Option<EpsilonRuleChoice>,
    #[arg(long)]
    target_ld: Option<f64>,
    #[arg(long)]
    n_cells: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    delay_steps: Option<usize>,
    #[arg(long)]
    embedding_dimension: Option<usize>,
    #[arg(long)]
    theiler_window_steps: Option<usize>,
    #[arg(long)]
    fit_start_steps: Option<usize>,
    #[arg(long)]
    fit_end_steps: Option<usize>,
    #[arg(long)]
    plot_stride: Option<usize>,
    #[arg(long)]
    return_map_stride: Option<usize>,
    #[arg(long)]
    no_mle: bool,
    #[arg(long)]
    no_recurrence: bool,
    #[arg(long)]
    no_network: bool,
    #[arg(long)]
    no_returns: bool,
    #[arg(long)]
    no_spectrum: bool,
}

impl AnalysisFlags {
    fn raw(&self) -> RawConfig {
        let off = |flag: bool| flag.then_some(false);
        RawConfig {
            epsilon_rule: self.epsilon_rule,
            target_ld: self.target_ld,
            n_cells: self.n_cells,
            output_dir: self.output_dir.clone(),
            delay_steps: self.delay_steps,
            embedding_dimension: self.embedding_dimension,
            theiler_window_steps: self.theiler_window_steps,
            fit_start_steps: self.fit_start_steps,
            fit_end_steps: self.fit_end_steps,
            plot_stride: self.plot_stride,
            return_map_stride: self.return_map_stride,
            mle: off(self.no_mle),
            recurrence: off(self.no_recurrence),
            network: off(self.no_network),
            returns: off(self.no_returns),
            spectrum: off(self.no_spectrum),
            ..RawConfig::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV whose last column holds the series.
    #[arg(long)]
    series: PathBuf,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha_sq: Option<f64>,
    #[arg(long)]
    chi_over_lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    kappa_values: Option<Vec<f64>>,
    #[arg(long)]
    total_steps: Option<usize>,
    #[arg(long)]
    burn_in_steps: Option<usize>,
    /// Maximum number of worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    flags: AnalysisFlags,
}

fn config_failure(e: &ConfigError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.exit_code() == 3 { EXIT_VALIDATION } else { EXIT_PARSE })
}

fn runtime_failure(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(EXIT_RUNTIME)
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let sim = simulate(args.alpha_sq, args.chi_over_lambda, args.kappa, args.total_steps, args.burn_in_steps)?;
    let dir = args.output_dir.clone().unwrap_or_else(|| RawConfig::default().output_dir());
    let path = args.output.clone().unwrap_or_else(|| dir.join("series.csv"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_series(&path, sim.series.burn_in as f64 + 1.0, sim.series.dt, sim.series.values())?;
    println!(
        "wrote {} samples to {} (cutoffs {} x {}, collapse ratio {})",
        sim.series.len(),
        path.display(),
        sim.params.n_max,
        sim.params.m_max,
        num(sim.collapse)
    );
    Ok(())
}

fn run_analyze(args: &AnalyzeArgs, settings: &tripartite_cli::pipeline::AnalysisSettings) -> Result<()> {
    let values = tripartite_cli::output::read_series(&args.series)?;
    let series = ScalarTimeSeries::from_values(values)?;
    let analysis = analyze_series(&series, settings)?;
    let dir = args.flags.raw().output_dir();
    write_analysis(&dir, &analysis)?;
    let metrics = Metrics::from_analysis(&analysis);
    std::fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(&metrics)?)
        .context("writing metrics.json")?;
    println!("{}", serde_json::to_string_pretty(&metrics)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => match run_simulate(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => runtime_failure(&e),
        },
        Command::Analyze(args) => {
            let settings = match args.flags.raw().analysis_settings() {
                Ok(s) => s,
                Err(e) => return config_failure(&e),
            };
            match run_analyze(&args, &settings) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => runtime_failure(&e),
            }
        }
        Command::Sweep(args) => {
            let base = match &args.config {
                Some(path) => match RawConfig::from_path(path) {
                    Ok(raw) => raw,
                    Err(e) => return config_failure(&e),
                },
                None => RawConfig::default(),
            };
            let top = RawConfig {
                alpha_sq: args.alpha_sq,
                chi_over_lambda: args.chi_over_lambda,
                kappa_values: args.kappa_values.clone(),
                total_steps: args.total_steps,
                burn_in_steps: args.burn_in_steps,
                ..args.flags.raw()
            };
            let config = match base.overlay(&top).validate() {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            match run_sweep(&config, args.jobs) {
                Ok(report) => {
                    for s in &report.status {
                        match &s.error {
                            None => println!("kappa {}: ok ({:.1} s)", s.kappa, s.runtime_seconds),
                            Some(e) => println!("kappa {}: failed: {e}", s.kappa),
                        }
                    }
                    println!("summary written to {}", config.output_dir.join("summary.csv").display());
                    if report.all_failed() {
                        ExitCode::from(EXIT_RUNTIME)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => runtime_failure(&e),
            }
        }
        Command::Verify => match verify::run_all() {
            Ok(checks) => {
                for c in &checks {
                    println!("{c}");
                }
                if checks.iter().all(|c| c.passed) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => runtime_failure(&e),
        },
    }
}

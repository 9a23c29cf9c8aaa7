use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tripartite_core::embedding::{AMI_BINS, FNN_RATIO, FNN_THRESHOLD, MAX_DIMENSION, MAX_LAG};
use tripartite_core::network::{LD_MAX_ITERATIONS, LD_RELATIVE_TOLERANCE};
use tripartite_core::recurrence::{BISECTION_STEPS, RING_DIP_THRESHOLD, SPIKE_FRACTION};

use crate::config::SweepConfig;
use crate::output::{write_kappa, write_summary, KappaMetrics};
use crate::pipeline::{run_kappa, COLLAPSE_EARLY, COLLAPSE_LATE};

#[derive(Debug, Clone, Serialize)]
pub struct KappaStatus {
    pub kappa: f64,
    pub ok: bool,
    pub error: Option<String>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: SweepConfig,
    pub defaults: serde_json::Value,
    pub kappa_status: Vec<KappaStatus>,
    pub results: Vec<KappaMetrics>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub results: Vec<KappaMetrics>,
    pub status: Vec<KappaStatus>,
}

impl SweepReport {
    pub fn all_failed(&self) -> bool {
        self.status.iter().all(|s| !s.ok)
    }
}

fn defaults() -> serde_json::Value {
    serde_json::json!({
        "time_step_tau": 1.0,
        "lambda": 1.0,
        "fock_cutoff_rule": "ceil(x + 10 sqrt x), grown until the Poisson tail is below 1e-12",
        "collapse_windows_tau": { "early": COLLAPSE_EARLY, "late": COLLAPSE_LATE },
        "delay_rule": "first plateau minimum of the average mutual information, autocorrelation 1/e fallback",
        "ami_bins": AMI_BINS,
        "ami_max_lag": MAX_LAG,
        "fnn_ratio": FNN_RATIO,
        "fnn_threshold": FNN_THRESHOLD,
        "fnn_max_dimension": MAX_DIMENSION,
        "theiler_window_rule": "delay * dimension unless configured",
        "lyapunov_method": "Rosenstein nearest-neighbour divergence",
        "epsilon_critical_bisection_steps": BISECTION_STEPS,
        "epsilon_critical_upper_bound": "min(cloud diameter, largest consecutive step)",
        "link_density_relative_tolerance": LD_RELATIVE_TOLERANCE,
        "link_density_max_iterations": LD_MAX_ITERATIONS,
        "ring_dip_threshold": RING_DIP_THRESHOLD,
        "spike_fraction": SPIKE_FRACTION,
        "generic_cell_rule": "most visited cell",
        "csv_float_format": "17 significant digits",
    })
}

/// Runs every coupling value, writes per-coupling files, `summary.csv` and `manifest.json`.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepReport> {
    let root = &config.output_dir;
    fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build()?;
    let outcomes: Vec<(f64, Result<KappaMetrics>, f64)> = pool.install(|| {
        config
            .kappa_values
            .par_iter()
            .map(|&kappa| {
                let start = std::time::Instant::now();
                let res = run_kappa(config, kappa).and_then(|o| write_kappa(root, &o));
                (kappa, res, start.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut results = Vec::new();
    let mut status = Vec::new();
    for (kappa, res, runtime_seconds) in outcomes {
        match res {
            Ok(m) => {
                results.push(m);
                status.push(KappaStatus { kappa, ok: true, error: None, runtime_seconds });
            }
            Err(e) => status.push(KappaStatus { kappa, ok: false, error: Some(format!("{e:#}")), runtime_seconds }),
        }
    }
    write_summary(&root.join("summary.csv"), &results)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        defaults: defaults(),
        kappa_status: status.clone(),
        results: results.clone(),
    };
    write_manifest(&root.join("manifest.json"), &manifest)?;
    Ok(SweepReport { results, status })
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(manifest)?).with_context(|| format!("writing {}", path.display()))
}

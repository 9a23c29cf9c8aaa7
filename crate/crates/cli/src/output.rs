use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tripartite_core::recurrence::ReturnHistogram;

use crate::pipeline::{KappaOutcome, SeriesAnalysis, COLLAPSE_LATE};

/// Fixed 17-significant-digit rendering used in every CSV.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn kappa_dir(root: &Path, kappa: f64) -> PathBuf {
    root.join(format!("kappa_{kappa}"))
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(path: &Path, first_tau: f64, dt: f64, values: &[f64]) -> Result<()> {
    write_csv(
        path,
        &["tau", "mean_photon_number_1"],
        values.iter().enumerate().map(|(i, &v)| [num(first_tau + i as f64 * dt), num(v)]),
    )
}

/// Reads the last column of a two-column series CSV with a header row.
pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field = record.iter().next_back().context("empty row")?;
        out.push(field.trim().parse::<f64>().with_context(|| format!("row {}: `{field}` is not a number", line + 2))?);
    }
    Ok(out)
}

fn write_returns(dir: &Path, hist: &ReturnHistogram) -> Result<()> {
    let mut rows = Vec::new();
    for (cell, map) in hist.per_cell.iter().enumerate() {
        for (&t, &c) in map {
            rows.push([
                cell.to_string(),
                num(hist.edges[cell]),
                num(hist.edges[cell + 1]),
                t.to_string(),
                c.to_string(),
            ]);
        }
    }
    write_csv(&dir.join("return_times.csv"), &["cell", "lower_edge", "upper_edge", "return_time", "count"], rows)?;
    write_csv(
        &dir.join("return_times_pooled.csv"),
        &["return_time", "count"],
        hist.pooled.iter().map(|(t, c)| [t.to_string(), c.to_string()]),
    )
}

/// Writes every data file produced by one series analysis into `dir`.
pub fn write_analysis(dir: &Path, a: &SeriesAnalysis) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    if let Some(l) = &a.lyapunov {
        write_csv(
            &dir.join("divergence.csv"),
            &["step", "mean_log_divergence"],
            l.divergence.iter().enumerate().map(|(k, &v)| [k.to_string(), num(v)]),
        )?;
    }
    if a.critical.is_some() {
        write_csv(
            &dir.join("recurrence_pairs.csv"),
            &["i", "j"],
            a.plot_pairs.iter().map(|&(i, j)| [i.to_string(), j.to_string()]),
        )?;
    }
    let mut degree_rows = Vec::new();
    for (rule, m) in [("connectivity", &a.network_connectivity), ("target_ld", &a.network_target)] {
        if let Some(m) = m {
            for (&k, &c) in &m.degree_histogram {
                degree_rows.push([rule.to_string(), k.to_string(), c.to_string()]);
            }
        }
    }
    if !degree_rows.is_empty() {
        write_csv(&dir.join("degree_histogram.csv"), &["epsilon_rule", "degree", "count"], degree_rows)?;
    }
    if !a.return_map.is_empty() {
        write_csv(&dir.join("return_map.csv"), &["s_i", "s_next"], a.return_map.iter().map(|&(x, y)| [num(x), num(y)]))?;
    }
    if let Some(h) = &a.returns {
        write_returns(dir, h)?;
    }
    if let Some(s) = &a.spectrum {
        write_csv(
            &dir.join("spectrum.csv"),
            &["frequency", "power"],
            s.frequency.iter().zip(&s.power).map(|(&f, &p)| [num(f), num(p)]),
        )?;
    }
    Ok(())
}

/// Scalar results for one series, in the column order of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub delay: usize,
    pub dimension: usize,
    pub lyapunov: Option<f64>,
    pub lyapunov_r_squared: Option<f64>,
    pub epsilon_connectivity: Option<f64>,
    pub epsilon_target_ld: Option<f64>,
    pub recurrence_density: Option<f64>,
    pub cc_connectivity: Option<f64>,
    pub t_connectivity: Option<f64>,
    pub ld_target: Option<f64>,
    pub cc_target: Option<f64>,
    pub t_target: Option<f64>,
    pub ring_dip: Option<f64>,
    pub generic_cell: Option<usize>,
    pub dominant_return_time: Option<usize>,
    pub secondary_return_times: Option<Vec<usize>>,
}

impl Metrics {
    pub fn from_analysis(a: &SeriesAnalysis) -> Self {
        Metrics {
            delay: a.delay,
            dimension: a.dimension,
            lyapunov: a.lyapunov.as_ref().map(|l| l.exponent),
            lyapunov_r_squared: a.lyapunov.as_ref().map(|l| l.r_squared),
            epsilon_connectivity: a.critical.map(|c| c.epsilon),
            epsilon_target_ld: a.link_density_search.map(|s| s.epsilon),
            recurrence_density: a.recurrence_density,
            cc_connectivity: a.network_connectivity.as_ref().map(|m| m.global_clustering),
            t_connectivity: a.network_connectivity.as_ref().map(|m| m.transitivity),
            ld_target: a.network_target.as_ref().map(|m| m.link_density),
            cc_target: a.network_target.as_ref().map(|m| m.global_clustering),
            t_target: a.network_target.as_ref().map(|m| m.transitivity),
            ring_dip: a.ring.map(|r| r.dip),
            generic_cell: a.generic_cell,
            dominant_return_time: a.generic_spikes.as_ref().map(|s| s.dominant),
            secondary_return_times: a.generic_spikes.as_ref().map(|s| s.secondary.iter().map(|p| p.0).collect()),
        }
    }
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "kappa",
    "collapse_ratio",
    "delay",
    "dimension",
    "lyapunov",
    "lyapunov_r_squared",
    "epsilon_connectivity",
    "epsilon_target_ld",
    "recurrence_density",
    "cc_connectivity",
    "t_connectivity",
    "ld_target",
    "cc_target",
    "t_target",
    "ring_dip",
    "dominant_return_time",
];

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn summary_row(kappa: f64, collapse: f64, m: &Metrics) -> Vec<String> {
    vec![
        num(kappa),
        num(collapse),
        m.delay.to_string(),
        m.dimension.to_string(),
        opt(m.lyapunov),
        opt(m.lyapunov_r_squared),
        opt(m.epsilon_connectivity),
        opt(m.epsilon_target_ld),
        opt(m.recurrence_density),
        opt(m.cc_connectivity),
        opt(m.t_connectivity),
        opt(m.ld_target),
        opt(m.cc_target),
        opt(m.t_target),
        opt(m.ring_dip),
        m.dominant_return_time.map(|t| t.to_string()).unwrap_or_default(),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaMetrics {
    pub kappa: f64,
    pub n_max: usize,
    pub m_max: usize,
    pub collapse_ratio: f64,
    pub theiler_window: usize,
    pub embedded_points: usize,
    pub fnn_fractions: Vec<f64>,
    pub dimension_capped: bool,
    pub lyapunov_linear_fit: Option<bool>,
    #[serde(flatten)]
    pub metrics: Metrics,
}

/// Writes the per-coupling directory and returns its metrics.
pub fn write_kappa(root: &Path, outcome: &KappaOutcome) -> Result<KappaMetrics> {
    let dir = kappa_dir(root, outcome.kappa);
    let a = &outcome.analysis;
    write_analysis(&dir, a)?;
    let sim = &outcome.simulation;
    write_series(&dir.join("series.csv"), sim.series.burn_in as f64 + 1.0, sim.series.dt, sim.series.values())?;
    write_series(&dir.join("transient.csv"), 0.0, 1.0, &sim.transient[..=COLLAPSE_LATE.1])?;
    let km = KappaMetrics {
        kappa: outcome.kappa,
        n_max: sim.params.n_max,
        m_max: sim.params.m_max,
        collapse_ratio: sim.collapse,
        theiler_window: a.theiler_window,
        embedded_points: a.embedded_points,
        fnn_fractions: a.fnn_fractions.clone(),
        dimension_capped: a.dimension_capped,
        lyapunov_linear_fit: a.lyapunov.as_ref().map(|l| l.is_linear()),
        metrics: Metrics::from_analysis(a),
    };
    fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(&km)?)?;
    Ok(km)
}

pub fn write_summary(path: &Path, rows: &[KappaMetrics]) -> Result<()> {
    write_csv(path, &SUMMARY_HEADER, rows.iter().map(|k| summary_row(k.kappa, k.collapse_ratio, &k.metrics)))
}

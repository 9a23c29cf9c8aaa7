use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use tripartite_core::embedding::{
    delay_embed, max_lyapunov, select_delay_detailed, select_dimension_detailed, DelayRule, LyapunovEstimate,
};
use tripartite_core::model::{collapse_statistic, series_from_dynamics, Dynamics, Field, ModelParams};
use tripartite_core::network::{
    epsilon_by_link_density_detailed, network_measures, recurrence_network, LinkDensitySearch, NetworkMeasures,
};
use tripartite_core::recurrence::{
    epsilon_critical_with, first_return_distribution, power_spectrum, recurrence_density, recurrence_plot_pairs,
    return_map, ring_statistic, spikes, CriticalEpsilon, ReturnHistogram, RingStatistic, Spectrum, SpikeSummary,
    BISECTION_STEPS, SPIKE_FRACTION,
};
use tripartite_core::ScalarTimeSeries;

use crate::config::{Analyses, EpsilonRuleChoice, SweepConfig};

/// Window boundaries, in units of `tau`, for the collapse ratio.
pub const COLLAPSE_EARLY: (usize, usize) = (0, 3000);
pub const COLLAPSE_LATE: (usize, usize) = (3000, 9000);

/// Settings that apply to any scalar series, simulated or loaded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisSettings {
    pub analyses: Analyses,
    pub epsilon_rule: EpsilonRuleChoice,
    pub target_ld: f64,
    pub n_cells: usize,
    /// Fixed delay; selected from the data when absent.
    pub delay_steps: Option<usize>,
    /// Fixed dimension; selected from the data when absent.
    pub embedding_dimension: Option<usize>,
    /// Defaults to `delay * dimension`.
    pub theiler_window_steps: Option<usize>,
    pub fit_range: (usize, usize),
    pub plot_stride: usize,
    pub return_map_stride: usize,
}

#[derive(Debug, Clone)]
pub struct SeriesAnalysis {
    pub delay: usize,
    /// `None` when the delay was fixed by configuration.
    pub delay_rule: Option<DelayRule>,
    pub dimension: usize,
    pub fnn_fractions: Vec<f64>,
    pub dimension_capped: bool,
    pub embedded_points: usize,
    pub theiler_window: usize,
    pub lyapunov: Option<LyapunovEstimate>,
    pub critical: Option<CriticalEpsilon>,
    pub recurrence_density: Option<f64>,
    pub plot_pairs: Vec<(usize, usize)>,
    pub network_connectivity: Option<NetworkMeasures>,
    pub link_density_search: Option<LinkDensitySearch>,
    pub network_target: Option<NetworkMeasures>,
    pub return_map: Vec<(f64, f64)>,
    pub ring: Option<RingStatistic>,
    pub returns: Option<ReturnHistogram>,
    pub generic_cell: Option<usize>,
    pub generic_spikes: Option<SpikeSummary>,
    pub spectrum: Option<Spectrum>,
}

pub fn analyze_series(series: &ScalarTimeSeries, settings: &AnalysisSettings) -> Result<SeriesAnalysis> {
    let (delay, delay_rule) = match settings.delay_steps {
        Some(d) => (d, None),
        None => {
            let sel = select_delay_detailed(series).context("selecting the delay")?;
            (sel.delay, Some(sel.rule))
        }
    };
    let (dimension, fnn_fractions, dimension_capped) = match settings.embedding_dimension {
        Some(d) => (d, Vec::new(), false),
        None => {
            let sel = select_dimension_detailed(series, delay).context("selecting the embedding dimension")?;
            (sel.dim, sel.fractions, sel.capped)
        }
    };
    let cloud = delay_embed(series, delay, dimension).context("embedding the series")?;
    let theiler_window = settings.theiler_window_steps.unwrap_or(delay * dimension);
    let a = settings.analyses;

    let lyapunov = if a.mle {
        Some(max_lyapunov(&cloud, theiler_window, settings.fit_range).context("estimating the Lyapunov exponent")?)
    } else {
        None
    };

    let want_connectivity = settings.epsilon_rule != EpsilonRuleChoice::TargetLd;
    let want_target = settings.epsilon_rule != EpsilonRuleChoice::Connectivity;
    let critical = if a.recurrence || (a.network && want_connectivity) {
        Some(epsilon_critical_with(&cloud, BISECTION_STEPS).context("locating the critical threshold")?)
    } else {
        None
    };
    let (recurrence_density, plot_pairs) = match (a.recurrence, critical) {
        (true, Some(c)) => (
            Some(recurrence_density(&cloud, c.epsilon)),
            recurrence_plot_pairs(&cloud, c.epsilon, settings.plot_stride),
        ),
        _ => (None, Vec::new()),
    };
    let network_connectivity = match (a.network && want_connectivity, critical) {
        (true, Some(c)) => Some(network_measures(&recurrence_network(&cloud, c.epsilon))?),
        _ => None,
    };
    let (link_density_search, network_target) = if a.network && want_target {
        let search = epsilon_by_link_density_detailed(&cloud, settings.target_ld)
            .context("searching for the target link density")?;
        let measures = network_measures(&recurrence_network(&cloud, search.epsilon))?;
        (Some(search), Some(measures))
    } else {
        (None, None)
    };

    let (return_map_pairs, ring, returns, generic_cell, generic_spikes) = if a.returns {
        let map = return_map(series, settings.return_map_stride);
        let ring = ring_statistic(&map).context("measuring the return-map ring")?;
        let hist = first_return_distribution(series, settings.n_cells).context("collecting return times")?;
        let cell = hist.generic_cell();
        let sp = spikes(&hist.per_cell[cell], SPIKE_FRACTION);
        (map, Some(ring), Some(hist), Some(cell), sp)
    } else {
        (Vec::new(), None, None, None, None)
    };

    let spectrum = if a.spectrum { Some(power_spectrum(series).context("computing the power spectrum")?) } else { None };

    Ok(SeriesAnalysis {
        delay,
        delay_rule,
        dimension,
        fnn_fractions,
        dimension_capped,
        embedded_points: cloud.len(),
        theiler_window,
        lyapunov,
        critical,
        recurrence_density,
        plot_pairs,
        network_connectivity,
        link_density_search,
        network_target,
        return_map: return_map_pairs,
        ring,
        returns,
        generic_cell,
        generic_spikes,
        spectrum,
    })
}

/// Simulated trajectory for one coupling value.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub params: ModelParams,
    /// `<N_1>` at `tau = 0, 1, ..., COLLAPSE_LATE.1`.
    pub transient: Vec<f64>,
    /// Post-burn-in series.
    pub series: ScalarTimeSeries,
    pub collapse: f64,
}

pub fn simulate(alpha_sq: f64, chi_over_lambda: f64, kappa: f64, total_steps: usize, burn_in: usize) -> Result<Simulation> {
    let params = ModelParams::from_alpha_sq(chi_over_lambda, kappa, alpha_sq)?;
    let dynamics = Dynamics::new(&params)?;
    let series = series_from_dynamics(&dynamics, total_steps, burn_in)?;
    let transient = dynamics.sample_mean_photon_number(Field::One, 0.0, 1.0, COLLAPSE_LATE.1 + 1);
    let collapse = collapse_statistic(
        &transient,
        COLLAPSE_EARLY.0..COLLAPSE_EARLY.1 + 1,
        COLLAPSE_LATE.0..COLLAPSE_LATE.1 + 1,
    )?;
    Ok(Simulation { params, transient, series, collapse })
}

#[derive(Debug, Clone)]
pub struct KappaOutcome {
    pub kappa: f64,
    pub simulation: Simulation,
    pub analysis: SeriesAnalysis,
    pub runtime_seconds: f64,
}

pub fn run_kappa(config: &SweepConfig, kappa: f64) -> Result<KappaOutcome> {
    let start = Instant::now();
    let simulation = simulate(config.alpha_sq, config.chi_over_lambda, kappa, config.total_steps, config.burn_in_steps)
        .with_context(|| format!("simulating kappa = {kappa}"))?;
    let analysis = analyze_series(&simulation.series, &config.analysis)
        .with_context(|| format!("analysing kappa = {kappa}"))?;
    Ok(KappaOutcome { kappa, simulation, analysis, runtime_seconds: start.elapsed().as_secs_f64() })
}

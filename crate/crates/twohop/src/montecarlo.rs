//! Monte Carlo verification of the closed forms: squared error risk,
//! entry reach probability, expected edit distance, and a concentration
//! diagnostic for the normalized edit distance.
//!
//! Replications run in parallel but results are collected in replication
//! order and reduced sequentially with compensated sums, so every number
//! is bit-identical regardless of worker count. Entry addressing is
//! density-independent (common random numbers): rerunning an experiment
//! at a higher density reuses the same underlying draws, which makes
//! monotonicity comparisons across grid points sharp at modest sample
//! sizes.

use rayon::prelude::*;

use crate::ensemble::{sample_spike_slab, EnsembleParams, SeedSpec, STREAM_D, STREAM_E, STREAM_F};
use crate::error::{Error, Result};
use crate::linalg::{kahan_sum, Matrix};
use crate::metrics::{ged_tau, weighted_edge_cost, Thresholds};
use crate::theory::{
    atom_at_zero, demand_support_prob, expected_edge_cost, expected_frobenius_risk, expected_ged,
    reach_probability_surrogate, CostModel,
};

/// Sample mean with its standard error over independent replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub mean: f64,
    pub std_error: f64,
    pub replications: usize,
    pub master_seed: u64,
}

fn estimate(values: &[f64], master_seed: u64) -> EstimateWithError {
    let n = values.len();
    let mean = kahan_sum(values) / n as f64;
    let devs: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = kahan_sum(&devs) / (n as f64 - 1.0);
    EstimateWithError {
        mean,
        std_error: (variance / n as f64).sqrt(),
        replications: n,
        master_seed,
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    } else {
        diff / se
    }
}

fn check_replications(replications: usize, minimum: usize) -> Result<()> {
    if replications < minimum {
        return Err(Error::Domain(format!(
            "replications must be at least {minimum}, got {replications}"
        )));
    }
    Ok(())
}

fn sample_pair(
    params: &EnsembleParams,
    p_d: f64,
    p_e: f64,
    master_seed: u64,
    replication: u64,
) -> Result<(Matrix, Matrix)> {
    let spec = |stream_id| SeedSpec { master_seed, stream_id, replication_index: replication };
    let d = sample_spike_slab(params.k, params.n, p_d, params.v_d, 0.0, &spec(STREAM_D))?;
    let e = sample_spike_slab(params.n, params.l, p_e, params.v_e, 0.0, &spec(STREAM_E))?;
    Ok((d, e))
}

fn sample_demand(params: &EnsembleParams, master_seed: u64, replication: u64) -> Result<Matrix> {
    let spec = SeedSpec { master_seed, stream_id: STREAM_F, replication_index: replication };
    sample_spike_slab(params.k, params.l, params.p_f, params.v_f, params.mu_f, &spec)
}

/// Empirical squared Frobenius error against its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskExperiment {
    pub empirical: EstimateWithError,
    pub theoretical: f64,
    pub z_score: f64,
}

/// Estimate `E ‖DE - F‖_F^2` over independent instances and compare with
/// [`expected_frobenius_risk`]. `z_score` is the deviation in standard
/// errors.
pub fn run_risk_experiment(
    params: &EnsembleParams,
    replications: usize,
    master_seed: u64,
) -> Result<RiskExperiment> {
    params.validate()?;
    check_replications(replications, 30)?;
    let values: Vec<f64> = (0..replications as u64)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let (d, e) = sample_pair(params, params.p_d, params.p_e, master_seed, r)?;
            let f = sample_demand(params, master_seed, r)?;
            let err = d.matmul(&e)?.sub(&f)?.frobenius_norm();
            Ok(err * err)
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical = estimate(&values, master_seed);
    let theoretical = expected_frobenius_risk(params);
    Ok(RiskExperiment {
        empirical,
        theoretical,
        z_score: z_score(empirical.mean - theoretical, empirical.std_error),
    })
}

/// Empirical reach probability against the Gaussian surrogate, with the
/// exact-zero atom reported to quantify surrogate bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachExperiment {
    pub empirical_q: EstimateWithError,
    pub surrogate_q: f64,
    /// `empirical_q.mean - surrogate_q`; negative when the surrogate is
    /// optimistic, which it is at low effective path counts.
    pub gap: f64,
    pub atom_empirical: f64,
    pub atom_analytic: f64,
}

/// Estimate the fraction of entries of `DE` with `|A_kl| >= tau` and
/// compare with `2 Q(tau / sigma_a)`.
pub fn run_reach_experiment(
    params: &EnsembleParams,
    p_d: f64,
    p_e: f64,
    tau: f64,
    replications: usize,
    master_seed: u64,
) -> Result<ReachExperiment> {
    params.validate()?;
    check_replications(replications, 2)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let cells = params.k * params.l;
    if replications * cells < 100_000 {
        return Err(Error::Domain(format!(
            "need at least 100000 entry samples, got {replications} x {cells}"
        )));
    }
    let per_rep: Vec<(f64, f64)> = (0..replications as u64)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64)> {
            let (d, e) = sample_pair(params, p_d, p_e, master_seed, r)?;
            let a = d.matmul(&e)?;
            let reached = a.data().iter().filter(|x| x.abs() >= tau).count();
            let zeros = a.data().iter().filter(|x| **x == 0.0).count();
            Ok((reached as f64 / cells as f64, zeros as f64 / cells as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let q_values: Vec<f64> = per_rep.iter().map(|(q, _)| *q).collect();
    let zero_values: Vec<f64> = per_rep.iter().map(|(_, z)| *z).collect();
    let empirical_q = estimate(&q_values, master_seed);
    let surrogate_q = reach_probability_surrogate(params, p_d, p_e, tau);
    Ok(ReachExperiment {
        empirical_q,
        surrogate_q,
        gap: empirical_q.mean - surrogate_q,
        atom_empirical: kahan_sum(&zero_values) / zero_values.len() as f64,
        atom_analytic: atom_at_zero(params, p_d, p_e),
    })
}

/// Conditional-mean check separating surrogate bias from the decoupling
/// assumption: per replication, `diff = ged - K L (q_hat (1-p_s) +
/// (1-q_hat) p_s)` with `q_hat` the realized reach fraction. Since the
/// demand support is independent of the map, `E[diff | DE] = 0` exactly,
/// so `z = mean/se` isolates any failure of entrywise decoupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecouplingCheck {
    pub mean_diff: f64,
    pub se_diff: f64,
    pub z: f64,
}

/// Empirical edit distance and weighted cost against the decoupled
/// closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GedExperiment {
    pub empirical_ged: EstimateWithError,
    pub theoretical_ged: f64,
    /// `(empirical - theoretical) / theoretical`; carries the reach
    /// surrogate bias, unlike the decoupling z which nets it out.
    pub relative_gap: f64,
    pub empirical_cost: EstimateWithError,
    pub theoretical_cost: f64,
    pub empirical_q: EstimateWithError,
    pub decoupling: DecouplingCheck,
}

/// Estimate the edit distance between thresholded `DE` and thresholded
/// `F`, its weighted cost, and the decoupling diagnostic.
pub fn run_ged_experiment(
    params: &EnsembleParams,
    p_d: f64,
    p_e: f64,
    th: &Thresholds,
    costs: &CostModel,
    replications: usize,
    master_seed: u64,
) -> Result<GedExperiment> {
    params.validate()?;
    th.validate()?;
    costs.validate()?;
    check_replications(replications, 30)?;
    let cells = (params.k * params.l) as f64;
    let p_s = demand_support_prob(params, th.tau_f);
    let per_rep: Vec<(f64, f64, f64, f64)> = (0..replications as u64)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64, f64, f64)> {
            let (d, e) = sample_pair(params, p_d, p_e, master_seed, r)?;
            let f = sample_demand(params, master_seed, r)?;
            let a = d.matmul(&e)?;
            let g = ged_tau(&a, &f, th)?;
            let predicted = g.predicted_edges as f64;
            let conditional_mean = predicted * (1.0 - p_s) + (cells - predicted) * p_s;
            Ok((
                g.total as f64,
                weighted_edge_cost(&g, costs),
                predicted / cells,
                g.total as f64 - conditional_mean,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let geds: Vec<f64> = per_rep.iter().map(|t| t.0).collect();
    let costs_v: Vec<f64> = per_rep.iter().map(|t| t.1).collect();
    let qs: Vec<f64> = per_rep.iter().map(|t| t.2).collect();
    let diffs: Vec<f64> = per_rep.iter().map(|t| t.3).collect();

    let empirical_ged = estimate(&geds, master_seed);
    let theoretical_ged = expected_ged(params, p_d, p_e, th);
    let diff_est = estimate(&diffs, master_seed);
    let q_surr = reach_probability_surrogate(params, p_d, p_e, th.tau);
    Ok(GedExperiment {
        empirical_ged,
        theoretical_ged,
        relative_gap: (empirical_ged.mean - theoretical_ged) / theoretical_ged,
        empirical_cost: estimate(&costs_v, master_seed),
        theoretical_cost: cells * expected_edge_cost(q_surr, p_s, costs),
        empirical_q: estimate(&qs, master_seed),
        decoupling: DecouplingCheck {
            mean_diff: diff_est.mean,
            se_diff: diff_est.std_error,
            z: z_score(diff_est.mean, diff_est.std_error),
        },
    })
}

/// Spread of the normalized edit distance at one problem scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationDiagnostic {
    pub k: usize,
    pub l: usize,
    pub mean_normalized_ged: f64,
    /// Sample standard deviation of `GED / (K L)` across replications.
    pub normalized_std: f64,
    pub replications: usize,
}

impl ConcentrationDiagnostic {
    pub fn scale(&self) -> usize {
        self.k * self.l
    }
}

/// Measure how the normalized edit distance concentrates as the problem
/// grows: at least three scales, each with its own `(k, l)` and shared
/// remaining parameters. Under an averaging concentration heuristic the
/// standard deviation should shrink roughly like `1/sqrt(K L)`.
pub fn concentration_diagnostic(
    params_by_scale: &[EnsembleParams],
    th: &Thresholds,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<ConcentrationDiagnostic>> {
    if params_by_scale.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 scales, got {}",
            params_by_scale.len()
        )));
    }
    th.validate()?;
    check_replications(replications, 2)?;
    let mut out = Vec::with_capacity(params_by_scale.len());
    for (scale_index, params) in params_by_scale.iter().enumerate() {
        params.validate()?;
        let cells = (params.k * params.l) as f64;
        // separate the scales in seed space so draws are independent
        let scale_seed = master_seed.wrapping_add(scale_index as u64);
        let normalized: Vec<f64> = (0..replications as u64)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let (d, e) = sample_pair(params, params.p_d, params.p_e, scale_seed, r)?;
                let f = sample_demand(params, scale_seed, r)?;
                let a = d.matmul(&e)?;
                let g = ged_tau(&a, &f, th)?;
                Ok(g.total as f64 / cells)
            })
            .collect::<Result<Vec<_>>>()?;
        let est = estimate(&normalized, scale_seed);
        out.push(ConcentrationDiagnostic {
            k: params.k,
            l: params.l,
            mean_normalized_ged: est.mean,
            normalized_std: est.std_error * (replications as f64).sqrt(),
            replications,
        });
    }
    Ok(out)
}

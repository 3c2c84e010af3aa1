//! Closed-form predictions for spike-and-slab two-hop ensembles.
//!
//! Everything here is analytic: expected squared Frobenius error of the
//! realized map against demand, a Gaussian surrogate for the probability
//! that a map entry clears its threshold, expected graph edit distance and
//! weighted edge cost under entrywise decoupling, and the feasibility
//! geometry (recall line, density knee) used by the design sweep.

use std::fmt;
use std::str::FromStr;

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};
pub use crate::gauss::{gaussian_q, gaussian_q_inv};
use crate::metrics::Thresholds;

/// Asymmetric edge costs and service constraints for design decisions.
///
/// `c_minus` prices a missed demand edge, `c_plus` a spurious predicted
/// edge. `rho` is the target reach probability on the recall branch and
/// `p_e_cap` the per-column density budget for the right factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub c_minus: f64,
    pub c_plus: f64,
    pub rho: f64,
    pub p_e_cap: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { c_minus: 10.0, c_plus: 0.25, rho: 0.90, p_e_cap: 0.20 }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("c_minus", self.c_minus), ("c_plus", self.c_plus)] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::Domain(format!("costs.{name} must be nonnegative, got {c}")));
            }
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Domain(format!("costs.rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.p_e_cap > 0.0 && self.p_e_cap <= 1.0) {
            return Err(Error::Domain(format!(
                "costs.p_e_cap must lie in (0, 1], got {}",
                self.p_e_cap
            )));
        }
        Ok(())
    }
}

/// Which occupancy estimate feeds the boundary slope.
///
/// `ThresholdAware` uses the probability that a demand entry survives its
/// own threshold; `RawPF` uses the raw demand density and overstates the
/// miss pressure whenever thresholding prunes part of the slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeVariant {
    ThresholdAware,
    RawPF,
}

impl SlopeVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            SlopeVariant::ThresholdAware => "threshold_aware",
            SlopeVariant::RawPF => "raw_pf",
        }
    }
}

impl fmt::Display for SlopeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlopeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold_aware" => Ok(SlopeVariant::ThresholdAware),
            "raw_pf" => Ok(SlopeVariant::RawPF),
            other => Err(Error::Config(format!(
                "slope_variant must be \"threshold_aware\" or \"raw_pf\", got \"{other}\""
            ))),
        }
    }
}

/// Outcome of a constraint inversion that may have no admissible density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feasibility {
    Feasible(f64),
    Infeasible,
}

impl Feasibility {
    pub fn value(self) -> Option<f64> {
        match self {
            Feasibility::Feasible(v) => Some(v),
            Feasibility::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// A candidate design point on the density plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub p_d: f64,
    pub p_e: f64,
}

/// Standard deviation of one entry of `DE` at the given densities:
/// `sqrt(n * p_d * p_e * v_d * v_e)`.
pub fn sigma_a(params: &EnsembleParams, p_d: f64, p_e: f64) -> f64 {
    (params.n as f64 * p_d * p_e * params.v_d * params.v_e).sqrt()
}

/// Expected squared Frobenius distance between the realized map `DE` and
/// an independent demand matrix `F`:
///
/// `k * l * (n p_d p_e v_d v_e  +  p_f v_f  +  p_f mu_f^2)`
///
/// The first term is the per-entry variance of `DE`, the rest the second
/// moment of a demand entry; the cross term vanishes because `DE` has mean
/// zero and is independent of `F`.
pub fn expected_frobenius_risk(params: &EnsembleParams) -> f64 {
    let t = params.n as f64 * params.p_d * params.p_e * params.v_d * params.v_e;
    let demand_second_moment = params.p_f * params.v_f + params.p_f * params.mu_f * params.mu_f;
    params.k as f64 * params.l as f64 * (t + demand_second_moment)
}

/// Gaussian surrogate for the probability that `|A_kl| >= tau`: treats the
/// entry as `N(0, sigma_a^2)` and returns `2 Q(tau / sigma_a)`.
///
/// The surrogate ignores the atom at zero (all `n` two-hop paths absent,
/// probability `(1 - p_d p_e)^n`) and the excess kurtosis of a sparse sum,
/// so it overestimates reach at low effective degree `n p_d p_e`; see
/// [`atom_at_zero`] for the dominant correction.
pub fn reach_probability_surrogate(params: &EnsembleParams, p_d: f64, p_e: f64, tau: f64) -> f64 {
    let sigma = sigma_a(params, p_d, p_e);
    if sigma == 0.0 {
        return 0.0;
    }
    2.0 * gaussian_q(tau / sigma)
}

/// Probability that an entry of `DE` is exactly zero because no two-hop
/// path through any of the `n` middle vertices is present.
pub fn atom_at_zero(params: &EnsembleParams, p_d: f64, p_e: f64) -> f64 {
    (1.0 - p_d * p_e).powi(params.n as i32)
}

/// Probability that a demand entry survives its threshold:
/// `p_f * (Q((tau_f - mu_f)/sqrt(v_f)) + Q((tau_f + mu_f)/sqrt(v_f)))`.
///
/// Reduces to `p_f * 2 Q(tau_f / sqrt(v_f))` for a centered slab.
pub fn demand_support_prob(params: &EnsembleParams, tau_f: f64) -> f64 {
    let s = params.v_f.sqrt();
    params.p_f * (gaussian_q((tau_f - params.mu_f) / s) + gaussian_q((tau_f + params.mu_f) / s))
}

/// Expected per-entry edge cost when predicted and demand supports are
/// decoupled: `c_minus * p_s * (1 - q) + c_plus * (1 - p_s) * q`.
pub fn expected_edge_cost(q: f64, p_s: f64, costs: &CostModel) -> f64 {
    costs.c_minus * p_s * (1.0 - q) + costs.c_plus * (1.0 - p_s) * q
}

/// Derivative of the per-entry edge cost in `q`. Negative slope means
/// raising reach pays; positive means spurious edges dominate.
pub fn boundary_slope(p_s: f64, p_f: f64, costs: &CostModel, variant: SlopeVariant) -> f64 {
    let occupancy = match variant {
        SlopeVariant::ThresholdAware => p_s,
        SlopeVariant::RawPF => p_f,
    };
    costs.c_plus * (1.0 - occupancy) - costs.c_minus * occupancy
}

/// Expected graph edit distance between thresholded `DE` and thresholded
/// `F` under the decoupled surrogate: `k * l * (p_s (1-q) + (1-p_s) q)`.
pub fn expected_ged(params: &EnsembleParams, p_d: f64, p_e: f64, th: &Thresholds) -> f64 {
    let q = reach_probability_surrogate(params, p_d, p_e, th.tau);
    let p_s = demand_support_prob(params, th.tau_f);
    params.k as f64 * params.l as f64 * (p_s * (1.0 - q) + (1.0 - p_s) * q)
}

/// Minimum right-factor density achieving reach `rho` at the given `p_d`:
/// inverts `2 Q(tau / sigma_a) = rho` to
///
/// `p_e = tau^2 / (n p_d v_d v_e Qinv(rho/2)^2)`
///
/// `Infeasible` when `p_d` is zero or the required density exceeds 1.
pub fn recall_line_pe(params: &EnsembleParams, p_d: f64, tau: f64, rho: f64) -> Result<Feasibility> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if p_d <= 0.0 {
        return Ok(Feasibility::Infeasible);
    }
    let z = gaussian_q_inv(rho / 2.0)?;
    let p_e = tau * tau / (params.n as f64 * p_d * params.v_d * params.v_e * z * z);
    if p_e > 1.0 {
        return Ok(Feasibility::Infeasible);
    }
    Ok(Feasibility::Feasible(p_e))
}

/// Left-factor density at which the recall line crosses the density cap:
/// below it the cap cannot deliver reach `rho`, above it the cap branch
/// already exceeds `rho`. Same inversion as [`recall_line_pe`] with the
/// roles of `p_d` and `p_e` swapped.
pub fn knee_pd(params: &EnsembleParams, tau: f64, rho: f64, p_e_cap: f64) -> Result<Feasibility> {
    if !(p_e_cap > 0.0 && p_e_cap <= 1.0) {
        return Err(Error::Domain(format!("p_e_cap must lie in (0, 1], got {p_e_cap}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let z = gaussian_q_inv(rho / 2.0)?;
    let p_d = tau * tau / (params.n as f64 * p_e_cap * params.v_d * params.v_e * z * z);
    if p_d > 1.0 {
        return Ok(Feasibility::Infeasible);
    }
    Ok(Feasibility::Feasible(p_d))
}

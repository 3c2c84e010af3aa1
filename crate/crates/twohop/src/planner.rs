//! Design-map construction: the boundary decision, branch-resolved
//! density sweeps, knee detection, and a latency proxy.
//!
//! A sweep walks a grid of left-factor densities `p_D` and emits two
//! branches per point: the cap-binding branch pins `p_E` at the compute
//! cap, the recall-binding branch picks the smallest `p_E` achieving the
//! reach target `rho` and goes infeasible below the knee where that
//! density would exceed the cap. The cost-optimal envelope is the
//! pointwise cheaper of the feasible branches.

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::metrics::Thresholds;
use crate::theory::{
    boundary_slope, demand_support_prob, expected_edge_cost, knee_pd, recall_line_pe,
    reach_probability_surrogate, CostModel, Feasibility, SlopeVariant,
};

/// Which curve a sweep row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Cap,
    Recall,
    Envelope,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Cap => "cap",
            Branch::Recall => "recall",
            Branch::Envelope => "envelope",
        }
    }
}

/// Which constraint pinned the chosen `p_E` at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    CapBinding,
    RecallBinding,
    Infeasible,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::CapBinding => "cap_binding",
            Regime::RecallBinding => "recall_binding",
            Regime::Infeasible => "infeasible",
        }
    }
}

/// Weights for the latency proxy. An artifact convention, not a derived
/// quantity: communication scales with expected user fan-out, computation
/// with expected per-column server activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyWeights {
    pub w_comm: f64,
    pub w_comp: f64,
}

impl Default for LatencyWeights {
    fn default() -> Self {
        Self { w_comm: 1.0, w_comp: 1.0 }
    }
}

impl LatencyWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("w_comm", self.w_comm), ("w_comp", self.w_comp)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!("{name} must be nonnegative, got {w}")));
            }
        }
        Ok(())
    }
}

/// `w_comm * N * p_D + w_comp * N * p_E`: expected number of activated
/// links plus expected number of activated server slots.
pub fn latency_proxy(params: &EnsembleParams, p_d: f64, p_e: f64, w: &LatencyWeights) -> f64 {
    let n = params.n as f64;
    w.w_comm * n * p_d + w.w_comp * n * p_e
}

/// One grid point on one branch. Metric fields are `None` when the branch
/// is infeasible at this point; `p_e` still records the density the recall
/// constraint would demand when that value exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub p_d: f64,
    pub branch: Branch,
    pub regime: Regime,
    pub p_e: Option<f64>,
    pub q: Option<f64>,
    pub expected_ged: Option<f64>,
    pub weighted_cost: Option<f64>,
    pub latency: Option<f64>,
    pub at_knee: bool,
    pub knee_pd_exact: Option<f64>,
}

/// What to do with reach at the operating boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    MaximizeQ,
    MinimizeQSubjectToRecall,
    Indifferent,
}

impl Action {
    pub fn as_str(&self) -> &'static str {
        match self {
            Action::MaximizeQ => "maximize_q",
            Action::MinimizeQSubjectToRecall => "minimize_q_subject_to_recall",
            Action::Indifferent => "indifferent",
        }
    }
}

/// The boundary rule outcome: the cost slope in `q` and the action its
/// sign dictates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub slope: f64,
    pub variant: SlopeVariant,
    pub action: Action,
    /// Threshold-aware demand support probability used by the
    /// `threshold_aware` variant (reported for both variants).
    pub p_s: f64,
}

const INDIFFERENCE_TOL: f64 = 1e-12;

/// Evaluate the boundary rule: negative slope means misses dominate and
/// reach should be maximized; positive means extras dominate and reach
/// should be minimized subject to the recall target.
pub fn boundary_decision(
    params: &EnsembleParams,
    costs: &CostModel,
    th: &Thresholds,
    variant: SlopeVariant,
) -> Result<Decision> {
    params.validate()?;
    costs.validate()?;
    th.validate()?;
    let p_s = demand_support_prob(params, th.tau_f);
    let slope = boundary_slope(p_s, params.p_f, costs, variant);
    let action = if slope.abs() <= INDIFFERENCE_TOL {
        Action::Indifferent
    } else if slope < 0.0 {
        Action::MaximizeQ
    } else {
        Action::MinimizeQSubjectToRecall
    };
    Ok(Decision { slope, variant, action, p_s })
}

/// Inclusive uniform grid over `[start, stop]` with `steps` points.
pub fn grid(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Domain(format!("grid steps must be at least 2, got {steps}")));
    }
    if !(start > 0.0 && start < stop && stop <= 1.0) {
        return Err(Error::Domain(format!(
            "grid must satisfy 0 < start < stop <= 1, got [{start}, {stop}]"
        )));
    }
    let span = stop - start;
    let mut points: Vec<f64> = (0..steps)
        .map(|i| start + span * i as f64 / (steps - 1) as f64)
        .collect();
    points[steps - 1] = stop;
    Ok(points)
}

fn validate_grid(points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let mut prev = 0.0;
    for &p in points {
        if !(p > prev && p <= 1.0) {
            return Err(Error::Domain(format!(
                "sweep grid must be strictly increasing in (0, 1], got point {p}"
            )));
        }
        prev = p;
    }
    Ok(())
}

/// Index of the grid point nearest the knee, provided it lies within one
/// grid step; `None` when the knee is infeasible or off-grid by more than
/// a step.
fn knee_index(points: &[f64], knee: Option<f64>) -> Option<usize> {
    let knee = knee?;
    let (best, dist) = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, (p - knee).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))?;
    let step = if points.len() >= 2 {
        points.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max)
    } else {
        f64::INFINITY
    };
    (dist <= step).then_some(best)
}

/// Sweep the left-factor density grid at one recall target, emitting the
/// cap-binding and recall-binding rows for every point (grid order, cap
/// row first).
pub fn sweep_pd(
    params: &EnsembleParams,
    costs: &CostModel,
    th: &Thresholds,
    rho: f64,
    points: &[f64],
    weights: &LatencyWeights,
) -> Result<Vec<SweepRow>> {
    params.validate()?;
    costs.validate()?;
    th.validate()?;
    weights.validate()?;
    validate_grid(points)?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }

    let cells = params.k as f64 * params.l as f64;
    let p_s = demand_support_prob(params, th.tau_f);
    let knee = knee_pd(params, th.tau, rho, costs.p_e_cap)?.value();
    let knee_idx = knee_index(points, knee);

    let mut rows = Vec::with_capacity(points.len() * 2);
    for (i, &p_d) in points.iter().enumerate() {
        let at_knee = knee_idx == Some(i);
        let metrics = |p_e: f64| {
            let q = reach_probability_surrogate(params, p_d, p_e, th.tau);
            let per_entry = p_s * (1.0 - q) + (1.0 - p_s) * q;
            (
                Some(q),
                Some(cells * per_entry),
                Some(cells * expected_edge_cost(q, p_s, costs)),
                Some(latency_proxy(params, p_d, p_e, weights)),
            )
        };

        let (q, ged, cost, latency) = metrics(costs.p_e_cap);
        rows.push(SweepRow {
            rho,
            p_d,
            branch: Branch::Cap,
            regime: Regime::CapBinding,
            p_e: Some(costs.p_e_cap),
            q,
            expected_ged: ged,
            weighted_cost: cost,
            latency,
            at_knee,
            knee_pd_exact: knee,
        });

        let (regime, p_e) = match recall_line_pe(params, p_d, th.tau, rho)? {
            Feasibility::Feasible(pe) if pe <= costs.p_e_cap => (Regime::RecallBinding, Some(pe)),
            Feasibility::Feasible(pe) => (Regime::Infeasible, Some(pe)),
            Feasibility::Infeasible => (Regime::Infeasible, None),
        };
        let (q, ged, cost, latency) = match (regime, p_e) {
            (Regime::RecallBinding, Some(pe)) => metrics(pe),
            _ => (None, None, None, None),
        };
        rows.push(SweepRow {
            rho,
            p_d,
            branch: Branch::Recall,
            regime,
            p_e,
            q,
            expected_ged: ged,
            weighted_cost: cost,
            latency,
            at_knee,
            knee_pd_exact: knee,
        });
    }
    Ok(rows)
}

/// Pointwise cost-optimal envelope over the feasible branch rows: for each
/// `(rho, p_D)` the row with the smallest weighted cost, re-labeled as the
/// envelope branch. Ties keep the earlier (cap) row.
pub fn envelope(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut out: Vec<SweepRow> = Vec::new();
    for row in rows {
        if row.branch == Branch::Envelope {
            continue;
        }
        let Some(cost) = row.weighted_cost else { continue };
        match out
            .iter_mut()
            .find(|r| r.rho == row.rho && r.p_d == row.p_d)
        {
            Some(best) => {
                if cost < best.weighted_cost.expect("envelope rows keep their cost") {
                    *best = SweepRow { branch: Branch::Envelope, ..row.clone() };
                }
            }
            None => out.push(SweepRow { branch: Branch::Envelope, ..row.clone() }),
        }
    }
    out
}

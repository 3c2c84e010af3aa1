//! Configuration parsing and the four command runners: bound battery,
//! Monte Carlo theory checks, density sweeps, and the boundary decision.
//!
//! The config is flat TOML with four sections (`[ensemble]`,
//! `[thresholds]`, `[costs]`, `[run]`); every key maps one-to-one to a
//! model symbol and every omitted key takes the documented default, so an
//! empty config describes the reference setup (64 users, 64 servers, 800
//! subfunctions). Runners write human-stable `key=value` lines to the
//! given writer and return a process exit code: 0 for success, 3 when a
//! verification check fails. Validation problems surface as errors, which
//! the binary maps to exit code 2.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;

use serde::Deserialize;

use crate::bounds::{run_battery, BatteryConfig};
use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::metrics::Thresholds;
use crate::montecarlo::{run_ged_experiment, run_reach_experiment, run_risk_experiment};
use crate::planner::{boundary_decision, envelope, grid, sweep_pd, LatencyWeights, SweepRow};
use crate::theory::{CostModel, SlopeVariant};

/// |z| ceiling for Monte Carlo agreement with exact closed forms.
pub const Z_TOLERANCE: f64 = 4.0;

/// Allowed gap between empirical reach and the Gaussian surrogate.
///
/// Calibrated at the default operating point, where the effective path
/// count `N p_D p_E = 1.28` puts a 0.27 atom at exactly zero and the
/// surrogate overshoots by about 0.32. The check guards against
/// regressions in the sampler or the surrogate, not against surrogate
/// bias itself.
pub const REACH_GAP_TOLERANCE: f64 = 0.40;

/// Allowed relative gap between empirical and surrogate-based expected
/// GED; same calibration caveat as [`REACH_GAP_TOLERANCE`] (measured
/// about -0.33 at the default point).
pub const GED_RELATIVE_GAP_TOLERANCE: f64 = 0.50;

/// Output encoding for sweep rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "output_format must be \"csv\" or \"json\", got \"{other}\""
            ))),
        }
    }
}

/// Run-level settings: seeding, sample sizes, the sweep grid, and output
/// plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub seed: u64,
    pub replications: usize,
    pub bound_instances: usize,
    pub p_d_start: f64,
    pub p_d_stop: f64,
    pub p_d_steps: usize,
    pub rhos: Vec<f64>,
    pub slope_variant: SlopeVariant,
    pub latency_weights: LatencyWeights,
    pub output_path: String,
    pub output_format: OutputFormat,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            seed: 12345,
            replications: 200,
            bound_instances: 10_000,
            p_d_start: 0.01,
            p_d_stop: 0.50,
            p_d_steps: 50,
            rhos: vec![0.80, 0.90, 0.95],
            slope_variant: SlopeVariant::RawPF,
            latency_weights: LatencyWeights::default(),
            output_path: "sweep.csv".into(),
            output_format: OutputFormat::Csv,
        }
    }
}

/// Fully validated configuration for any subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ensemble: EnsembleParams,
    pub thresholds: Thresholds,
    pub costs: CostModel,
    pub run: RunSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ensemble: EnsembleParams::default(),
            thresholds: Thresholds::default(),
            costs: CostModel::default(),
            run: RunSettings::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    thresholds: RawThresholds,
    #[serde(default)]
    costs: RawCosts,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    k: Option<usize>,
    n: Option<usize>,
    l: Option<usize>,
    p_d: Option<f64>,
    p_e: Option<f64>,
    p_f: Option<f64>,
    v_d: Option<f64>,
    v_e: Option<f64>,
    v_f: Option<f64>,
    mu_f: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    tau: Option<f64>,
    tau_f: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCosts {
    c_minus: Option<f64>,
    c_plus: Option<f64>,
    rho: Option<f64>,
    p_e_cap: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    replications: Option<usize>,
    bound_instances: Option<usize>,
    p_d_start: Option<f64>,
    p_d_stop: Option<f64>,
    p_d_steps: Option<usize>,
    rhos: Option<Vec<f64>>,
    slope_variant: Option<String>,
    w_comm: Option<f64>,
    w_comp: Option<f64>,
    output_path: Option<String>,
    output_format: Option<String>,
}

/// Parse and validate a TOML config. Omitted keys take the reference
/// defaults; unknown keys are rejected by name; invariant violations
/// report the offending field and constraint.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;

    let de = EnsembleParams::default();
    let ensemble = EnsembleParams {
        k: raw.ensemble.k.unwrap_or(de.k),
        n: raw.ensemble.n.unwrap_or(de.n),
        l: raw.ensemble.l.unwrap_or(de.l),
        p_d: raw.ensemble.p_d.unwrap_or(de.p_d),
        p_e: raw.ensemble.p_e.unwrap_or(de.p_e),
        p_f: raw.ensemble.p_f.unwrap_or(de.p_f),
        v_d: raw.ensemble.v_d.unwrap_or(de.v_d),
        v_e: raw.ensemble.v_e.unwrap_or(de.v_e),
        v_f: raw.ensemble.v_f.unwrap_or(de.v_f),
        mu_f: raw.ensemble.mu_f.unwrap_or(de.mu_f),
    };
    ensemble.validate()?;

    let tau = raw.thresholds.tau.unwrap_or(0.10);
    let thresholds = Thresholds { tau, tau_f: raw.thresholds.tau_f.unwrap_or(tau / 2.0) };
    thresholds.validate()?;

    let dc = CostModel::default();
    let costs = CostModel {
        c_minus: raw.costs.c_minus.unwrap_or(dc.c_minus),
        c_plus: raw.costs.c_plus.unwrap_or(dc.c_plus),
        rho: raw.costs.rho.unwrap_or(dc.rho),
        p_e_cap: raw.costs.p_e_cap.unwrap_or(dc.p_e_cap),
    };
    costs.validate()?;

    let dr = RunSettings::default();
    let slope_variant = match raw.run.slope_variant {
        Some(s) => s.parse::<SlopeVariant>()?,
        None => dr.slope_variant,
    };
    let output_format = match raw.run.output_format {
        Some(s) => s.parse::<OutputFormat>()?,
        None => dr.output_format,
    };
    let run = RunSettings {
        seed: raw.run.seed.unwrap_or(dr.seed),
        replications: raw.run.replications.unwrap_or(dr.replications),
        bound_instances: raw.run.bound_instances.unwrap_or(dr.bound_instances),
        p_d_start: raw.run.p_d_start.unwrap_or(dr.p_d_start),
        p_d_stop: raw.run.p_d_stop.unwrap_or(dr.p_d_stop),
        p_d_steps: raw.run.p_d_steps.unwrap_or(dr.p_d_steps),
        rhos: raw.run.rhos.unwrap_or(dr.rhos),
        slope_variant,
        latency_weights: LatencyWeights {
            w_comm: raw.run.w_comm.unwrap_or(1.0),
            w_comp: raw.run.w_comp.unwrap_or(1.0),
        },
        output_path: raw.run.output_path.unwrap_or(dr.output_path),
        output_format,
    };

    if run.replications < 2 {
        return Err(Error::Config(format!(
            "run.replications must be at least 2, got {}",
            run.replications
        )));
    }
    if run.bound_instances == 0 {
        return Err(Error::Config("run.bound_instances must be at least 1".into()));
    }
    if run.p_d_steps < 2 {
        return Err(Error::Config(format!(
            "run.p_d_steps must be at least 2, got {}",
            run.p_d_steps
        )));
    }
    if !(run.p_d_start > 0.0 && run.p_d_start < run.p_d_stop && run.p_d_stop <= 1.0) {
        return Err(Error::Config(format!(
            "run.p_d_start/p_d_stop must satisfy 0 < start < stop <= 1, got [{}, {}]",
            run.p_d_start, run.p_d_stop
        )));
    }
    if run.rhos.is_empty() {
        return Err(Error::Config("run.rhos must list at least one target".into()));
    }
    for &rho in &run.rhos {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("run.rhos entries must lie in (0, 1), got {rho}")));
        }
    }
    run.latency_weights.validate()?;

    Ok(RunConfig { ensemble, thresholds, costs, run })
}

/// 17 significant digits: lossless round trip for JSON output.
pub fn fmt_json_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// 12 significant digits: readable CSV output.
pub fn fmt_csv_number(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_csv_opt(x: Option<f64>) -> String {
    x.map(fmt_csv_number).unwrap_or_default()
}

fn fmt_json_opt(x: Option<f64>) -> String {
    x.map(fmt_json_number).unwrap_or_else(|| "null".into())
}

/// Fixed sweep column schema shared by CSV and JSON emitters.
pub const SWEEP_COLUMNS: &str =
    "rho,p_D,branch,regime,p_E,q,expected_ged,weighted_cost,latency,at_knee,knee_pD_exact";

/// Render sweep rows as CSV: a seed comment, the header, one line per row.
pub fn render_sweep_csv(master_seed: u64, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# master_seed={master_seed}");
    let _ = writeln!(out, "{SWEEP_COLUMNS}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_csv_number(r.rho),
            fmt_csv_number(r.p_d),
            r.branch.as_str(),
            r.regime.as_str(),
            fmt_csv_opt(r.p_e),
            fmt_csv_opt(r.q),
            fmt_csv_opt(r.expected_ged),
            fmt_csv_opt(r.weighted_cost),
            fmt_csv_opt(r.latency),
            r.at_knee,
            fmt_csv_opt(r.knee_pd_exact),
        );
    }
    out
}

/// Render sweep rows as a JSON document with the same fields as the CSV
/// columns.
pub fn render_sweep_json(master_seed: u64, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"master_seed\": {master_seed},");
    out.push_str("  \"rows\": [\n");
    for (i, r) in rows.iter().enumerate() {
        let comma = if i + 1 < rows.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"rho\": {}, \"p_D\": {}, \"branch\": \"{}\", \"regime\": \"{}\", \
             \"p_E\": {}, \"q\": {}, \"expected_ged\": {}, \"weighted_cost\": {}, \
             \"latency\": {}, \"at_knee\": {}, \"knee_pD_exact\": {}}}{comma}",
            fmt_json_number(r.rho),
            fmt_json_number(r.p_d),
            r.branch.as_str(),
            r.regime.as_str(),
            fmt_json_opt(r.p_e),
            fmt_json_opt(r.q),
            fmt_json_opt(r.expected_ged),
            fmt_json_opt(r.weighted_cost),
            fmt_json_opt(r.latency),
            r.at_knee,
            fmt_json_opt(r.knee_pd_exact),
        );
    }
    out.push_str("  ]\n}\n");
    out
}

/// Run the deterministic bound battery. Exit 0 on zero violations, 3
/// otherwise, printing a reproducer line per violation.
pub fn run_verify_bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let battery = BatteryConfig {
        instances: cfg.run.bound_instances,
        master_seed: cfg.run.seed,
        thresholds: cfg.thresholds,
    };
    let report = run_battery(&battery)?;
    writeln!(out, "master_seed={}", report.master_seed)?;
    writeln!(out, "instances={}", report.instances)?;
    for s in &report.stats {
        writeln!(
            out,
            "bound={} checks={} violations={} tight_lower={} tight_upper={} max_rel_violation={}",
            s.name,
            s.checks,
            s.violations,
            s.tight_lower,
            s.tight_upper,
            fmt_json_number(s.max_rel_violation)
        )?;
    }
    writeln!(out, "chain_breaks={}", report.chain_breaks)?;
    for v in &report.violations {
        writeln!(out, "violation: {v}")?;
    }
    let total = report.total_violations();
    if total == 0 {
        writeln!(out, "verify-bounds: PASS total_violations=0")?;
        Ok(0)
    } else {
        writeln!(out, "verify-bounds: FAIL total_violations={total}")?;
        Ok(3)
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Run the Monte Carlo experiments against the closed forms. Exit 0 when
/// every z-statistic and surrogate gap is within tolerance, 3 otherwise.
pub fn run_verify_theory(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let seed = cfg.run.seed;
    let reps = cfg.run.replications;
    let params = &cfg.ensemble;
    writeln!(out, "master_seed={seed}")?;

    let risk = run_risk_experiment(params, reps, seed)?;
    let risk_pass = risk.z_score.is_finite() && risk.z_score.abs() <= Z_TOLERANCE;
    writeln!(
        out,
        "experiment=risk replications={} empirical={} std_error={} theoretical={} z={} status={}",
        reps,
        fmt_json_number(risk.empirical.mean),
        fmt_json_number(risk.empirical.std_error),
        fmt_json_number(risk.theoretical),
        fmt_json_number(risk.z_score),
        status(risk_pass)
    )?;

    let reach =
        run_reach_experiment(params, params.p_d, params.p_e, cfg.thresholds.tau, reps, seed)?;
    let reach_pass = reach.gap.abs() <= REACH_GAP_TOLERANCE;
    writeln!(
        out,
        "experiment=reach replications={} empirical_q={} surrogate_q={} gap={} \
         atom_empirical={} atom_analytic={} tolerance={} status={}",
        reps,
        fmt_json_number(reach.empirical_q.mean),
        fmt_json_number(reach.surrogate_q),
        fmt_json_number(reach.gap),
        fmt_json_number(reach.atom_empirical),
        fmt_json_number(reach.atom_analytic),
        fmt_json_number(REACH_GAP_TOLERANCE),
        status(reach_pass)
    )?;

    let ged = run_ged_experiment(
        params,
        params.p_d,
        params.p_e,
        &cfg.thresholds,
        &cfg.costs,
        reps,
        seed,
    )?;
    let ged_pass = ged.relative_gap.is_finite()
        && ged.relative_gap.abs() <= GED_RELATIVE_GAP_TOLERANCE;
    writeln!(
        out,
        "experiment=ged replications={} empirical={} theoretical={} relative_gap={} \
         empirical_cost={} theoretical_cost={} tolerance={} status={}",
        reps,
        fmt_json_number(ged.empirical_ged.mean),
        fmt_json_number(ged.theoretical_ged),
        fmt_json_number(ged.relative_gap),
        fmt_json_number(ged.empirical_cost.mean),
        fmt_json_number(ged.theoretical_cost),
        fmt_json_number(GED_RELATIVE_GAP_TOLERANCE),
        status(ged_pass)
    )?;

    let dec = &ged.decoupling;
    let dec_pass = dec.z.is_finite() && dec.z.abs() <= Z_TOLERANCE;
    writeln!(
        out,
        "experiment=decoupling mean_diff={} se={} z={} status={}",
        fmt_json_number(dec.mean_diff),
        fmt_json_number(dec.se_diff),
        fmt_json_number(dec.z),
        status(dec_pass)
    )?;

    let all = risk_pass && reach_pass && ged_pass && dec_pass;
    writeln!(out, "verify-theory: {}", status(all))?;
    Ok(if all { 0 } else { 3 })
}

/// Build the branch rows and envelope for every recall target and write
/// them to the configured output file.
pub fn run_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let points = grid(cfg.run.p_d_start, cfg.run.p_d_stop, cfg.run.p_d_steps)?;
    let mut rows = Vec::new();
    for &rho in &cfg.run.rhos {
        let branch_rows = sweep_pd(
            &cfg.ensemble,
            &cfg.costs,
            &cfg.thresholds,
            rho,
            &points,
            &cfg.run.latency_weights,
        )?;
        let env = envelope(&branch_rows);
        rows.extend(branch_rows);
        rows.extend(env);
    }
    let rendered = match cfg.run.output_format {
        OutputFormat::Csv => render_sweep_csv(cfg.run.seed, &rows),
        OutputFormat::Json => render_sweep_json(cfg.run.seed, &rows),
    };
    fs::write(&cfg.run.output_path, rendered)?;
    writeln!(out, "master_seed={}", cfg.run.seed)?;
    writeln!(out, "wrote {} rows={}", cfg.run.output_path, rows.len())?;
    Ok(0)
}

/// Print the boundary rule decision for the configured slope variant.
pub fn run_decide(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let d = boundary_decision(&cfg.ensemble, &cfg.costs, &cfg.thresholds, cfg.run.slope_variant)?;
    writeln!(
        out,
        "variant={} slope={} p_s={} action={}",
        d.variant.as_str(),
        fmt_json_number(d.slope),
        fmt_json_number(d.p_s),
        d.action.as_str()
    )?;
    Ok(0)
}

//! The expected weighted edge cost is exactly affine in the reach
//! probability q, so the whole design decision at the recall boundary is
//! the sign of one slope: negative means push q as high as the cap allows,
//! positive means sit at the recall floor.

use twohop::ensemble::EnsembleParams;
use twohop::metrics::Thresholds;
use twohop::planner::boundary_decision;
use twohop::theory::{demand_support_prob, expected_edge_cost, CostModel, SlopeVariant};

fn main() -> twohop::Result<()> {
    let params = EnsembleParams::default();
    let th = Thresholds::default();
    let costs = CostModel::default();

    let p_s = demand_support_prob(&params, th.tau_f);
    println!("demand support probability p_S = {p_s:.6} (raw p_F = {})", params.p_f);
    println!(
        "per-entry cost at q = 0: {:.4}, at q = 1: {:.4}",
        expected_edge_cost(0.0, p_s, &costs),
        expected_edge_cost(1.0, p_s, &costs)
    );
    println!();

    for variant in [SlopeVariant::RawPF, SlopeVariant::ThresholdAware] {
        let d = boundary_decision(&params, &costs, &th, variant)?;
        println!("variant={} slope={:+.6} action={}", d.variant, d.slope, d.action.as_str());
    }

    // make misses cheap and excess edges dear and the sign flips
    let flipped = CostModel { c_minus: 0.25, c_plus: 10.0, ..costs };
    println!();
    println!("with prices swapped (c_minus = 0.25, c_plus = 10):");
    for variant in [SlopeVariant::RawPF, SlopeVariant::ThresholdAware] {
        let d = boundary_decision(&params, &flipped, &th, variant)?;
        println!("variant={} slope={:+.6} action={}", d.variant, d.slope, d.action.as_str());
    }
    Ok(())
}

//! Threshold the realized map and the demand into edge sets, count missing
//! and excess edges, and compare the total with its decoupled expectation.

use twohop::ensemble::{sample_instance, EnsembleParams, SeedSpec};
use twohop::metrics::{ged_tau, weighted_edge_cost, Thresholds};
use twohop::theory::{expected_ged, CostModel};

fn main() -> twohop::Result<()> {
    let params = EnsembleParams::default();
    let th = Thresholds::default();
    let costs = CostModel::default();
    let seed = SeedSpec { master_seed: 31, stream_id: 0, replication_index: 0 };

    let (d, e, f) = sample_instance(&params, &seed)?;
    let a = d.matmul(&e)?;
    let g = ged_tau(&a, &f, &th)?;

    println!("thresholds: |A| >= {} for the map, |F| >= {} for demand", th.tau, th.tau_f);
    println!("demand edges    {}", g.demand_edges);
    println!("predicted edges {}", g.predicted_edges);
    println!("misses          {} (demand edge, no map edge)", g.misses);
    println!("extras          {} (map edge, no demand edge)", g.extras);
    println!("edit distance   {}", g.total);
    println!("recall {:.4}, precision {:.4}", g.recall, g.precision);
    println!(
        "weighted cost   {:.2} (miss price {}, excess price {})",
        weighted_edge_cost(&g, &costs),
        costs.c_minus,
        costs.c_plus
    );

    let expected = expected_ged(&params, params.p_d, params.p_e, &th);
    println!();
    println!("decoupled expectation {expected:.0} edits; one draw landed at {}", g.total);
    println!("(the gap is dominated by the reach surrogate at this density; see");
    println!("the reach_surrogate example)");
    Ok(())
}

//! Sweep the row-side density and print the two branches around the recall
//! knee: the cap branch rides the density ceiling, the recall branch pins
//! q to the target and terminates where the required column density would
//! exceed the cap.

use twohop::ensemble::EnsembleParams;
use twohop::metrics::Thresholds;
use twohop::planner::{envelope, grid, sweep_pd, Branch, LatencyWeights, Regime};
use twohop::theory::{knee_pd, CostModel, Feasibility};

fn main() -> twohop::Result<()> {
    let params = EnsembleParams::default();
    let costs = CostModel::default();
    let th = Thresholds::default();
    let rho = 0.90;

    let knee = match knee_pd(&params, th.tau, rho, costs.p_e_cap)? {
        Feasibility::Feasible(x) => x,
        Feasibility::Infeasible => unreachable!("default point has a knee"),
    };
    println!("recall target {rho}: knee at p_D = {knee:.6}");
    println!();

    let points = grid(0.01, 0.50, 50)?;
    let rows = sweep_pd(&params, &costs, &th, rho, &points, &LatencyWeights::default())?;

    println!("p_D      branch  regime          p_E      q        cost       latency");
    for r in rows.iter().filter(|r| (r.p_d - knee).abs() < 0.035) {
        println!(
            "{:.4}   {:<7} {:<15} {:<8} {:<8} {:<10} {}{}",
            r.p_d,
            r.branch.as_str(),
            r.regime.as_str(),
            r.p_e.map_or("-".into(), |x| format!("{x:.4}")),
            r.q.map_or("-".into(), |x| format!("{x:.4}")),
            r.weighted_cost.map_or("-".into(), |x| format!("{x:.1}")),
            r.latency.map_or("-".into(), |x| format!("{x:.2}")),
            if r.at_knee { "  <- knee" } else { "" }
        );
    }

    let env = envelope(&rows);
    let best = env
        .iter()
        .filter(|r| r.weighted_cost.is_some())
        .min_by(|a, b| a.weighted_cost.partial_cmp(&b.weighted_cost).unwrap())
        .unwrap();
    println!();
    println!(
        "cheapest envelope point: p_D = {:.4} (regime {}), cost {:.1}",
        best.p_d,
        best.regime.as_str(),
        best.weighted_cost.unwrap()
    );

    let infeasible = rows
        .iter()
        .filter(|r| r.branch == Branch::Recall && r.regime == Regime::Infeasible)
        .count();
    println!("recall branch infeasible at {infeasible} of {} grid points (below the knee)", points.len());
    Ok(())
}

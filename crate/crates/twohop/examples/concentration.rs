//! The edit distance per cell tightens as the problem grows. Estimate its
//! spread at three sizes that quadruple the cell count each step and print
//! the successive standard-deviation ratios (independent cells would give
//! exactly 0.5; shared row and column factors slow that down a little).

use twohop::ensemble::EnsembleParams;
use twohop::metrics::Thresholds;
use twohop::montecarlo::concentration_diagnostic;

fn main() -> twohop::Result<()> {
    let base = EnsembleParams::default();
    let scales: Vec<EnsembleParams> = [(16, 100), (32, 200), (64, 400)]
        .into_iter()
        .map(|(k, l)| EnsembleParams { k, l, ..base })
        .collect();

    let diags = concentration_diagnostic(&scales, &Thresholds::default(), 100, 8)?;

    println!("K    L    cells   mean ged/cell  std of ged/cell");
    for d in &diags {
        println!(
            "{:<4} {:<4} {:<7} {:.5}        {:.5}",
            d.k,
            d.l,
            d.scale(),
            d.mean_normalized_ged,
            d.normalized_std
        );
    }
    println!();
    for pair in diags.windows(2) {
        println!(
            "{}x cells: std ratio {:.3}",
            pair[1].scale() / pair[0].scale(),
            pair[1].normalized_std / pair[0].normalized_std
        );
    }
    Ok(())
}

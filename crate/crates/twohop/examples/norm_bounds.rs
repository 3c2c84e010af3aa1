//! Certificates for the error norm on one sampled instance: the triangle
//! sandwich, spectral ceilings, the spectral floor, the l1/l2 sandwich,
//! and the edit-distance chain with its known failure mode.

use twohop::bounds::{
    ged_norm_link, l1_l2_sandwich, singular_lower_bounds, submultiplicative_bounds,
    triangle_bounds, BoundReport,
};
use twohop::ensemble::{sample_instance, EnsembleParams, SeedSpec};
use twohop::metrics::Thresholds;
use twohop::Matrix;

fn show(r: &BoundReport) {
    let mark = |tight| if tight { " (tight)" } else { "" };
    println!(
        "  {:<18} {:>10.4} <= {:>10.4} <= {:>10.4}{}{}",
        r.name,
        r.lower,
        r.actual,
        r.upper,
        mark(r.is_tight_lower()),
        mark(r.is_tight_upper())
    );
    assert!(!r.violated());
}

fn main() -> twohop::Result<()> {
    let params = EnsembleParams { k: 24, n: 16, l: 40, ..EnsembleParams::default() };
    let seed = SeedSpec { master_seed: 5, stream_id: 0, replication_index: 0 };
    let (d, e, f) = sample_instance(&params, &seed)?;

    println!("bound certificates for ||DE - F||_F on a 24x16x40 draw:");
    show(&triangle_bounds(&d, &e, &f)?);
    for r in submultiplicative_bounds(&d, &e, &f)? {
        show(&r);
    }
    for r in singular_lower_bounds(&d, &e, &f)? {
        show(&r);
    }
    let a = d.matmul(&e)?;
    show(&l1_l2_sandwich(&a.sub(&f)?));

    let th = Thresholds::default();
    let link = ged_norm_link(&d, &e, &f, &th)?;
    println!();
    println!(
        "edit-distance chain: ged {} <= {:.2} <= {:.2} holds: {}",
        link.ged, link.bound_abs, link.bound_full, link.chain_holds
    );

    // the first link is not a theorem: one entry below the map threshold
    // whose demand twin still clears the demand threshold costs a full
    // edit with almost no norm mass
    let d1 = Matrix::from_vec(1, 1, vec![0.07])?;
    let e1 = Matrix::from_vec(1, 1, vec![1.0])?;
    let f1 = Matrix::from_vec(1, 1, vec![0.06])?;
    let broken = ged_norm_link(&d1, &e1, &f1, &th)?;
    println!(
        "near-tie counterexample: ged {} vs ceiling {:.3} holds: {}",
        broken.ged, broken.bound_abs, broken.chain_holds
    );
    Ok(())
}

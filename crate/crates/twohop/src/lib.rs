//! Typical-case design and verification for sparse two-hop linear maps.
//!
//! A two-hop map is the product `A = D * E` of two independently sampled
//! sparse random matrices: `D` is `K x N`, `E` is `N x L`, and both follow a
//! spike-and-slab law (each entry is zero with some probability, otherwise a
//! Gaussian draw). The demand side is a third spike-and-slab matrix `F` of
//! shape `K x L`. The crate answers two families of questions about this
//! setup:
//!
//! * **How well does `DE` imitate `F`?** Measured either by norms
//!   (`||DE - F||_F` and friends, with deterministic lower/upper bound
//!   certificates) or by the thresholded edit distance between the supports
//!   of `DE` and `F`.
//! * **How should the densities be chosen?** Closed-form laws for the
//!   second-moment risk, the reach probability of a two-hop edge, and the
//!   expected edit distance feed a small planner that sweeps the density
//!   grid, locates the knee of the recall constraint, and picks an operating
//!   point under asymmetric miss/excess costs.
//!
//! Every closed form is backed by a Monte Carlo experiment in
//! [`montecarlo`], and every run is bit-reproducible: sampling uses a
//! counter-based generator addressed by `(master_seed, stream, replication,
//! entry)`, and all reductions use compensated summation in a fixed order,
//! so results do not depend on thread count.
//!
//! # Quick start
//!
//! ```
//! use twohop::ensemble::{sample_instance, EnsembleParams, SeedSpec};
//! use twohop::metrics::{ged, threshold_support, Thresholds};
//!
//! let params = EnsembleParams::default();
//! let seed = SeedSpec { master_seed: 7, stream_id: 0, replication_index: 0 };
//! let (d, e, f) = sample_instance(&params, &seed).unwrap();
//! let a = d.matmul(&e).unwrap();
//! let th = Thresholds::with_tau(0.10);
//! let predicted = threshold_support(&a, th.tau).unwrap();
//! let demand = threshold_support(&f, th.tau_f).unwrap();
//! let g = ged(&predicted, &demand).unwrap();
//! assert_eq!(g.total, g.misses + g.extras);
//! ```
//!
//! # Runnable examples
//!
//! Each major capability has a self-contained example under `examples/`:
//!
//! | example               | shows                                              |
//! |-----------------------|----------------------------------------------------|
//! | `ensemble_sampling`   | counter-based sampling, determinism, moment checks |
//! | `closed_form_risk`    | exact Frobenius risk law vs Monte Carlo            |
//! | `reach_surrogate`     | Gaussian reach surrogate vs empirical reach        |
//! | `threshold_ged`       | thresholded supports and edit-distance breakdown   |
//! | `norm_bounds`         | bound certificates on `||DE - F||_F`               |
//! | `boundary_decision`   | cost slope and the maximize/minimize decision      |
//! | `design_sweep`        | density sweep, recall knee, cost envelope          |
//! | `concentration`       | edit-distance concentration across scales          |
//!
//! Run one with `cargo run --release --example design_sweep`.
//!
//! The thin `twohop` binary exposes the same machinery as four subcommands
//! (`verify-bounds`, `verify-theory`, `sweep`, `decide`); see the README.

pub mod bounds;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod gauss;
pub mod linalg;
pub mod metrics;
pub mod montecarlo;
pub mod planner;
pub mod theory;

mod mixing;

pub use error::{Error, Result};
pub use linalg::Matrix;

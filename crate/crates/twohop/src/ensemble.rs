//! Spike-and-slab matrix ensembles with counter-based sampling.
//!
//! An entry is zero with probability `1 - density`, otherwise drawn from
//! `N(mean, variance)`. Entries are independent across positions and across
//! the three matrix roles.
//!
//! Sampling is addressed, not streamed: the value of entry `i` of stream
//! `s` in replication `r` under master seed `m` is a pure function of
//! `(m, s, r, i)`. Two uniforms are derived per entry (one for the
//! zero/slab decision, one for the slab value through the inverse normal
//! CDF), so raising the density with everything else fixed only turns
//! entries on, never changes an existing slab value. That coupling is what
//! makes common-random-number comparisons across densities meaningful.

use crate::error::{Error, Result};
use crate::gauss::q_inv_core;
use crate::linalg::Matrix;
use crate::mixing::{counter_hash, uniform_open};

/// Stream id for the left factor `D`.
pub const STREAM_D: u64 = 0;
/// Stream id for the right factor `E`.
pub const STREAM_E: u64 = 1;
/// Stream id for the demand matrix `F`.
pub const STREAM_F: u64 = 2;

/// Address of one sampled matrix: which run, which role, which replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
    pub replication_index: u64,
}

/// Dimensions and spike-and-slab laws for the `(D, E, F)` triple.
///
/// `D` is `k x n` with density `p_d` and slab `N(0, v_d)`; `E` is `n x l`
/// with density `p_e` and slab `N(0, v_e)`; `F` is `k x l` with density
/// `p_f` and slab `N(mu_f, v_f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub p_d: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub v_d: f64,
    pub v_e: f64,
    pub v_f: f64,
    pub mu_f: f64,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            k: 64,
            n: 64,
            l: 800,
            p_d: 0.10,
            p_e: 0.20,
            p_f: 0.10,
            v_d: 0.50,
            v_e: 0.50,
            v_f: 0.50,
            mu_f: 0.0,
        }
    }
}

impl EnsembleParams {
    /// Check dimension and law constraints, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        for (name, dim) in [("k", self.k), ("n", self.n), ("l", self.l)] {
            if dim == 0 {
                return Err(Error::Domain(format!("ensemble.{name} must be at least 1")));
            }
        }
        for (name, p) in [("p_d", self.p_d), ("p_e", self.p_e), ("p_f", self.p_f)] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Domain(format!("ensemble.{name} must lie in [0, 1], got {p}")));
            }
        }
        for (name, v) in [("v_d", self.v_d), ("v_e", self.v_e), ("v_f", self.v_f)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("ensemble.{name} must be positive, got {v}")));
            }
        }
        if !self.mu_f.is_finite() {
            return Err(Error::Domain("ensemble.mu_f must be finite".into()));
        }
        Ok(())
    }

    /// Row-side connection fraction (alias for `p_d`); the expected
    /// out-degree of a row of `D` is `gamma() * n`. See [`Self::delta`]
    /// for the column side.
    pub fn gamma(&self) -> f64 {
        self.p_d
    }

    /// Column-side connection fraction (alias for `p_e`); the expected
    /// in-degree of a column of `E` is `delta() * n`.
    pub fn delta(&self) -> f64 {
        self.p_e
    }

    /// Expected number of nonzeros per row of `D`.
    pub fn expected_row_degree(&self) -> f64 {
        self.p_d * self.n as f64
    }

    /// Expected number of nonzeros per column of `E`.
    pub fn expected_column_degree(&self) -> f64 {
        self.p_e * self.n as f64
    }
}

/// One spike-and-slab value at a fully resolved address.
fn entry_value(seed: &SeedSpec, index: u64, density: f64, variance: f64, mean: f64) -> f64 {
    let u_gate = uniform_open(counter_hash(
        seed.master_seed,
        seed.stream_id,
        seed.replication_index,
        index << 1,
    ));
    if u_gate >= density {
        return 0.0;
    }
    let u_slab = uniform_open(counter_hash(
        seed.master_seed,
        seed.stream_id,
        seed.replication_index,
        (index << 1) | 1,
    ));
    mean + variance.sqrt() * q_inv_core(u_slab)
}

/// Sample a `rows x cols` spike-and-slab matrix at the given address.
pub fn sample_spike_slab(
    rows: usize,
    cols: usize,
    density: f64,
    variance: f64,
    mean: f64,
    seed: &SeedSpec,
) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Domain(format!("sample dimensions must be positive, got {rows}x{cols}")));
    }
    if !(0.0..=1.0).contains(&density) || density.is_nan() {
        return Err(Error::Domain(format!("density must lie in [0, 1], got {density}")));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    if !mean.is_finite() {
        return Err(Error::Domain("mean must be finite".into()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..(rows * cols) as u64 {
        data.push(entry_value(seed, i, density, variance, mean));
    }
    Matrix::from_vec(rows, cols, data)
}

/// Sample the `(D, E, F)` triple of one replication.
///
/// Uses `base.master_seed` and `base.replication_index`; the three matrices
/// take the fixed stream ids [`STREAM_D`], [`STREAM_E`], [`STREAM_F`], so an
/// instance is fully reproducible from `(master_seed, replication_index)`.
pub fn sample_instance(params: &EnsembleParams, base: &SeedSpec) -> Result<(Matrix, Matrix, Matrix)> {
    params.validate()?;
    let spec = |stream_id| SeedSpec {
        master_seed: base.master_seed,
        stream_id,
        replication_index: base.replication_index,
    };
    let d = sample_spike_slab(params.k, params.n, params.p_d, params.v_d, 0.0, &spec(STREAM_D))?;
    let e = sample_spike_slab(params.n, params.l, params.p_e, params.v_e, 0.0, &spec(STREAM_E))?;
    let f = sample_spike_slab(params.k, params.l, params.p_f, params.v_f, params.mu_f, &spec(STREAM_F))?;
    Ok((d, e, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kahan_sum;

    fn seed(master: u64, stream: u64, rep: u64) -> SeedSpec {
        SeedSpec { master_seed: master, stream_id: stream, replication_index: rep }
    }

    #[test]
    fn identical_addresses_are_bitwise_identical() {
        let s = seed(7, 1, 3);
        let a = sample_spike_slab(9, 11, 0.3, 0.5, 0.0, &s).unwrap();
        let b = sample_spike_slab(9, 11, 0.3, 0.5, 0.0, &s).unwrap();
        assert_eq!(a.data(), b.data());

        let p = EnsembleParams { k: 5, n: 6, l: 7, ..EnsembleParams::default() };
        let (d1, e1, f1) = sample_instance(&p, &s).unwrap();
        let (d2, e2, f2) = sample_instance(&p, &s).unwrap();
        assert_eq!(d1.data(), d2.data());
        assert_eq!(e1.data(), e2.data());
        assert_eq!(f1.data(), f2.data());
    }

    #[test]
    fn different_streams_and_replications_differ() {
        let a = sample_spike_slab(8, 8, 1.0, 0.5, 0.0, &seed(7, 0, 0)).unwrap();
        let b = sample_spike_slab(8, 8, 1.0, 0.5, 0.0, &seed(7, 1, 0)).unwrap();
        let c = sample_spike_slab(8, 8, 1.0, 0.5, 0.0, &seed(7, 0, 1)).unwrap();
        let d = sample_spike_slab(8, 8, 1.0, 0.5, 0.0, &seed(8, 0, 0)).unwrap();
        assert_ne!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
        assert_ne!(a.data(), d.data());
    }

    #[test]
    fn density_extremes() {
        let z = sample_spike_slab(10, 10, 0.0, 0.5, 0.0, &seed(1, 0, 0)).unwrap();
        assert!(z.data().iter().all(|&x| x == 0.0));
        let f = sample_spike_slab(10, 10, 1.0, 0.5, 0.0, &seed(1, 0, 0)).unwrap();
        assert!(f.data().iter().all(|&x| x != 0.0));
    }

    #[test]
    fn raising_density_only_adds_entries() {
        let s = seed(21, 2, 0);
        let sparse = sample_spike_slab(20, 20, 0.2, 0.5, 0.0, &s).unwrap();
        let dense = sample_spike_slab(20, 20, 0.3, 0.5, 0.0, &s).unwrap();
        for (a, b) in sparse.data().iter().zip(dense.data()) {
            if *a != 0.0 {
                assert_eq!(a, b, "existing slab value changed under density increase");
            }
        }
        let n_sparse = sparse.data().iter().filter(|x| **x != 0.0).count();
        let n_dense = dense.data().iter().filter(|x| **x != 0.0).count();
        assert!(n_dense >= n_sparse);
    }

    #[test]
    fn slab_moments_match_the_law() {
        // density 1, variance 0.5: check mean and second moment at 3 sigma
        let n = 1_000_000;
        let m = sample_spike_slab(1000, 1000, 1.0, 0.5, 0.0, &seed(3, 0, 0)).unwrap();
        let mean = kahan_sum(m.data()) / n as f64;
        let sq: Vec<f64> = m.data().iter().map(|x| x * x).collect();
        let m2 = kahan_sum(&sq) / n as f64;
        // se(mean) = sqrt(0.5/n), se(m2) = sqrt(2)*0.5/sqrt(n)
        assert!(mean.abs() < 3.0 * (0.5f64 / n as f64).sqrt(), "mean = {mean}");
        assert!((m2 - 0.5).abs() < 3.0 * 0.5 * (2.0f64 / n as f64).sqrt(), "m2 = {m2}");
    }

    #[test]
    fn slab_mean_offset_applies() {
        let n = 250_000;
        let m = sample_spike_slab(500, 500, 1.0, 0.5, 1.5, &seed(4, 0, 0)).unwrap();
        let mean = kahan_sum(m.data()) / n as f64;
        assert!((mean - 1.5).abs() < 3.0 * (0.5f64 / n as f64).sqrt(), "mean = {mean}");
    }

    #[test]
    fn nonzero_count_is_binomial() {
        let m = sample_spike_slab(250, 400, 0.1, 0.5, 0.0, &seed(5, 0, 0)).unwrap();
        let count = m.data().iter().filter(|x| **x != 0.0).count() as f64;
        let n = 100_000.0f64;
        let sd = (n * 0.1 * 0.9).sqrt();
        assert!((count - n * 0.1).abs() < 4.0 * sd, "count = {count}");
    }

    #[test]
    fn default_demand_matrix_nonzero_count() {
        // K=64, L=800, p_f=0.10: about 5120 demand edges
        let p = EnsembleParams::default();
        let (_, _, f) = sample_instance(&p, &seed(11, 0, 0)).unwrap();
        let count = f.data().iter().filter(|x| **x != 0.0).count() as f64;
        let slack = 4.0 * (5120.0f64 * 0.9).sqrt();
        assert!((count - 5120.0).abs() < slack, "count = {count}");
    }

    #[test]
    fn product_entry_variance_matches_law() {
        // K=N=L=1, densities 1: Var(D*E) = v_d * v_e
        let p = EnsembleParams {
            k: 1,
            n: 1,
            l: 1,
            p_d: 1.0,
            p_e: 1.0,
            p_f: 0.0,
            v_d: 0.5,
            v_e: 0.5,
            ..EnsembleParams::default()
        };
        let reps = 100_000u64;
        let mut sq = Vec::with_capacity(reps as usize);
        for r in 0..reps {
            let (d, e, _) = sample_instance(&p, &seed(6, 0, r)).unwrap();
            let prod = d.get(0, 0) * e.get(0, 0);
            sq.push(prod * prod);
        }
        let m2 = kahan_sum(&sq) / reps as f64;
        // Var((DE)^2) = 9 v^2 - v^2 = 8 v^2 for v = v_d * v_e
        let v = 0.25;
        let se = (8.0 * v * v / reps as f64).sqrt();
        assert!((m2 - v).abs() < 3.0 * se, "m2 = {m2}, want {v} +- {se}");
    }

    #[test]
    fn two_hop_entry_variance_matches_law() {
        // Var(A_kl) = n * p_d * p_e * v_d * v_e, estimated per replication
        let p = EnsembleParams {
            k: 16,
            n: 16,
            l: 16,
            p_d: 0.2,
            p_e: 0.2,
            p_f: 0.0,
            ..EnsembleParams::default()
        };
        let want = 16.0 * 0.2 * 0.2 * 0.5 * 0.5;
        let reps = 400;
        let mut per_rep = Vec::with_capacity(reps);
        for r in 0..reps {
            let (d, e, _) = sample_instance(&p, &seed(9, 0, r as u64)).unwrap();
            let a = d.matmul(&e).unwrap();
            let sq: Vec<f64> = a.data().iter().map(|x| x * x).collect();
            per_rep.push(kahan_sum(&sq) / sq.len() as f64);
        }
        let mean = kahan_sum(&per_rep) / reps as f64;
        let devs: Vec<f64> = per_rep.iter().map(|v| (v - mean) * (v - mean)).collect();
        let se = (kahan_sum(&devs) / (reps as f64 - 1.0) / reps as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * se, "mean = {mean}, want {want} +- {se}");
    }

    #[test]
    fn validation_names_offending_field() {
        let bad = EnsembleParams { p_d: 1.4, ..EnsembleParams::default() };
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("p_d"), "message: {err}");
        let bad = EnsembleParams { v_e: 0.0, ..EnsembleParams::default() };
        assert!(bad.validate().unwrap_err().to_string().contains("v_e"));
        let bad = EnsembleParams { k: 0, ..EnsembleParams::default() };
        assert!(bad.validate().unwrap_err().to_string().contains('k'));
    }

    #[test]
    fn degree_aliases() {
        let p = EnsembleParams::default();
        assert_eq!(p.gamma(), p.p_d);
        assert_eq!(p.delta(), p.p_e);
        assert_eq!(p.expected_row_degree(), 0.10 * 64.0);
        assert_eq!(p.expected_column_degree(), 0.20 * 64.0);
    }
}

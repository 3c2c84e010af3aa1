//! Thresholded supports, graph edit distance, and error norms.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::theory::CostModel;

/// Detection thresholds: `tau` binarizes the realized map `DE`, `tau_f`
/// binarizes the demand matrix `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub tau: f64,
    pub tau_f: f64,
}

impl Thresholds {
    /// Demand threshold defaults to half the map threshold.
    pub fn with_tau(tau: f64) -> Self {
        Self { tau, tau_f: tau / 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!("thresholds.tau must be positive, got {}", self.tau)));
        }
        if !(self.tau_f > 0.0 && self.tau_f.is_finite()) {
            return Err(Error::Domain(format!(
                "thresholds.tau_f must be positive, got {}",
                self.tau_f
            )));
        }
        Ok(())
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::with_tau(0.10)
    }
}

/// Bipartite adjacency obtained by thresholding a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySupport {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinarySupport {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "support index out of range");
        self.bits[r * self.cols + c]
    }

    /// Number of edges present.
    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Edge-wise comparison of a predicted support against a demand support.
///
/// `misses` counts demand edges absent from the prediction, `extras`
/// counts predicted edges with no demand behind them. `recall` and
/// `precision` use the convention that an empty reference set is served
/// perfectly (ratio 1.0), so they stay well defined on empty graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GedBreakdown {
    pub misses: usize,
    pub extras: usize,
    pub total: usize,
    pub demand_edges: usize,
    pub predicted_edges: usize,
    pub recall: f64,
    pub precision: f64,
}

/// Binarize by magnitude: an edge is present where `|x| >= t`.
pub fn threshold_support(m: &Matrix, t: f64) -> Result<BinarySupport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive, got {t}")));
    }
    Ok(BinarySupport {
        rows: m.rows(),
        cols: m.cols(),
        bits: m.data().iter().map(|x| x.abs() >= t).collect(),
    })
}

/// Graph edit distance between two supports on the same vertex sets:
/// the number of edge insertions plus deletions mapping one onto the other.
pub fn ged(predicted: &BinarySupport, demand: &BinarySupport) -> Result<GedBreakdown> {
    if predicted.rows != demand.rows || predicted.cols != demand.cols {
        return Err(Error::Shape {
            op: "ged",
            detail: format!(
                "support shapes differ: {}x{} vs {}x{}",
                predicted.rows, predicted.cols, demand.rows, demand.cols
            ),
        });
    }
    let mut misses = 0usize;
    let mut extras = 0usize;
    let mut demand_edges = 0usize;
    let mut predicted_edges = 0usize;
    for (p, d) in predicted.bits.iter().zip(&demand.bits) {
        if *p {
            predicted_edges += 1;
        }
        if *d {
            demand_edges += 1;
        }
        match (p, d) {
            (false, true) => misses += 1,
            (true, false) => extras += 1,
            _ => {}
        }
    }
    let recall = if demand_edges == 0 {
        1.0
    } else {
        (demand_edges - misses) as f64 / demand_edges as f64
    };
    let precision = if predicted_edges == 0 {
        1.0
    } else {
        (predicted_edges - extras) as f64 / predicted_edges as f64
    };
    Ok(GedBreakdown {
        misses,
        extras,
        total: misses + extras,
        demand_edges,
        predicted_edges,
        recall,
        precision,
    })
}

/// Threshold both matrices and compare: `|a| >= tau` against `|f| >= tau_f`.
pub fn ged_tau(a: &Matrix, f: &Matrix, th: &Thresholds) -> Result<GedBreakdown> {
    th.validate()?;
    let predicted = threshold_support(a, th.tau)?;
    let demand = threshold_support(f, th.tau_f)?;
    ged(&predicted, &demand)
}

/// Asymmetric edit cost: misses weighted by `c_minus`, extras by `c_plus`.
pub fn weighted_edge_cost(g: &GedBreakdown, costs: &CostModel) -> f64 {
    costs.c_minus * g.misses as f64 + costs.c_plus * g.extras as f64
}

/// Frobenius and entrywise-l1 error norms of `A - F`, plus the Frobenius
/// norm of the magnitude mismatch `|A| - |F|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub frobenius: f64,
    pub l1: f64,
    pub abs_frobenius: f64,
}

pub fn error_norms(a: &Matrix, f: &Matrix) -> Result<ErrorNorms> {
    let diff = a.sub(f)?;
    let abs_diff = a.abs().sub(&f.abs())?;
    Ok(ErrorNorms {
        frobenius: diff.frobenius_norm(),
        l1: diff.entrywise_l1(),
        abs_frobenius: abs_diff.frobenius_norm(),
    })
}

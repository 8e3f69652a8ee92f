//! Dimension estimates: pressure and affinity dimension, stopping sets,
//! measures, Lyapunov exponents, box counting and local diagnostics.

pub mod boxcount;
pub mod covering;
pub mod local;
pub mod lyapunov;
pub mod measure;
pub mod pressure;
pub mod stopping;

use std::collections::BTreeMap;

use serde::Serialize;

pub use boxcount::{box_count, box_count_1d, box_count_series, box_dimension, BoxCountSeries, EpsLadder};
pub use covering::{covering_number_checks, CoveringReport};
pub use local::{local_dimension_stat, slice_scale_rho, LocalDimension};
pub use lyapunov::{
    lyapunov_dimension, lyapunov_dimension_se, lyapunov_exponents, LyapunovDimension,
    LyapunovEstimate,
};
pub use measure::{entropy, gibbs_weights, quasi_bernoulli_constant, GibbsLevel, MeasureWeights};
pub use pressure::{
    affinity_dimension, cone_constant, partition_sum, phi_s, pressure_bracket, pressure_curve,
    PressureBracket, PressureCurve, WordSpectrum,
};
pub use stopping::{stopping_set_W, StoppingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Affinity,
    Box,
    Lyapunov,
}

/// A dimension value with a bracket `lo ≤ value ≤ hi` and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub method: Method,
    pub value: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    /// Method-specific numbers (slope error, r², exponents, ...).
    pub extra: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl DimensionReport {
    pub fn new(method: Method, value: f64, lo: f64, hi: f64) -> Self {
        DimensionReport {
            method,
            value,
            bracket_lo: lo,
            bracket_hi: hi,
            depth: None,
            tol: None,
            seed: None,
            extra: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn width(&self) -> f64 {
        self.bracket_hi - self.bracket_lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bracket_lo <= x && x <= self.bracket_hi
    }
}

/// `log Σ exp(xᵢ)` over fixed-size chunks combined in order, so the rounding
/// does not depend on how rayon schedules the chunks.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    use rayon::prelude::*;
    const CHUNK: usize = 4096;
    let parts: Vec<(f64, f64)> = xs
        .par_chunks(CHUNK)
        .map(|c| {
            let m = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                return (m, 0.0);
            }
            (m, c.iter().map(|x| (x - m).exp()).sum())
        })
        .collect();
    let m = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = parts.iter().map(|&(pm, ps)| ps * (pm - m).exp()).sum();
    m + s.ln()
}

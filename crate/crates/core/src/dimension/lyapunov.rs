use rayon::prelude::*;
use serde::Serialize;

use super::measure::{MeasureWeights, WordSampler};
use crate::error::{Error, Result};
use crate::ifs::IFS2;
use crate::linalg2::{top_singular_value, Matrix2};
use crate::rng::{stream_rng, streams_of};

/// Samples drawn per independent random stream.
const SAMPLES_PER_STREAM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub l1: f64,
    pub l2: f64,
    pub se1: f64,
    pub se2: f64,
    /// Word length actually used (a multiple of the Gibbs level).
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Monte-Carlo means of `(1/n) log α₁` and `(1/n) log α₂` over random words
/// of length `n`, with `log α₂ = log|det| − log α₁`.
pub fn lyapunov_exponents(
    ifs: &IFS2,
    weights: &MeasureWeights,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::invalid("need n ≥ 1 and samples ≥ 1"));
    }
    let sampler = WordSampler::new(ifs, weights)?;
    let block = sampler.block_len();
    let blocks = n.div_ceil(block);
    let len = blocks * block;
    let log_dets: Vec<f64> = ifs.maps().iter().map(|t| t.linear.det().abs().ln()).collect();

    let parts: Vec<[f64; 4]> = streams_of(samples, SAMPLES_PER_STREAM)
        .into_par_iter()
        .map(|(k, count)| {
            let mut rng = stream_rng(seed, k);
            let mut word = Vec::new();
            let mut acc = [0.0; 4];
            for _ in 0..count {
                let mut m = Matrix2::IDENTITY;
                let mut log_scale = 0.0;
                let mut log_det = 0.0;
                for _ in 0..blocks {
                    sampler.sample_block(&mut rng, &mut word);
                    for &a in &word {
                        m = m * ifs.maps()[a].linear;
                        let s = m.max_abs();
                        m = m.scale(1.0 / s);
                        log_scale += s.ln();
                        log_det += log_dets[a];
                    }
                }
                let la1 = top_singular_value(&m).ln() + log_scale;
                let x1 = la1 / len as f64;
                let x2 = (log_det - la1) / len as f64;
                acc[0] += x1;
                acc[1] += x1 * x1;
                acc[2] += x2;
                acc[3] += x2 * x2;
            }
            acc
        })
        .collect();
    let mut tot = [0.0; 4];
    for p in &parts {
        for i in 0..4 {
            tot[i] += p[i];
        }
    }
    let k = samples as f64;
    let mean1 = tot[0] / k;
    let mean2 = tot[2] / k;
    let se = |sq: f64, mean: f64| {
        if samples < 2 {
            return 0.0;
        }
        let var = ((sq - k * mean * mean) / (k - 1.0)).max(0.0);
        (var / k).sqrt()
    };
    Ok(LyapunovEstimate {
        l1: mean1,
        l2: mean2,
        se1: se(tot[1], mean1),
        se2: se(tot[3], mean2),
        n: len,
        samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovDimension {
    pub value: f64,
    /// The formula exceeded the planar bound 2 and was clipped.
    pub capped: bool,
}

/// `h/(−λ₁)` when `h ≤ −λ₁`, else `1 + (h + λ₁)/(−λ₂)`, clipped at 2.
pub fn lyapunov_dimension(h: f64, l1: f64, l2: f64) -> Result<LyapunovDimension> {
    if l1 >= 0.0 {
        return Err(Error::NonNegativeExponent(l1));
    }
    if l2 >= 0.0 {
        return Err(Error::NonNegativeExponent(l2));
    }
    if l2 > l1 || h < 0.0 {
        return Err(Error::invalid(format!(
            "need λ₂ ≤ λ₁ and h ≥ 0, got λ₁ = {l1}, λ₂ = {l2}, h = {h}"
        )));
    }
    let d = if h <= -l1 { h / -l1 } else { 1.0 + (h + l1) / -l2 };
    Ok(LyapunovDimension {
        value: d.min(2.0),
        capped: d > 2.0,
    })
}

/// First-order propagation `|∂D/∂λ₁|·se₁ + |∂D/∂λ₂|·se₂`.
pub fn lyapunov_dimension_se(h: f64, l1: f64, l2: f64, se1: f64, se2: f64) -> f64 {
    if h <= -l1 {
        (h / (l1 * l1)) * se1
    } else {
        se1 / -l2 + ((h + l1) / (l2 * l2)).abs() * se2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::AffineMap2;
    use crate::linalg2::Vec2;

    #[test]
    fn single_diagonal_map() {
        let ifs = IFS2::new(vec![AffineMap2::new(Matrix2::diag(0.8, 0.4), Vec2::default())]).unwrap();
        let e = lyapunov_exponents(&ifs, &MeasureWeights::uniform(1), 20, 10, 1).unwrap();
        assert!((e.l1 - 0.8f64.ln()).abs() < 1e-12);
        assert!((e.l2 - 0.4f64.ln()).abs() < 1e-12);
        assert!(e.se1 < 1e-12);
    }

    #[test]
    fn similarities() {
        let s = Matrix2::IDENTITY.scale(1.0 / 3.0);
        let ifs = IFS2::new(vec![
            AffineMap2::new(s, Vec2::default()),
            AffineMap2::new(s, Vec2::new(2.0 / 3.0, 0.0)),
        ])
        .unwrap();
        let e = lyapunov_exponents(&ifs, &MeasureWeights::uniform(2), 10, 100, 2).unwrap();
        assert!((e.l1 + 3f64.ln()).abs() < 1e-12);
        assert!((e.l2 + 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_calls() {
        let ifs = IFS2::new(vec![
            AffineMap2::new(Matrix2::new(0.3, 0.1, 0.05, 0.4), Vec2::default()),
            AffineMap2::new(Matrix2::new(0.2, 0.15, 0.1, 0.3), Vec2::default()),
        ])
        .unwrap();
        let w = MeasureWeights::uniform(2);
        let a = lyapunov_exponents(&ifs, &w, 30, 1000, 9).unwrap();
        let b = lyapunov_exponents(&ifs, &w, 30, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.l2 <= a.l1 && a.se1 > 0.0);
    }

    #[test]
    fn dimension_formula() {
        let d = lyapunov_dimension(0.5, -0.5, -1.0).unwrap();
        assert!((d.value - 1.0).abs() < 1e-15);
        let d = lyapunov_dimension(2f64.ln(), -3f64.ln(), -3f64.ln()).unwrap();
        assert!((d.value - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        let d = lyapunov_dimension(8f64.ln(), 0.4f64.ln(), 0.2f64.ln()).unwrap();
        let want = 1.0 + (8f64.ln() + 0.4f64.ln()) / -0.2f64.ln();
        assert!((d.value - want).abs() < 1e-14);
        assert!((d.value - 1.7227).abs() < 1e-4);
        let d = lyapunov_dimension(10.0, -0.1, -0.2).unwrap();
        assert!(d.capped && d.value == 2.0);
        assert!(matches!(lyapunov_dimension(1.0, 0.0, -1.0), Err(Error::NonNegativeExponent(_))));
    }

    #[test]
    fn se_matches_finite_difference() {
        let (h, l1, l2) = (1.5, -0.8, -1.7);
        let d = |a: f64, b: f64| lyapunov_dimension(h, a, b).unwrap().value;
        let eps = 1e-6;
        let g1 = (d(l1 + eps, l2) - d(l1 - eps, l2)) / (2.0 * eps);
        let g2 = (d(l1, l2 + eps) - d(l1, l2 - eps)) / (2.0 * eps);
        let se = lyapunov_dimension_se(h, l1, l2, 0.01, 0.02);
        assert!((se - (g1.abs() * 0.01 + g2.abs() * 0.02)).abs() < 1e-8);
    }
}

use std::collections::HashSet;

use serde::Serialize;

use super::{DimensionReport, Method};
use crate::error::{Error, Result};
use crate::linalg2::Vec2;

const OVERSAMPLING: f64 = 10.0;

/// Dyadic scales `ε = 2⁻ᵏ` for `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpsLadder {
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for EpsLadder {
    fn default() -> Self {
        EpsLadder { k_min: 4, k_max: 9 }
    }
}

impl EpsLadder {
    pub fn new(k_min: u32, k_max: u32) -> Result<Self> {
        if k_max < k_min + 3 || k_max > 60 {
            return Err(Error::invalid(format!(
                "ε ladder 2^-{k_min}..2^-{k_max} needs at least 4 levels and k ≤ 60"
            )));
        }
        Ok(EpsLadder { k_min, k_max })
    }

    pub fn epsilons(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| 0.5f64.powi(k as i32)).collect()
    }
}

/// Occupied cells of the origin-anchored grid of side `ε`.
pub fn box_count(points: &[Vec2], epsilon: f64) -> Result<usize> {
    check_input(points.len(), epsilon)?;
    let cells: HashSet<(i64, i64)> = points
        .iter()
        .map(|p| ((p.x / epsilon).floor() as i64, (p.y / epsilon).floor() as i64))
        .collect();
    Ok(cells.len())
}

pub fn box_count_1d(values: &[f64], epsilon: f64) -> Result<usize> {
    check_input(values.len(), epsilon)?;
    let cells: HashSet<i64> = values.iter().map(|v| (v / epsilon).floor() as i64).collect();
    Ok(cells.len())
}

fn check_input(n: usize, epsilon: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("box counting needs at least one point"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("ε = {epsilon} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountSeries {
    /// `(ε, N(ε))`, ε decreasing.
    pub pairs: Vec<(f64, usize)>,
}

impl BoxCountSeries {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["epsilon".into(), "count".into()]];
        rows.extend(
            self.pairs
                .iter()
                .map(|(e, n)| vec![e.to_string(), n.to_string()]),
        );
        rows
    }
}

pub fn box_count_series(points: &[Vec2], ladder: EpsLadder) -> Result<BoxCountSeries> {
    use rayon::prelude::*;
    let pairs = ladder
        .epsilons()
        .into_par_iter()
        .map(|e| box_count(points, e).map(|n| (e, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoxCountSeries { pairs })
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)`, bracketed by two
/// standard errors of the slope.
pub fn box_dimension(points: &[Vec2], ladder: EpsLadder) -> Result<DimensionReport> {
    let ladder = EpsLadder::new(ladder.k_min, ladder.k_max)?;
    let series = box_count_series(points, ladder)?;
    let xs: Vec<f64> = series.pairs.iter().map(|(e, _)| -e.ln()).collect();
    let ys: Vec<f64> = series.pairs.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let fit = least_squares(&xs, &ys);

    let mut rep = DimensionReport::new(
        Method::Box,
        fit.slope,
        fit.slope - 2.0 * fit.se,
        fit.slope + 2.0 * fit.se,
    );
    rep.extra.insert("slope_se".into(), fit.se);
    rep.extra.insert("r2".into(), fit.r2);
    rep.extra.insert("points".into(), points.len() as f64);
    rep.extra.insert("k_min".into(), ladder.k_min as f64);
    rep.extra.insert("k_max".into(), ladder.k_max as f64);
    if fit.r2 < 0.99 {
        rep.warnings.push(format!("poor log-log fit: r² = {:.4}", fit.r2));
    }
    let eps_min = 0.5f64.powi(ladder.k_max as i32);
    let needed = OVERSAMPLING * (1.0 / eps_min).powf(fit.slope.max(0.0));
    if (points.len() as f64) < needed {
        rep.warnings.push(format!(
            "undersampled: {} points, want ≥ {:.3e} for slope {:.3} at ε = 2^-{}",
            points.len(),
            needed,
            fit.slope,
            ladder.k_max
        ));
    }
    Ok(rep)
}

struct Fit {
    slope: f64,
    se: f64,
    r2: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Fit { slope, se, r2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::MeasureWeights;
    use crate::ifs::{chaos_game, AffineMap2, IFS2};
    use crate::linalg2::Matrix2;

    #[test]
    fn single_point() {
        let p = [Vec2::new(0.3, 0.7)];
        for k in 1..10 {
            assert_eq!(box_count(&p, 0.5f64.powi(k)).unwrap(), 1);
        }
        let r = box_dimension(&p, EpsLadder::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.contains(0.0));
    }

    #[test]
    fn segment_cells() {
        let eps = 1.0 / 16.0;
        let pts: Vec<Vec2> = (0..=160).map(|i| Vec2::new(i as f64 * eps / 10.0, 0.2)).collect();
        let n = box_count(&pts, eps).unwrap();
        assert!(n == 16 || n == 17);
    }

    #[test]
    fn lattice_square() {
        let pts: Vec<Vec2> = (0..512 * 512)
            .map(|k| Vec2::new((k % 512) as f64 / 512.0, (k / 512) as f64 / 512.0))
            .collect();
        assert_eq!(box_count(&pts, 1.0 / 32.0).unwrap(), 1024);
    }

    #[test]
    fn empty_and_bad_eps() {
        assert!(box_count(&[], 0.1).is_err());
        assert!(box_count(&[Vec2::default()], 0.0).is_err());
        assert!(box_count_1d(&[], 0.1).is_err());
        assert!(EpsLadder::new(4, 6).is_err());
    }

    #[test]
    fn series_monotone() {
        let pts: Vec<Vec2> = (0..5000)
            .map(|i| {
                let t = i as f64 / 5000.0;
                Vec2::new(t, t * t)
            })
            .collect();
        let s = box_count_series(&pts, EpsLadder::default()).unwrap();
        assert!(s.pairs.windows(2).all(|w| w[0].0 > w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(s.csv_rows().len(), 7);
    }

    #[test]
    fn segment_dimension() {
        let pts: Vec<Vec2> = (0..20_000).map(|i| Vec2::new(i as f64 / 20_000.0, 0.5)).collect();
        let r = box_dimension(&pts, EpsLadder::default()).unwrap();
        assert!((r.value - 1.0).abs() < 0.03, "{}", r.value);
    }

    #[test]
    fn gasket_dimension() {
        let h = Matrix2::IDENTITY.scale(0.5);
        let ifs = IFS2::new(vec![
            AffineMap2::new(h, Vec2::default()),
            AffineMap2::new(h, Vec2::new(0.5, 0.0)),
            AffineMap2::new(h, Vec2::new(0.25, 0.5)),
        ])
        .unwrap();
        let cloud = chaos_game(&ifs, &MeasureWeights::uniform(3), 400_000, 3).unwrap();
        let r = box_dimension(&cloud.points, EpsLadder::default()).unwrap();
        assert!((r.value - 3f64.ln() / 2f64.ln()).abs() < 0.05, "{}", r.value);
    }
}

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use super::{log_sum_exp, DimensionReport, Method};
use crate::error::{Error, Result};
use crate::ifs::IFS2;
use crate::linalg2::{singular_values, top_singular_value, Matrix2, SingularPair};

/// Words enumerated per level before giving up.
pub const DEFAULT_WORD_BUDGET: usize = 1 << 22;

/// Singular value function: `α₁ˢ` for `s ≤ 1`, `α₁ α₂^{s−1}` for `1 ≤ s ≤ 2`.
pub fn phi_s(sv: SingularPair, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::invalid(format!("s = {s} outside (0, 2]")));
    }
    Ok(if s <= 1.0 {
        sv.alpha1.powf(s)
    } else {
        sv.alpha1 * sv.alpha2.powf(s - 1.0)
    })
}

fn log_phi(log_a1: f64, log_det: f64, s: f64) -> f64 {
    if s <= 1.0 {
        s * log_a1
    } else {
        (2.0 - s) * log_a1 + (s - 1.0) * log_det
    }
}

/// Per-level `log α₁`, `log |det|` and log-multiplicity of every word over the
/// linear classes of an IFS. Maps sharing a linear part are merged, so a level
/// holds `kⁿ` entries for `k` distinct linear parts.
#[derive(Debug, Clone)]
pub struct WordSpectrum {
    classes: Vec<Vec<usize>>,
    levels: Vec<Level>,
}

#[derive(Debug, Clone, Default)]
pub struct Level {
    pub log_alpha1: Vec<f64>,
    pub log_det: Vec<f64>,
    pub log_mult: Vec<f64>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.log_alpha1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_alpha1.is_empty()
    }

    pub fn log_phi(&self, idx: usize, s: f64) -> f64 {
        log_phi(self.log_alpha1[idx], self.log_det[idx], s)
    }

    pub fn log_partition(&self, s: f64) -> f64 {
        let terms: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| self.log_mult[i] + self.log_phi(i, s))
            .collect();
        log_sum_exp(&terms)
    }
}

impl WordSpectrum {
    pub fn build(ifs: &IFS2, depth: usize, budget: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("depth must be ≥ 1"));
        }
        let classes = ifs.linear_classes();
        let k = classes.len();
        let needed = (k as u128).pow(depth as u32);
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mats: Vec<Matrix2> = classes.iter().map(|c| ifs.maps()[c[0]].linear).collect();
        let log_dets: Vec<f64> = mats.iter().map(|m| m.det().abs().ln()).collect();
        let log_sizes: Vec<f64> = classes.iter().map(|c| (c.len() as f64).ln()).collect();

        // normalised products with their accumulated log scale
        let mut frontier: Vec<(Matrix2, f64, f64, f64)> = vec![(Matrix2::IDENTITY, 0.0, 0.0, 0.0)];
        let mut levels = Vec::with_capacity(depth);
        for _ in 0..depth {
            frontier = frontier
                .par_iter()
                .flat_map_iter(|&(m, ls, ld, lm)| {
                    let mats = &mats;
                    let log_dets = &log_dets;
                    let log_sizes = &log_sizes;
                    (0..k).map(move |c| {
                        let p = m * mats[c];
                        let scale = p.max_abs();
                        (p.scale(1.0 / scale), ls + scale.ln(), ld + log_dets[c], lm + log_sizes[c])
                    })
                })
                .collect();
            let level = Level {
                log_alpha1: frontier
                    .par_iter()
                    .map(|(m, ls, _, _)| top_singular_value(m).ln() + ls)
                    .collect(),
                log_det: frontier.iter().map(|f| f.2).collect(),
                log_mult: frontier.iter().map(|f| f.3).collect(),
            };
            levels.push(level);
        }
        Ok(WordSpectrum { classes, levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Level `n ≥ 1`, words of length `n`.
    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n - 1]
    }

    pub fn log_partition(&self, n: usize, s: f64) -> f64 {
        self.level(n).log_partition(s)
    }

    /// `min_{k ≤ n} (1/k) log Z_k(s)`, an upper bound for the pressure.
    pub fn upper_pressure(&self, s: f64) -> f64 {
        (1..=self.depth())
            .map(|k| self.log_partition(k, s) / k as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_{k ≤ n} (1/k)(log Z_k(s) + log κₛ)`, a lower bound for the pressure
    /// when `κ` is a supermultiplicativity constant for `φˢ`.
    pub fn lower_pressure(&self, s: f64, kappa: f64) -> f64 {
        let lk = kappa_exponent(s) * kappa.ln();
        (1..=self.depth())
            .map(|k| (self.log_partition(k, s) + lk) / k as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exponent `e(s)` with `φˢ(AB) ≥ κ^{e(s)} φˢ(A) φˢ(B)`.
fn kappa_exponent(s: f64) -> f64 {
    if s <= 1.0 {
        s
    } else {
        2.0 - s
    }
}

/// Constant `κ ∈ (0, 1]` with `α₁(AB) ≥ κ α₁(A) α₁(B)` over all products.
///
/// Similarities give `κ = 1`. For entrywise-positive systems every product
/// maps the first quadrant into the cone `K` spanned by the columns; top
/// singular vectors of products lie in `K` (left) and the first quadrant
/// (right), so `κ = sin β` with `β` the angular margin of `K` inside the
/// quadrant. Other systems get `None`.
pub fn cone_constant(ifs: &IFS2) -> Option<f64> {
    let similarity = ifs.maps().iter().all(|t| {
        singular_values(&t.linear).is_ok_and(|sv| sv.alpha1 - sv.alpha2 <= 1e-14 * sv.alpha1)
    });
    if similarity {
        return Some(1.0);
    }
    if !ifs.check_positivity() {
        return None;
    }
    let mut beta = FRAC_PI_2;
    for t in ifs.maps() {
        for j in 0..2 {
            let c = t.linear.col(j);
            let a = c.y.atan2(c.x);
            beta = beta.min(a).min(FRAC_PI_2 - a);
        }
    }
    (beta > 0.0).then(|| beta.sin())
}

/// `log Σ_{|w|=n} φˢ(A_w)`.
pub fn partition_sum(ifs: &IFS2, n: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::invalid(format!("s = {s} outside (0, 2]")));
    }
    Ok(WordSpectrum::build(ifs, n, DEFAULT_WORD_BUDGET)?.log_partition(n, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureBracket {
    pub upper: f64,
    /// `None` when no cone constant is available.
    pub lower: Option<f64>,
    pub kappa: Option<f64>,
}

pub fn pressure_bracket(ifs: &IFS2, n: usize, s: f64) -> Result<PressureBracket> {
    let spec = WordSpectrum::build(ifs, n, DEFAULT_WORD_BUDGET)?;
    let kappa = cone_constant(ifs);
    Ok(PressureBracket {
        upper: spec.upper_pressure(s),
        lower: kappa.map(|k| spec.lower_pressure(s, k)),
        kappa,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PressureCurve {
    pub depth: usize,
    pub s: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<Option<f64>>,
}

impl PressureCurve {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["s".into(), "upper".into(), "lower".into()]];
        for i in 0..self.s.len() {
            rows.push(vec![
                self.s[i].to_string(),
                self.upper[i].to_string(),
                self.lower[i].map_or(String::new(), |v| v.to_string()),
            ]);
        }
        rows
    }
}

pub fn pressure_curve(ifs: &IFS2, n: usize, grid: &[f64]) -> Result<PressureCurve> {
    let spec = WordSpectrum::build(ifs, n, DEFAULT_WORD_BUDGET)?;
    let kappa = cone_constant(ifs);
    Ok(PressureCurve {
        depth: n,
        s: grid.to_vec(),
        upper: grid.iter().map(|&s| spec.upper_pressure(s)).collect(),
        lower: grid
            .iter()
            .map(|&s| kappa.map(|k| spec.lower_pressure(s, k)))
            .collect(),
    })
}

/// Bisection for the sign change of a function positive at `lo` and
/// non-positive at `hi`; returns the final `(lo, hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Affinity dimension bracketed by the zeros of the lower and upper pressure
/// bounds at `depth`.
pub fn affinity_dimension(ifs: &IFS2, depth: usize, tol: f64) -> Result<DimensionReport> {
    affinity_dimension_with_budget(ifs, depth, tol, DEFAULT_WORD_BUDGET)
}

pub fn affinity_dimension_with_budget(
    ifs: &IFS2,
    depth: usize,
    tol: f64,
    budget: usize,
) -> Result<DimensionReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let spec = WordSpectrum::build(ifs, depth, budget)?;
    let upper = |s: f64| spec.upper_pressure(s);
    if upper(2.0) > 0.0 {
        return Err(Error::OutOfPlanarRange { lo: 2.0, hi: f64::INFINITY });
    }
    let step = (tol * 1e-2).min(1e-6);
    let (u_lo, u_hi) = bisect(upper, 0.0, 2.0, step);
    if u_hi <= step {
        return Err(Error::OutOfPlanarRange { lo: 0.0, hi: u_hi });
    }
    let kappa = cone_constant(ifs);
    let mut rep;
    match kappa {
        Some(k) => {
            let (l_lo, _) = bisect(|s| spec.lower_pressure(s, k), 0.0, 2.0, step);
            rep = DimensionReport::new(Method::Affinity, 0.5 * (l_lo + u_hi), l_lo, u_hi);
            rep.extra.insert("kappa".into(), k);
            rep.extra.insert("lower_root".into(), l_lo);
        }
        None => {
            rep = DimensionReport::new(Method::Affinity, 0.5 * (u_lo + u_hi), 0.0, u_hi);
            rep.warnings.push(
                "lower pressure bound unavailable (no cone constant: matrices not positive); \
                 value is the upper-pressure root"
                    .into(),
            );
        }
    }
    rep.extra.insert("upper_root".into(), u_hi);
    rep.depth = Some(depth);
    rep.tol = Some(tol);
    if kappa.is_some() && rep.width() > tol {
        rep.warnings.push(format!(
            "depth-limited: bracket width {:.3e} exceeds tol {:.1e}",
            rep.width(),
            tol
        ));
    }
    Ok(rep)
}

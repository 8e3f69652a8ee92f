use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::dimension::affinity_dimension;
use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::{check_separation, AffineMap2, IFS2};
use crate::linalg2::{Matrix2, Vec2};

/// `½·[[cos τ⁻, cos τ⁺], [sin τ⁻, sin τ⁺]]`: maps the first quadrant onto the
/// cone between the angles `τ⁻` and `τ⁺`.
pub fn cone_matrix(tau_minus: f64, tau_plus: f64) -> Result<Matrix2> {
    if !(0.0 < tau_minus && tau_minus < tau_plus && tau_plus < FRAC_PI_2) {
        return Err(Error::invalid(format!(
            "need 0 < τ⁻ < τ⁺ < π/2, got ({tau_minus}, {tau_plus})"
        )));
    }
    Ok(cone_matrix_unchecked(tau_minus, tau_plus))
}

pub(crate) fn cone_matrix_unchecked(tau_minus: f64, tau_plus: f64) -> Matrix2 {
    Matrix2::new(
        0.5 * tau_minus.cos(),
        0.5 * tau_plus.cos(),
        0.5 * tau_minus.sin(),
        0.5 * tau_plus.sin(),
    )
}

/// Singular values `½(1 ± cos τ)^{1/2}` of a cone matrix of width `τ`.
pub fn cone_singular_values(tau: f64) -> (f64, f64) {
    (0.5 * (1.0 + tau.cos()).sqrt(), 0.5 * (1.0 - tau.cos()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFamilyParams {
    pub tau1_minus: f64,
    pub tau1_plus: f64,
    pub tau2_minus: f64,
    pub tau2_plus: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_margin")]
    pub placement_margin: f64,
}

fn default_margin() -> f64 {
    0.1
}

impl GridFamilyParams {
    /// Cones `(t1, t1 + τ)` and `(t2, t2 + τ)`.
    pub fn new(t1: f64, t2: f64, tau: f64, n: usize) -> Self {
        GridFamilyParams {
            tau1_minus: t1,
            tau1_plus: t1 + tau,
            tau2_minus: t2,
            tau2_plus: t2 + tau,
            n,
            placement_margin: default_margin(),
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        GridFamilyParams { n, ..self }
    }

    pub fn tau(&self) -> f64 {
        self.tau1_plus - self.tau1_minus
    }

    pub fn validate(&self) -> Result<()> {
        let a = [self.tau1_minus, self.tau1_plus, self.tau2_minus, self.tau2_plus];
        if !(0.0 < a[0] && a[0] < a[1] && a[1] < a[2] && a[2] < a[3] && a[3] < FRAC_PI_2) {
            return Err(Error::invalid(format!(
                "need 0 < τ₁⁻ < τ₁⁺ < τ₂⁻ < τ₂⁺ < π/2, got {a:?}"
            )));
        }
        let (w1, w2) = (a[1] - a[0], a[3] - a[2]);
        if (w1 - w2).abs() > 1e-12 * w1.max(1.0) {
            return Err(Error::invalid(format!("cone widths differ: {w1} vs {w2}")));
        }
        if w1 >= FRAC_PI_4 {
            return Err(Error::invalid(format!("cone width τ = {w1} must be < π/4")));
        }
        if self.n < 2 {
            return Err(Error::invalid(format!("N = {} must be ≥ 2", self.n)));
        }
        if !(self.placement_margin > 0.0 && self.placement_margin < 1.0) {
            return Err(Error::invalid(format!(
                "placement margin {} must lie in (0, 1)",
                self.placement_margin
            )));
        }
        Ok(())
    }

    pub fn a1(&self) -> Matrix2 {
        cone_matrix_unchecked(self.tau1_minus, self.tau1_plus)
    }

    pub fn a2(&self) -> Matrix2 {
        cone_matrix_unchecked(self.tau2_minus, self.tau2_plus)
    }
}

/// Width and height of `A([0,1]²)` for a positive `A`.
fn extent(a: &Matrix2) -> (f64, f64) {
    (a.a11 + a.a12, a.a21 + a.a22)
}

/// `2N²` maps: in each cell `(i, j)` of the `N × N` grid, the flatter image
/// `A₁/N` sits in the top-left corner and `A₂/N` in the bottom-right, each
/// inset from the cell walls by `margin` times half its free room.
pub fn grid_ifs(p: &GridFamilyParams) -> Result<IFS2> {
    p.validate()?;
    let n = p.n as f64;
    let cell = 1.0 / n;
    let l1 = p.a1().scale(cell);
    let l2 = p.a2().scale(cell);
    let (w1, h1) = extent(&l1);
    let (w2, h2) = extent(&l2);
    for (name, w, h) in [("A₁", w1, h1), ("A₂", w2, h2)] {
        if w >= cell || h >= cell {
            return Err(Error::PlacementFailed(format!(
                "{name}/N image is {w:.4} × {h:.4}, cell side is {cell:.4}"
            )));
        }
    }
    let m = p.placement_margin;
    let off1 = Vec2::new(m * (cell - w1) / 2.0, cell - h1 - m * (cell - h1) / 2.0);
    let off2 = Vec2::new(cell - w2 - m * (cell - w2) / 2.0, m * (cell - h2) / 2.0);
    let sq = ConvexPolygon::unit_square();
    let q1 = sq.transformed(&AffineMap2::new(l1, off1));
    let q2 = sq.transformed(&AffineMap2::new(l2, off2));
    if q1.intersects(&q2) {
        return Err(Error::PlacementFailed(format!(
            "parallelograms overlap inside a cell: A₁ image at {:?}, A₂ image at {:?}",
            q1.bounds(),
            q2.bounds()
        )));
    }

    let mut maps = Vec::with_capacity(2 * p.n * p.n);
    let mut labels = Vec::with_capacity(2 * p.n * p.n);
    for i in 0..p.n {
        for j in 0..p.n {
            let corner = Vec2::new(i as f64 * cell, j as f64 * cell);
            maps.push(AffineMap2::new(l1, corner + off1));
            maps.push(AffineMap2::new(l2, corner + off2));
            labels.push(format!("A1[{i},{j}]"));
            labels.push(format!("A2[{i},{j}]"));
        }
    }
    let ifs = IFS2::new(maps)?.with_labels(labels)?;
    ifs.require_positive()?;
    let sep = check_separation(&ifs, &sq, 1)?;
    if !sep.pass {
        return Err(Error::PlacementFailed("images of the unit square meet".into()));
    }
    Ok(ifs)
}

/// `log(2N²)/(log N − log α₂)`.
pub fn affinity_lower_sN(n: usize, alpha2: f64) -> f64 {
    let n = n as f64;
    (2.0 * n * n).ln() / (n.ln() - alpha2.ln())
}

/// `(2 log N + log 2)/(log N − log α₂) − log(α₁/α₂)/(log N − log α₁)`.
pub fn dimH_mu_lower(n: usize, alpha1: f64, alpha2: f64) -> f64 {
    let ln = (n as f64).ln();
    (2.0 * ln + 2f64.ln()) / (ln - alpha2.ln()) - (alpha1 / alpha2).ln() / (ln - alpha1.ln())
}

/// `(log 2 − (2 − s)·log(α₁/α₂))/(log 8 − log τ)`; may be negative.
pub fn furstenberg_dim_lower(tau: f64, alpha1: f64, alpha2: f64, s_n: f64) -> f64 {
    (2f64.ln() - (2.0 - s_n) * (alpha1 / alpha2).ln()) / (8f64.ln() - tau.ln())
}

/// Where the lower bound on the affinity dimension comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SnSource {
    ClosedForm,
    /// Lower end of the affinity bracket of the constructed system.
    Solver { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalInequality {
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub s_n: f64,
    pub s_source: SnSource,
    pub dim_mu_lower: f64,
    pub furstenberg_lower: f64,
    /// The Furstenberg term is negative and says nothing.
    pub vacuous: bool,
    pub lhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `dim_H μ + dim_H μ_F > 2` with both terms replaced by their lower bounds.
pub fn check_final_inequality(p: &GridFamilyParams) -> Result<FinalInequality> {
    check_final_inequality_with(p, SnSource::ClosedForm)
}

pub fn check_final_inequality_with(p: &GridFamilyParams, source: SnSource) -> Result<FinalInequality> {
    p.validate()?;
    let tau = p.tau();
    let (a1, a2) = cone_singular_values(tau);
    let s_n = match source {
        SnSource::ClosedForm => affinity_lower_sN(p.n, a2),
        SnSource::Solver { depth } => affinity_dimension(&grid_ifs(p)?, depth, 1e-4)?.bracket_lo,
    };
    let dim_mu = dimH_mu_lower(p.n, a1, a2);
    let furst = furstenberg_dim_lower(tau, a1, a2, s_n);
    let lhs = dim_mu + furst;
    Ok(FinalInequality {
        n: p.n,
        tau,
        alpha1: a1,
        alpha2: a2,
        s_n,
        s_source: source,
        dim_mu_lower: dim_mu,
        furstenberg_lower: furst,
        vacuous: furst < 0.0,
        lhs,
        margin: lhs - 2.0,
        pass: lhs > 2.0,
    })
}

/// Smallest `N ≤ n_max` passing the inequality, by a linear scan from 2.
pub fn find_min_N(p: &GridFamilyParams, n_max: usize, source: SnSource) -> Result<Option<usize>> {
    for n in 2..=n_max {
        if check_final_inequality_with(&p.with_n(n), source)?.pass {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

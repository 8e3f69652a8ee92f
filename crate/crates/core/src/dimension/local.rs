use serde::Serialize;

use super::measure::MeasureWeights;
use crate::error::{Error, Result};
use crate::ifs::projection::project_points;
use crate::ifs::{chaos_game, Word, IFS2};
use crate::linalg2::svd_axes;
use crate::projective::{angle_metric, phi_word, Direction};

/// Factor by which `A_w⁻¹` stretches the spacing of lines parallel to `θ`:
/// `(α₁² cos²τ + α₂² sin²τ)^{−1/2}` with `τ` the angle from `θ` to the minor
/// axis of the image ellipse `A_w(B)`.
pub fn slice_scale_rho(ifs: &IFS2, w: &Word, theta: Direction) -> Result<f64> {
    let a = ifs.compose(w)?.linear;
    let axes = svd_axes(&a)?;
    let tau = angle_metric(theta, axes.minor_dir);
    let (c, s) = (tau.cos(), tau.sin());
    Ok(1.0 / (axes.alpha1 * axes.alpha1 * c * c + axes.alpha2 * axes.alpha2 * s * s).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalDimension {
    /// `log(fraction) / log(radius)`; `None` when no sample fell in the ball.
    pub value: Option<f64>,
    pub fraction: f64,
    pub radius: f64,
    pub hits: usize,
    pub count: usize,
    pub undersampled: bool,
}

/// Empirical local dimension of the projected measure: project a weighted
/// chaos-game cloud along `φ_{a|n}(θ)` and measure the mass within
/// `α₂(a|n)/α₁(a|n)` of the projected point coded by `σⁿa`. When `n = |a|` the
/// first cloud point stands in for that point.
pub fn local_dimension_stat(
    ifs: &IFS2,
    weights: &MeasureWeights,
    theta: Direction,
    a: &Word,
    n: usize,
    sample_count: usize,
    seed: u64,
) -> Result<LocalDimension> {
    if n > a.len() {
        return Err(Error::invalid(format!("n = {n} exceeds |a| = {}", a.len())));
    }
    if !matches!(weights, MeasureWeights::Bernoulli(_)) {
        return Err(Error::invalid("local dimension needs Bernoulli weights"));
    }
    let head = a.prefix(n);
    let psi = phi_word(ifs, &head, theta)?;
    let axes = svd_axes(&ifs.compose(&head)?.linear)?;
    let radius = axes.alpha2 / axes.alpha1;

    let cloud = chaos_game(ifs, weights, sample_count, seed)?;
    let proj = project_points(&cloud, psi);
    let tail = a.shift(n);
    let center = if tail.is_empty() {
        proj[0]
    } else {
        crate::ifs::projection::project_point(ifs.code_to_point(&tail, cloud.points[0])?, psi)
    };
    let hits = proj.iter().filter(|&&t| (t - center).abs() <= radius).count();
    let fraction = hits as f64 / proj.len() as f64;
    let value = (hits > 0 && radius < 1.0).then(|| fraction.ln() / radius.ln());
    Ok(LocalDimension {
        value,
        fraction,
        radius,
        hits,
        count: proj.len(),
        undersampled: hits < 10,
    })
}

use rayon::prelude::*;
use serde::Serialize;

use super::boxcount::{box_count, box_count_1d};
use super::measure::MeasureWeights;
use super::stopping::stopping_set_W;
use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::projection::project_points;
use crate::ifs::{chaos_game, check_separation, PointCloud, Word, IFS2};
use crate::projective::{invariant_interval_J, Direction};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub epsilon: f64,
    pub theta: f64,
    /// Size of the stopping set `W(ε)`.
    pub words_total: usize,
    pub words_checked: usize,
    /// Separation gap of the first-level hull images.
    pub gap: f64,
    /// `24/d²`.
    pub m_const: f64,
    /// `Σ_w N(ε, E_w)`, scaled up by `words_total/words_checked` when sampled.
    pub component_sum: f64,
    /// `N(ε, E)`.
    pub total_count: usize,
    pub sum_pass: bool,
    /// Words where the projected cover was larger than the planar grid count.
    pub projection_violations: usize,
    /// Smallest `N(ε, E_w) − N(ε, π_θ E_w)` over checked words.
    pub worst_projection_margin: i64,
    /// Words where the plain `ε`-grid count of the projection exceeded the
    /// planar count; grid alignment can cause this, so it is not a failure.
    pub grid_projection_excess: usize,
    /// Largest `N(ε, E_w) / N(ε, π_θ E_w)`: a witness for the reverse inequality.
    pub left_constant: f64,
    pub notes: Vec<String>,
    pub pass: bool,
}

/// Fewest closed intervals of length `len` covering `values`.
fn greedy_cover(values: &mut [f64], len: f64) -> usize {
    values.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut reach = f64::NEG_INFINITY;
    for &v in values.iter() {
        if v > reach {
            count += 1;
            reach = v + len;
        }
    }
    count
}

/// Compares covering numbers of the level-`ε` components `E_w = T_w(E)` with
/// those of their projections along `θ`, and their total with `N(ε, E)`.
/// Components come from one chaos-game cloud of `cloud_points` points; at most
/// `budget` stopping-set words are checked.
pub fn covering_number_checks(
    ifs: &IFS2,
    hull: &ConvexPolygon,
    epsilon: f64,
    theta: Direction,
    budget: usize,
    cloud_points: usize,
    seed: u64,
) -> Result<CoveringReport> {
    let mut notes = Vec::new();
    if ifs.check_positivity() {
        let j = invariant_interval_J(ifs)?;
        if !j.contains_tol(theta, 1e-12) {
            return Err(Error::Precondition(format!(
                "θ = {:.6} lies outside J = [{:.6}, {:.6}]",
                theta.angle(),
                j.lo().angle(),
                j.hi_angle()
            )));
        }
    } else {
        notes.push("matrices not positive: θ ∈ J not checked".into());
    }
    let sep = check_separation(ifs, hull, 1)?;
    if !sep.pass || sep.min_gap <= 0.0 {
        return Err(Error::Precondition(
            "strong separation not verified at depth 1".into(),
        ));
    }
    let d = sep.min_gap;
    let m_const = 24.0 / (d * d);

    let stop = stopping_set_W(ifs, epsilon)?;
    let total = stop.words.len();
    let words: Vec<&Word> = if total > budget {
        let mut rng = stream_rng(seed, u64::MAX);
        let mut idx = rand::seq::index::sample(&mut rng, total, budget).into_vec();
        idx.sort_unstable();
        notes.push(format!("{budget} of {total} stopping-set words sampled"));
        idx.into_iter().map(|i| &stop.words[i]).collect()
    } else {
        stop.words.iter().collect()
    };

    let cloud = chaos_game(ifs, &MeasureWeights::uniform(ifs.len()), cloud_points, seed)?;
    let total_count = box_count(&cloud.points, epsilon)?;
    let len = epsilon * (theta.angle().sin().abs() + theta.angle().cos().abs());

    let per_word: Vec<(usize, usize, usize)> = words
        .par_iter()
        .map(|w| {
            let part: PointCloud = cloud.mapped(&ifs.compose(w)?);
            let planar = box_count(&part.points, epsilon)?;
            let mut proj = project_points(&part, theta);
            let grid = box_count_1d(&proj, epsilon)?;
            let cover = greedy_cover(&mut proj, len);
            Ok((planar, cover, grid))
        })
        .collect::<Result<_>>()?;

    let checked = per_word.len();
    let raw_sum: usize = per_word.iter().map(|p| p.0).sum();
    let component_sum = raw_sum as f64 * total as f64 / checked as f64;
    let sum_pass = component_sum <= m_const * total_count as f64;
    let projection_violations = per_word.iter().filter(|p| p.1 > p.0).count();
    let worst_projection_margin = per_word
        .iter()
        .map(|p| p.0 as i64 - p.1 as i64)
        .min()
        .unwrap_or(0);
    let grid_projection_excess = per_word.iter().filter(|p| p.2 > p.0).count();
    let left_constant = per_word
        .iter()
        .map(|p| p.0 as f64 / p.1 as f64)
        .fold(1.0, f64::max);
    Ok(CoveringReport {
        epsilon,
        theta: theta.angle(),
        words_total: total,
        words_checked: checked,
        gap: d,
        m_const,
        component_sum,
        total_count,
        sum_pass,
        projection_violations,
        worst_projection_margin,
        grid_projection_excess,
        left_constant,
        notes,
        pass: sum_pass && projection_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::AffineMap2;
    use crate::linalg2::{Matrix2, Vec2};

    #[test]
    fn greedy_cover_counts() {
        let mut v = vec![0.0, 0.05, 0.1, 0.35, 0.9, 0.95];
        assert_eq!(greedy_cover(&mut v, 0.1), 3);
        assert_eq!(greedy_cover(&mut [0.5], 0.1), 1);
    }

    #[test]
    fn similarities_pass() {
        let s = Matrix2::IDENTITY.scale(0.4);
        let ifs = IFS2::new(vec![
            AffineMap2::new(s, Vec2::default()),
            AffineMap2::new(s, Vec2::new(0.6, 0.0)),
            AffineMap2::new(s, Vec2::new(0.3, 0.6)),
        ])
        .unwrap();
        let r = covering_number_checks(
            &ifs,
            &ConvexPolygon::unit_square(),
            1.0 / 64.0,
            Direction::new(2.0),
            512,
            20_000,
            1,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.left_constant >= 1.0);
        assert_eq!(r.words_checked, r.words_total);
    }

    #[test]
    fn needs_separation() {
        let s = Matrix2::IDENTITY.scale(0.5);
        let ifs = IFS2::new(vec![
            AffineMap2::new(s, Vec2::default()),
            AffineMap2::new(s, Vec2::new(0.5, 0.0)),
        ])
        .unwrap();
        let e = covering_number_checks(&ifs, &ConvexPolygon::unit_square(), 0.05, Direction::new(2.0), 16, 1000, 1);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}

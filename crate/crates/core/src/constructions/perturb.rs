use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::curve::check_conds;
use super::grid::{affinity_lower_sN, dimH_mu_lower, furstenberg_dim_lower};
use super::{CurveFamilyParams, GridFamilyParams};
use crate::dimension::MeasureWeights;
use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::{chaos_game, check_hull_invariant, check_separation, AffineMap2, Hull, IFS2};
use crate::linalg2::{singular_values, Matrix2, Vec2};
use crate::projective::check_J_S_disjoint;
use crate::rng::stream_rng;

/// Adds independent uniform `[−δ, δ]` noise to every matrix entry and
/// translation coordinate. Fails if a perturbed map stops contracting.
pub fn perturb_ifs(ifs: &IFS2, delta: f64, seed: u64) -> Result<IFS2> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("δ = {delta} must be ≥ 0")));
    }
    let mut rng = stream_rng(seed, 0);
    let mut noise = || if delta == 0.0 { 0.0 } else { rng.gen_range(-delta..=delta) };
    let maps = ifs
        .maps()
        .iter()
        .map(|t| {
            let l = t.linear;
            let linear = Matrix2::new(l.a11 + noise(), l.a12 + noise(), l.a21 + noise(), l.a22 + noise());
            let translation = Vec2::new(t.translation.x + noise(), t.translation.y + noise());
            AffineMap2::new(linear, translation)
        })
        .collect();
    let out = IFS2::new(maps)?;
    match ifs.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => Ok(out),
    }
}

/// Which certificates a (possibly perturbed) system keeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub positivity: bool,
    pub separation: bool,
    /// Grid: the dimension inequality with worst-case singular values and
    /// cone widths over all maps. Curve: the translation window.
    pub family_condition: bool,
    /// Angular gap between `J` and the separation directions (curve only).
    pub js_gap: Option<f64>,
    pub pass: bool,
}

/// The system with a hull it leaves invariant: the unit square if possible,
/// else the unit disc after conjugating by the fitted similarity.
fn invariant_frame(ifs: &IFS2) -> Result<(IFS2, ConvexPolygon)> {
    let sq = ConvexPolygon::unit_square();
    if check_hull_invariant(ifs, &sq).is_ok() {
        return Ok((ifs.clone(), sq));
    }
    let (conj, _) = ifs.fit_disc()?;
    Ok((conj, Hull::UnitDisc.polygon()))
}

fn separated(ifs: &IFS2) -> bool {
    invariant_frame(ifs)
        .and_then(|(f, hull)| check_separation(&f, &hull, 1))
        .is_ok_and(|r| r.pass)
}

/// Certificates for a grid-family system with `N` cells per side. Maps at even
/// positions belong to the flat cone and odd ones to the steep cone.
pub fn certify_grid(ifs: &IFS2, n: usize) -> Result<Certificate> {
    let positivity = ifs.check_positivity();
    let separation = separated(ifs);
    let family_condition = positivity && grid_condition(ifs, n)?;
    Ok(Certificate {
        positivity,
        separation,
        family_condition,
        js_gap: None,
        pass: positivity && separation && family_condition,
    })
}

/// The cone of a positive matrix is spanned by its columns.
fn column_angles(m: &Matrix2) -> (f64, f64) {
    let a = m.a21.atan2(m.a11);
    let b = m.a22.atan2(m.a12);
    (a.min(b), a.max(b))
}

fn grid_condition(ifs: &IFS2, n: usize) -> Result<bool> {
    let scale = n as f64;
    let mut a1 = 0.0f64;
    let mut a2 = f64::INFINITY;
    let mut tau = f64::INFINITY;
    let mut flat_hi = f64::NEG_INFINITY;
    let mut steep_lo = f64::INFINITY;
    for (k, t) in ifs.maps().iter().enumerate() {
        let m = t.linear.scale(scale);
        let sv = singular_values(&m)?;
        a1 = a1.max(sv.alpha1);
        a2 = a2.min(sv.alpha2);
        let (lo, hi) = column_angles(&m);
        tau = tau.min(hi - lo);
        if k % 2 == 0 {
            flat_hi = flat_hi.max(hi);
        } else {
            steep_lo = steep_lo.min(lo);
        }
    }
    if flat_hi >= steep_lo || !(a1 < 1.0 && a2 > 0.0) {
        return Ok(false);
    }
    let s_n = affinity_lower_sN(n, a2);
    Ok(dimH_mu_lower(n, a1, a2) + furstenberg_dim_lower(tau, a1, a2, s_n) > 2.0)
}

/// Certificates for a two-map curve-family system; the window check uses the
/// unperturbed parameters' `(a, b)` replaced by the actual translation.
pub fn certify_curve(ifs: &IFS2, p: &CurveFamilyParams, cloud_points: usize, seed: u64) -> Result<Certificate> {
    let positivity = ifs.check_positivity();
    let separation = separated(ifs);
    let t = ifs.maps().get(1).map_or(Vec2::default(), |m| m.translation);
    let family_condition = check_conds(&CurveFamilyParams { a: t.x, b: t.y, ..*p }).pass;
    let js_gap = if positivity {
        let (frame, hull) = invariant_frame(ifs)?;
        let cloud = chaos_game(&frame, &MeasureWeights::uniform(ifs.len()), cloud_points, seed)?;
        check_J_S_disjoint(&frame, &cloud, &hull).ok().map(|r| r.gap)
    } else {
        None
    };
    let js = js_gap.is_some_and(|g| g > 0.0);
    Ok(Certificate {
        positivity,
        separation,
        family_condition,
        js_gap,
        pass: positivity && separation && family_condition && js,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    Grid(GridFamilyParams),
    Curve(CurveFamilyParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalReport {
    pub delta: f64,
    pub trials: usize,
    /// Perturbed systems that were still contractions.
    pub valid: usize,
    pub positivity: usize,
    pub separation: usize,
    pub family_condition: usize,
    pub all: usize,
}

/// Perturbs the family's system `trials` times (trial `t` uses seed `seed + t`)
/// and counts how many keep each certificate.
pub fn perturbation_survival(family: &Family, delta: f64, trials: usize, seed: u64) -> Result<SurvivalReport> {
    let base = match family {
        Family::Grid(p) => super::grid_ifs(p)?,
        Family::Curve(p) => super::curve_ifs(p)?,
    };
    let certs: Vec<Option<Certificate>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t as u64);
            let Ok(ifs) = perturb_ifs(&base, delta, s) else {
                return Ok(None);
            };
            match family {
                Family::Grid(p) => certify_grid(&ifs, p.n).map(Some),
                Family::Curve(p) => certify_curve(&ifs, p, 20_000, s).map(Some),
            }
        })
        .collect::<Result<_>>()?;
    let count = |f: fn(&Certificate) -> bool| certs.iter().flatten().filter(|c| f(c)).count();
    Ok(SurvivalReport {
        delta,
        trials,
        valid: certs.iter().flatten().count(),
        positivity: count(|c| c.positivity),
        separation: count(|c| c.separation),
        family_condition: count(|c| c.family_condition),
        all: count(|c| c.pass),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{curve_ifs, grid_ifs};
    use std::f64::consts::PI;

    #[test]
    fn zero_delta_is_identity() {
        let ifs = curve_ifs(&CurveFamilyParams::default()).unwrap();
        let p = perturb_ifs(&ifs, 0.0, 9).unwrap();
        assert_eq!(p.maps(), ifs.maps());
        assert!(perturb_ifs(&ifs, -1.0, 9).is_err());
    }

    #[test]
    fn perturbation_is_bounded_and_seeded() {
        let ifs = curve_ifs(&CurveFamilyParams::default()).unwrap();
        let a = perturb_ifs(&ifs, 1e-3, 5).unwrap();
        let b = perturb_ifs(&ifs, 1e-3, 5).unwrap();
        assert_eq!(a.maps(), b.maps());
        for (s, t) in ifs.maps().iter().zip(a.maps()) {
            let d = s.linear.entries().into_iter().zip(t.linear.entries()).map(|(x, y)| (x - y).abs());
            assert!(d.fold(0.0, f64::max) <= 1e-3);
        }
    }

    fn two_cell_system(p: &GridFamilyParams) -> IFS2 {
        let k = 1.0 / p.n as f64;
        IFS2::new(vec![
            AffineMap2::new(p.a1().scale(k), Vec2::default()),
            AffineMap2::new(p.a2().scale(k), Vec2::new(0.5, 0.5)),
        ])
        .unwrap()
    }

    #[test]
    fn wide_cone_condition_threshold() {
        let p = GridFamilyParams::new(0.001, 0.782, 0.78, 2);
        let n = crate::constructions::find_min_N(&p, 1_000_000, crate::constructions::SnSource::ClosedForm)
            .unwrap()
            .unwrap();
        let at = certify_grid(&two_cell_system(&p.with_n(n)), n).unwrap();
        assert!(at.pass, "{at:?}");
        let below = certify_grid(&two_cell_system(&p.with_n(n - 1)), n - 1).unwrap();
        assert!(below.positivity && below.separation && !below.family_condition);
    }

    #[test]
    fn curve_survives_small_noise_not_large() {
        let fam = Family::Curve(CurveFamilyParams::default());
        let small = perturbation_survival(&fam, 1e-4, 8, 1).unwrap();
        assert_eq!(small.all, 8, "{small:?}");
        let big = perturbation_survival(&fam, 0.5, 8, 1).unwrap();
        assert!(big.all < 8, "{big:?}");
    }

    #[test]
    fn grid_certificate_fails_below_threshold() {
        let p = GridFamilyParams::new(0.3, 1.0, PI / 8.0, 2);
        let c = certify_grid(&grid_ifs(&p).unwrap(), 2).unwrap();
        assert!(c.positivity && c.separation && !c.family_condition && !c.pass);
    }
}

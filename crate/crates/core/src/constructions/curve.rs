use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::{AffineMap2, PointCloud, Word, IFS2};
use crate::linalg2::{top_singular_value, Matrix2, Vec2};
use crate::projective::{angle_metric, check_J_S_disjoint, AngleInterval, Direction};
use crate::rng::stream_rng;

/// Two maps `Pᵢ·diag(λᵢ, μᵢ)·Pᵢ⁻¹` with `Pᵢ = [[1, −bᵢ], [cᵢ, 1]]`; the second
/// is translated by `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFamilyParams {
    pub b1: f64,
    pub c1: f64,
    pub b2: f64,
    pub c2: f64,
    pub lambda1: f64,
    pub mu1: f64,
    pub lambda2: f64,
    pub mu2: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for CurveFamilyParams {
    fn default() -> Self {
        CurveFamilyParams {
            b1: 0.1,
            c1: 0.1,
            b2: 0.1,
            c2: 0.1,
            lambda1: 0.05,
            mu1: 0.02,
            lambda2: 0.05,
            mu2: 0.02,
            a: 0.5,
            b: 0.5,
        }
    }
}

impl CurveFamilyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("b1", self.b1), ("c1", self.c1), ("b2", self.b2), ("c2", self.c2)] {
            if !(v >= 0.0) {
                return Err(Error::invalid(format!("{name} = {v} must be non-negative")));
            }
        }
        for (i, l, m) in [(1, self.lambda1, self.mu1), (2, self.lambda2, self.mu2)] {
            if !(l > m && m > 0.0) {
                return Err(Error::invalid(format!(
                    "need λ{i} > μ{i} > 0, got λ{i} = {l}, μ{i} = {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn p1(&self) -> Matrix2 {
        Matrix2::new(1.0, -self.b1, self.c1, 1.0)
    }

    pub fn p2(&self) -> Matrix2 {
        Matrix2::new(1.0, -self.b2, self.c2, 1.0)
    }
}

fn conjugated(p: Matrix2, l: f64, m: f64) -> Result<Matrix2> {
    Ok(p * Matrix2::diag(l, m) * p.inverse()?)
}

pub fn curve_ifs(p: &CurveFamilyParams) -> Result<IFS2> {
    p.validate()?;
    let l1 = conjugated(p.p1(), p.lambda1, p.mu1)?;
    let l2 = conjugated(p.p2(), p.lambda2, p.mu2)?;
    let ifs = IFS2::new(vec![
        AffineMap2::new(l1, Vec2::default()),
        AffineMap2::new(l2, Vec2::new(p.a, p.b)),
    ])?;
    ifs.require_positive()?;
    for (index, t) in ifs.maps().iter().enumerate() {
        if t.linear.det() <= 0.0 {
            return Err(Error::Precondition(format!("map {index} reverses orientation")));
        }
    }
    Ok(ifs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CondsReport {
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

/// Window `(λ₁(1+max{b₁,c₁})², 1 − λ₂(1+max{b₂,c₂})²)` that both translation
/// coordinates must lie in.
pub fn check_conds(p: &CurveFamilyParams) -> CondsReport {
    let lo = p.lambda1 * (1.0 + p.b1.max(p.c1)).powi(2);
    let hi = 1.0 - p.lambda2 * (1.0 + p.b2.max(p.c2)).powi(2);
    CondsReport {
        lo,
        hi,
        pass: lo < p.a && p.a < hi && lo < p.b && p.b < hi,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub j: AngleInterval,
    /// Smallest angular distance from a sampled difference direction to `J`.
    pub min_distance_to_j: f64,
    /// Largest slope of a sampled chord over the axis perpendicular to the
    /// midpoint of `J`.
    pub lipschitz_constant: f64,
    pub pairs: usize,
    pub pass: bool,
}

/// Samples chords of the cloud and checks that none points into `J`, so the
/// set is a Lipschitz graph over the axis perpendicular to `J`'s midpoint.
pub fn lipschitz_graph_check(
    ifs: &IFS2,
    cloud: &PointCloud,
    hull: &ConvexPolygon,
    pairs: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    let js = check_J_S_disjoint(ifs, cloud, hull)?;
    if !js.pass {
        return Err(Error::Precondition("J and S are not disjoint".into()));
    }
    lipschitz_graph_check_in(&js.j, cloud, pairs, seed)
}

pub fn lipschitz_graph_check_in(
    j: &AngleInterval,
    cloud: &PointCloud,
    pairs: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let v = j.midpoint();
    let mut rng = stream_rng(seed, 0);
    let mut min_dist = f64::INFINITY;
    let mut lip: f64 = 0.0;
    let mut used = 0;
    for _ in 0..pairs {
        let x = cloud.points[rng.gen_range(0..n)];
        let y = cloud.points[rng.gen_range(0..n)];
        let d = x - y;
        if d.norm() == 0.0 {
            continue;
        }
        used += 1;
        let dir = Direction::from_vector(d);
        min_dist = min_dist.min(j.distance_to(dir));
        let phi = angle_metric(dir, v);
        lip = lip.max(phi.cos() / phi.sin());
    }
    if used == 0 {
        return Err(Error::invalid("all sampled pairs coincide"));
    }
    Ok(LipschitzReport {
        j: *j,
        min_distance_to_j: min_dist,
        lipschitz_constant: lip,
        pairs: used,
        pass: min_dist > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistalLevel {
    pub n: usize,
    /// Smallest `|A_w(x − y)| / α₁(A_w)` seen at this length.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistalReport {
    pub levels: Vec<DistalLevel>,
    /// Constant at the shortest length.
    pub b_ref: f64,
    /// Smallest `b(n)/b_ref`.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Requires `J ∩ S = ∅`, then runs [`distal_constants`].
pub fn distal_check(
    ifs: &IFS2,
    cloud: &PointCloud,
    hull: &ConvexPolygon,
    n_range: RangeInclusive<usize>,
    words_per_n: usize,
    pairs_per_word: usize,
    seed: u64,
) -> Result<DistalReport> {
    let js = check_J_S_disjoint(ifs, cloud, hull)?;
    if !js.pass {
        return Err(Error::Precondition("J and S are not disjoint".into()));
    }
    distal_constants(ifs, cloud, n_range, words_per_n, pairs_per_word, seed)
}

/// For random words `w` of each length and random pairs `x, y` from distinct
/// first-level components, the ratio `|T_w x − T_w y| / α₁(w)`; passes when
/// its minimum never falls below half the value at the shortest length.
pub fn distal_constants(
    ifs: &IFS2,
    cloud: &PointCloud,
    n_range: RangeInclusive<usize>,
    words_per_n: usize,
    pairs_per_word: usize,
    seed: u64,
) -> Result<DistalReport> {
    let labels = cloud.labels.as_ref().ok_or(Error::SingleLabel)?;
    let mut groups: Vec<Vec<Vec2>> = vec![Vec::new(); ifs.len()];
    for (p, &l) in cloud.points.iter().zip(labels) {
        groups
            .get_mut(l)
            .ok_or(Error::LetterOutOfRange {
                letter: l,
                alphabet: ifs.len(),
            })?
            .push(*p);
    }
    let nonempty: Vec<usize> = (0..groups.len()).filter(|&i| !groups[i].is_empty()).collect();
    if nonempty.len() < 2 {
        return Err(Error::SingleLabel);
    }
    if n_range.is_empty() || words_per_n == 0 || pairs_per_word == 0 {
        return Err(Error::invalid("empty sampling range"));
    }
    let m = ifs.len();
    let mut levels = Vec::new();
    for n in n_range {
        let mut rng = stream_rng(seed, n as u64);
        let mut b = f64::INFINITY;
        for _ in 0..words_per_n {
            let w = Word::new((0..n).map(|_| rng.gen_range(0..m)).collect());
            let a = ifs.compose(&w)?.linear;
            let a1 = top_singular_value(&a);
            for _ in 0..pairs_per_word {
                let i = rng.gen_range(0..nonempty.len());
                let mut j = rng.gen_range(0..nonempty.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (gi, gj) = (nonempty[i], nonempty[j]);
                let x = groups[gi][rng.gen_range(0..groups[gi].len())];
                let y = groups[gj][rng.gen_range(0..groups[gj].len())];
                b = b.min(a.apply(x - y).norm() / a1);
            }
        }
        levels.push(DistalLevel { n, b });
    }
    let b_ref = levels[0].b;
    let worst_ratio = levels.iter().map(|l| l.b / b_ref).fold(f64::INFINITY, f64::min);
    Ok(DistalReport {
        levels,
        b_ref,
        worst_ratio,
        pass: b_ref > 0.0 && worst_ratio >= 0.5,
    })
}

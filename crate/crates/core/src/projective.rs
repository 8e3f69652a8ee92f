//! Projective dynamics on RP¹: induced maps, angle metric, the invariant arc
//! `J` and the directions spanned by separated components.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

use crate::dimension::measure::{MeasureWeights, WordSampler};
use crate::error::{Error, Result};
use crate::ifs::polygon::ConvexPolygon;
use crate::ifs::{PointCloud, Word, IFS2};
use crate::linalg2::{Matrix2, Vec2};
use crate::rng::stream_rng;

/// A line through the origin, stored as an angle in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Direction(f64);

impl Direction {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        Direction(a)
    }

    pub fn from_vector(v: Vec2) -> Self {
        Direction::new(v.y.atan2(v.x))
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn unit(self) -> Vec2 {
        Vec2::from_angle(self.0)
    }

    /// Unit normal `(sin θ, −cos θ)`; projecting along `θ` is the dot product with it.
    pub fn normal(self) -> Vec2 {
        Vec2::new(self.0.sin(), -self.0.cos())
    }
}

pub fn angle_metric(t1: Direction, t2: Direction) -> f64 {
    let d = (t1.0 - t2.0).abs();
    d.min(PI - d)
}

/// Closed arc of RP¹ starting at `start` and sweeping counter-clockwise by
/// `width ∈ [0, π)`. Arcs may wrap through angle 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleInterval {
    start: Direction,
    width: f64,
}

impl AngleInterval {
    pub fn new(start: Direction, width: f64) -> Result<Self> {
        if !(0.0..PI).contains(&width) {
            return Err(Error::invalid(format!("arc width {width} outside [0, π)")));
        }
        Ok(AngleInterval { start, width })
    }

    /// Arc `[lo, hi]` for raw angles `lo ≤ hi < lo + π`.
    pub fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        AngleInterval::new(Direction::new(lo), hi - lo)
    }

    /// The negative quadrant `[π/2, π]`.
    pub fn q2() -> Self {
        AngleInterval {
            start: Direction(FRAC_PI_2),
            width: FRAC_PI_2,
        }
    }

    /// The first quadrant `[0, π/2]`.
    pub fn q1() -> Self {
        AngleInterval {
            start: Direction(0.0),
            width: FRAC_PI_2,
        }
    }

    pub fn lo(&self) -> Direction {
        self.start
    }

    pub fn hi(&self) -> Direction {
        Direction::new(self.start.0 + self.width)
    }

    /// Unreduced upper end `lo + width`, which may reach past π.
    pub fn hi_angle(&self) -> f64 {
        self.start.0 + self.width
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn midpoint(&self) -> Direction {
        Direction::new(self.start.0 + 0.5 * self.width)
    }

    fn offset(&self, d: Direction) -> f64 {
        (d.0 - self.start.0).rem_euclid(PI)
    }

    pub fn contains(&self, d: Direction) -> bool {
        self.offset(d) <= self.width
    }

    /// Membership with an absolute angular tolerance at both ends.
    pub fn contains_tol(&self, d: Direction, tol: f64) -> bool {
        let o = self.offset(d);
        o <= self.width + tol || o >= PI - tol
    }

    pub fn contains_interval(&self, other: &AngleInterval) -> bool {
        self.contains(other.start) && self.offset(other.start) + other.width <= self.width
    }

    pub fn intersects(&self, other: &AngleInterval) -> bool {
        self.contains(other.start) || other.contains(self.start)
    }

    /// Angular gap between two arcs; 0 when they meet.
    pub fn distance(&self, other: &AngleInterval) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        let a = (other.start.0 - self.hi_angle()).rem_euclid(PI);
        let b = (self.start.0 - other.hi_angle()).rem_euclid(PI);
        a.min(b)
    }

    /// Distance from a direction to the arc.
    pub fn distance_to(&self, d: Direction) -> f64 {
        self.distance(&AngleInterval {
            start: d,
            width: 0.0,
        })
    }

    /// Smallest arc containing every listed direction; `None` if they leave no gap.
    pub fn hull_of_angles(angles: &[f64]) -> Option<Self> {
        let arcs: Vec<(f64, f64)> = angles.iter().map(|&a| (a, 0.0)).collect();
        hull_of_arcs(&arcs)
    }

    /// Smallest arc containing all the given arcs; `None` if their union wraps.
    pub fn hull(arcs: &[AngleInterval]) -> Option<Self> {
        let raw: Vec<(f64, f64)> = arcs.iter().map(|a| (a.start.0, a.width)).collect();
        hull_of_arcs(&raw)
    }
}

/// Smallest arc of the circle `R/πZ` containing the arcs `(start, width)`:
/// complement of the largest gap left by their union.
fn hull_of_arcs(arcs: &[(f64, f64)]) -> Option<AngleInterval> {
    if arcs.is_empty() {
        return None;
    }
    let mut segs: Vec<(f64, f64)> = arcs
        .iter()
        .map(|&(s, w)| {
            let s = Direction::new(s).0;
            (s, s + w)
        })
        .collect();
    segs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in segs {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    // fold segments covered by the wrap-around tail of the last one
    while merged.len() > 1 {
        let last_end = merged[merged.len() - 1].1;
        if last_end - PI >= merged[0].0 {
            let first = merged.remove(0);
            let last = merged.last_mut().unwrap();
            last.1 = last.1.max(first.1 + PI);
        } else {
            break;
        }
    }
    if merged.len() == 1 {
        let (s, e) = merged[0];
        return AngleInterval::new(Direction::new(s), e - s).ok();
    }
    let k = merged.len();
    let mut best_gap = -1.0;
    let mut best_next = 0;
    for i in 0..k {
        let next = (i + 1) % k;
        let gap = if next == 0 {
            merged[0].0 + PI - merged[i].1
        } else {
            merged[next].0 - merged[i].1
        };
        if gap > best_gap {
            best_gap = gap;
            best_next = next;
        }
    }
    if best_gap <= 0.0 {
        return None;
    }
    AngleInterval::new(Direction::new(merged[best_next].0), PI - best_gap).ok()
}

/// Projective action of `M⁻¹`. The adjugate gives the same line and needs no division.
pub fn phi_matrix(m: &Matrix2, theta: Direction) -> Result<Direction> {
    let det = m.det();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(Direction::from_vector(m.adjugate() * theta.unit()))
}

pub fn phi(ifs: &IFS2, i: usize, theta: Direction) -> Result<Direction> {
    phi_matrix(&ifs.map(i)?.linear, theta)
}

/// `φ_{aₙ} ∘ … ∘ φ_{a₁}`: the first letter acts first.
pub fn phi_word(ifs: &IFS2, w: &Word, theta: Direction) -> Result<Direction> {
    w.letters()
        .iter()
        .try_fold(theta, |t, &i| phi(ifs, i, t))
}

/// Image of an arc under the projective action of `M⁻¹`.
pub fn phi_matrix_arc(m: &Matrix2, arc: &AngleInterval) -> Result<AngleInterval> {
    let a = phi_matrix(m, arc.lo())?;
    let b = phi_matrix(m, Direction::new(arc.hi_angle()))?;
    let mid = phi_matrix(m, arc.midpoint())?;
    let forward = AngleInterval::new(a, (b.0 - a.0).rem_euclid(PI))?;
    if forward.contains(mid) {
        Ok(forward)
    } else {
        AngleInterval::new(b, (a.0 - b.0).rem_euclid(PI))
    }
}

pub fn phi_arc(ifs: &IFS2, i: usize, arc: &AngleInterval) -> Result<AngleInterval> {
    phi_matrix_arc(&ifs.map(i)?.linear, arc)
}

/// Smallest arc containing every `φᵢ(Q₂)`.
pub fn invariant_interval_J(ifs: &IFS2) -> Result<AngleInterval> {
    ifs.require_positive()?;
    let q2 = AngleInterval::q2();
    let arcs = (0..ifs.len())
        .map(|i| phi_arc(ifs, i, &q2))
        .collect::<Result<Vec<_>>>()?;
    AngleInterval::hull(&arcs).ok_or_else(|| Error::Precondition("φ-images cover RP¹".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionSample {
    pub angles: Vec<Direction>,
    pub burnin: usize,
    pub count: usize,
    pub seed: u64,
}

impl DirectionSample {
    /// Counts over 256 equal bins on `[π/2, π]`; angle 0 is counted as π.
    pub fn histogram(&self) -> Vec<usize> {
        const BINS: usize = 256;
        let mut h = vec![0; BINS];
        for d in &self.angles {
            let a = if d.0 < FRAC_PI_2 { d.0 + PI } else { d.0 };
            let t = (a - FRAC_PI_2) / FRAC_PI_2;
            if (0.0..=1.0).contains(&t) {
                h[((t * BINS as f64) as usize).min(BINS - 1)] += 1;
            }
        }
        h
    }
}

/// Markov chain `θ ↦ φ_a(θ)` from `3π/4` with letters drawn from `weights`.
/// Gibbs weights advance by whole blocks.
pub fn furstenberg_sample(
    ifs: &IFS2,
    weights: &MeasureWeights,
    burnin: usize,
    count: usize,
    seed: u64,
) -> Result<DirectionSample> {
    let sampler = WordSampler::new(ifs, weights)?;
    let mut rng = stream_rng(seed, 0);
    let mut theta = Direction(3.0 * PI / 4.0);
    let mut block = Vec::new();
    let mut angles = Vec::with_capacity(count);
    for k in 0..burnin + count {
        sampler.sample_block(&mut rng, &mut block);
        for &a in &block {
            theta = phi(ifs, a, theta)?;
        }
        if k >= burnin {
            angles.push(theta);
        }
    }
    Ok(DirectionSample {
        angles,
        burnin,
        count,
        seed,
    })
}

/// Lower bound `(τ⁺ − τ⁻)/8` on the contraction ratio of the cone matrix's
/// projective action on `Q₂`.
pub fn contraction_ratio_bound(tau_minus: f64, tau_plus: f64) -> Result<f64> {
    if !(0.0 < tau_minus && tau_minus < tau_plus && tau_plus < FRAC_PI_2) {
        return Err(Error::invalid(format!(
            "need 0 < τ⁻ < τ⁺ < π/2, got ({tau_minus}, {tau_plus})"
        )));
    }
    Ok((tau_plus - tau_minus) / 8.0)
}

/// Minimum over random pairs in `Q₂` of `d(φθ₁, φθ₂)/d(θ₁, θ₂)`.
pub fn empirical_contraction_ratio(m: &Matrix2, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut min = f64::INFINITY;
    for _ in 0..pairs {
        let t1 = Direction::new(rng.gen_range(FRAC_PI_2..PI));
        let t2 = Direction::new(rng.gen_range(FRAC_PI_2..PI));
        let d = angle_metric(t1, t2);
        if d == 0.0 {
            continue;
        }
        let r = angle_metric(phi_matrix(m, t1)?, phi_matrix(m, t2)?) / d;
        min = min.min(r);
    }
    Ok(min)
}

/// Directions of `x − y` over points in distinct first-level pieces.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationDirections {
    /// Hull of the sampled difference directions.
    pub inner: AngleInterval,
    /// Angular slack from the cloud's covering radius, when it could be bounded.
    pub slack: Option<f64>,
    /// Inner hull widened by `slack` on both sides.
    pub inner_widened: Option<AngleInterval>,
    /// Hull of difference directions of the depth-1 hull images; `None` when
    /// those images meet and every direction is possible.
    pub outer: Option<AngleInterval>,
}

/// Arc of RP¹ spanned by differences `a − b`, `a ∈ conv(A)`, `b ∈ conv(B)`.
/// `None` when the two hulls touch, since the differences then surround 0.
fn difference_arc(a: &[Vec2], b: &[Vec2]) -> Option<AngleInterval> {
    let mut angles: Vec<f64> = Vec::with_capacity(a.len() * b.len());
    for &p in a {
        for &q in b {
            let d = p - q;
            if d.norm() == 0.0 {
                return None;
            }
            angles.push(d.y.atan2(d.x).rem_euclid(2.0 * PI));
        }
    }
    angles.sort_by(f64::total_cmp);
    let mut best_gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let mut start = angles[0];
    for w in angles.windows(2) {
        let gap = w[1] - w[0];
        if gap > best_gap {
            best_gap = gap;
            start = w[1];
        }
    }
    let width = 2.0 * PI - best_gap;
    if width >= PI {
        return None;
    }
    AngleInterval::new(Direction::new(start), width).ok()
}

fn pairwise_arc(groups: &[Vec<Vec2>]) -> Option<AngleInterval> {
    let mut arcs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            if groups[i].is_empty() || groups[j].is_empty() {
                continue;
            }
            arcs.push(difference_arc(&groups[i], &groups[j])?);
        }
    }
    AngleInterval::hull(&arcs)
}

/// Inner (cloud-based) and outer (hull-image-based) approximations of the
/// separation direction set.
pub fn separation_directions_S(
    ifs: &IFS2,
    cloud: &PointCloud,
    hull: &ConvexPolygon,
) -> Result<SeparationDirections> {
    let labels = cloud.labels.as_ref().ok_or(Error::SingleLabel)?;
    let m = ifs.len();
    let mut groups: Vec<Vec<Vec2>> = vec![Vec::new(); m];
    for (p, &l) in cloud.points.iter().zip(labels) {
        if l >= m {
            return Err(Error::LetterOutOfRange {
                letter: l,
                alphabet: m,
            });
        }
        groups[l].push(*p);
    }
    if groups.iter().filter(|g| !g.is_empty()).count() < 2 {
        return Err(Error::SingleLabel);
    }
    let hulls: Vec<Vec<Vec2>> = groups
        .iter()
        .map(|g| ConvexPolygon::hull_of(g).vertices().to_vec())
        .collect();
    let inner = pairwise_arc(&hulls)
        .ok_or_else(|| Error::Precondition("sampled pieces are not separated".into()))?;

    let images: Vec<Vec<Vec2>> = ifs
        .maps()
        .iter()
        .map(|t| hull.transformed(t).vertices().to_vec())
        .collect();
    let outer = pairwise_arc(&images);

    let slack = crate::ifs::cloud_covering_radius(ifs, cloud, hull, 4096).and_then(|r| {
        let d = crate::ifs::min_cross_distance(&hulls)?;
        (d > 2.0 * r).then(|| (2.0 * r / d).asin())
    });
    let inner_widened = slack.and_then(|s| {
        AngleInterval::new(Direction::new(inner.lo().0 - s), inner.width() + 2.0 * s).ok()
    });
    Ok(SeparationDirections {
        inner,
        slack,
        inner_widened,
        outer,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct JsReport {
    pub j: AngleInterval,
    pub s_outer: Option<AngleInterval>,
    pub gap: f64,
    pub pass: bool,
}

pub fn check_J_S_disjoint(
    ifs: &IFS2,
    cloud: &PointCloud,
    hull: &ConvexPolygon,
) -> Result<JsReport> {
    let j = invariant_interval_J(ifs)?;
    let s = separation_directions_S(ifs, cloud, hull)?;
    let gap = s.outer.map_or(0.0, |o| j.distance(&o));
    Ok(JsReport {
        j,
        s_outer: s.outer,
        gap,
        pass: gap > 0.0,
    })
}

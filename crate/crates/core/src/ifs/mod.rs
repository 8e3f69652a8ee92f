//! Affine iterated function systems: maps, words, point clouds and
//! separation checks.

pub mod polygon;
pub mod projection;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::measure::{MeasureWeights, WordSampler};
use crate::dimension::stopping::StoppingSet;
use crate::error::{Error, Result};
use crate::linalg2::{singular_values, Matrix2, Vec2};
use crate::rng::{stream_rng, streams};
use polygon::ConvexPolygon;
pub use projection::{
    f_theta, hausdorff_1d, project_point, project_points, self_similarity_defect, Affine1D,
};

pub const BURN_IN: usize = 100;

/// `x ↦ A x + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap2 {
    pub linear: Matrix2,
    pub translation: Vec2,
}

impl AffineMap2 {
    pub const IDENTITY: AffineMap2 = AffineMap2 {
        linear: Matrix2::IDENTITY,
        translation: Vec2::new(0.0, 0.0),
    };

    pub fn new(linear: Matrix2, translation: Vec2) -> Self {
        AffineMap2 {
            linear,
            translation,
        }
    }

    pub fn apply(&self, x: Vec2) -> Vec2 {
        self.linear * x + self.translation
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            linear: self.linear * inner.linear,
            translation: self.apply(inner.translation),
        }
    }

    pub fn inverse(&self) -> Result<AffineMap2> {
        let inv = self.linear.inverse()?;
        Ok(AffineMap2 {
            linear: inv,
            translation: -(inv * self.translation),
        })
    }

    /// Solution of `(I − A) x = d`.
    pub fn fixed_point(&self) -> Result<Vec2> {
        let i_minus_a = Matrix2::new(
            1.0 - self.linear.a11,
            -self.linear.a12,
            -self.linear.a21,
            1.0 - self.linear.a22,
        );
        Ok(i_minus_a.inverse()? * self.translation)
    }
}

/// Word over the alphabet `0..m`; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn repeat(letter: usize, n: usize) -> Self {
        Word(vec![letter; n])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn extended(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// The word with its first `n` letters removed.
    pub fn shift(&self, n: usize) -> Word {
        Word(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PointCloud {
    pub points: Vec<Vec2>,
    /// First letter of the code of each point, when known.
    pub labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec2>) -> Self {
        PointCloud {
            points,
            labels: None,
        }
    }

    pub fn labeled(points: Vec<Vec2>, labels: Vec<usize>) -> Self {
        PointCloud {
            points,
            labels: Some(labels),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mapped(&self, t: &AffineMap2) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|&p| t.apply(p)).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Convex set assumed to contain the attractor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hull {
    #[default]
    UnitSquare,
    UnitDisc,
}

impl Hull {
    pub fn polygon(self) -> ConvexPolygon {
        match self {
            Hull::UnitSquare => ConvexPolygon::unit_square(),
            Hull::UnitDisc => ConvexPolygon::unit_disc(128),
        }
    }
}

/// Change of frame `y = (x − center) / radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscRescaling {
    pub center: Vec2,
    pub radius: f64,
}

impl DiscRescaling {
    pub fn to_disc(&self, x: Vec2) -> Vec2 {
        (x - self.center) * (1.0 / self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IFS2 {
    maps: Vec<AffineMap2>,
    labels: Option<Vec<String>>,
}

impl IFS2 {
    /// Requires at least one map and `α₁ < 1` for every linear part.
    pub fn new(maps: Vec<AffineMap2>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::invalid("an IFS needs at least one map"));
        }
        for (index, t) in maps.iter().enumerate() {
            let alpha1 = singular_values(&t.linear)?.alpha1;
            if !(alpha1 < 1.0) || !t.translation.is_finite() {
                return Err(Error::NotContraction { index, alpha1 });
            }
        }
        Ok(IFS2 { maps, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.maps.len() {
            return Err(Error::invalid("label count differs from map count"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap2] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> Result<&AffineMap2> {
        self.maps.get(i).ok_or(Error::LetterOutOfRange {
            letter: i,
            alphabet: self.maps.len(),
        })
    }

    /// `T_{a₁} ∘ T_{a₂} ∘ … ∘ T_{aₙ}`.
    pub fn compose(&self, w: &Word) -> Result<AffineMap2> {
        let mut acc = AffineMap2::IDENTITY;
        for &l in w.letters() {
            acc = acc.compose(self.map(l)?);
        }
        Ok(acc)
    }

    pub fn code_to_point(&self, w: &Word, seed: Vec2) -> Result<Vec2> {
        if w.is_empty() {
            return Err(Error::invalid("code_to_point needs a non-empty word"));
        }
        Ok(self.compose(w)?.apply(seed))
    }

    pub fn check_positivity(&self) -> bool {
        self.first_nonpositive().is_none()
    }

    fn first_nonpositive(&self) -> Option<Error> {
        const NAMES: [&str; 4] = ["a11", "a12", "a21", "a22"];
        for (index, t) in self.maps.iter().enumerate() {
            for (k, v) in t.linear.entries().into_iter().enumerate() {
                if !(v > 0.0) {
                    return Some(Error::NotPositive {
                        index,
                        entry: NAMES[k],
                        value: v,
                    });
                }
            }
        }
        None
    }

    pub fn require_positive(&self) -> Result<()> {
        match self.first_nonpositive() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// The same system in coordinates `y = (x − center)/radius`.
    pub fn conjugate(&self, center: Vec2, radius: f64) -> IFS2 {
        let maps = self
            .maps
            .iter()
            .map(|t| AffineMap2 {
                linear: t.linear,
                translation: (t.apply(center) - center) * (1.0 / radius),
            })
            .collect();
        IFS2 {
            maps,
            labels: self.labels.clone(),
        }
    }

    /// Conjugate into a frame where the unit disc is invariant: centre at the
    /// mean fixed point, radius `max |Tᵢc − c|/(1 − α₁ᵢ)` with 1% headroom.
    pub fn fit_disc(&self) -> Result<(IFS2, DiscRescaling)> {
        let mut c = Vec2::default();
        for t in &self.maps {
            c = c + t.fixed_point()?;
        }
        c = c * (1.0 / self.maps.len() as f64);
        let mut r: f64 = 0.0;
        for t in &self.maps {
            let a1 = singular_values(&t.linear)?.alpha1;
            r = r.max((t.apply(c) - c).norm() / (1.0 - a1));
        }
        let radius = if r > 0.0 { 1.01 * r } else { 1.0 };
        let resc = DiscRescaling { center: c, radius };
        Ok((self.conjugate(c, radius), resc))
    }

    /// Indices grouped by bit-identical linear part, in order of first appearance.
    pub fn linear_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, t) in self.maps.iter().enumerate() {
            match classes
                .iter_mut()
                .find(|c| self.maps[c[0]].linear == t.linear)
            {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        classes
    }

    /// All words of length `n`, lexicographic.
    pub fn words(&self, n: usize, budget: usize) -> Result<Vec<Word>> {
        let total = (self.len() as u128).pow(n as u32);
        if total > budget as u128 {
            return Err(Error::BudgetExceeded {
                needed: total,
                budget,
            });
        }
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|w| (0..self.len()).map(move |i| w.extended(i)))
                .collect();
        }
        Ok(out)
    }
}

/// Random iteration with `weights`; every stream of `STREAM_LEN` points runs its
/// own burn-in from the origin. Labels are the last map applied.
pub fn chaos_game(
    ifs: &IFS2,
    weights: &MeasureWeights,
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::invalid("chaos game needs count ≥ 1"));
    }
    let sampler = WordSampler::new(ifs, weights)?;
    let chunks: Vec<(Vec<Vec2>, Vec<usize>)> = streams(count)
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = stream_rng(seed, k);
            let mut x = Vec2::default();
            let mut block = Vec::new();
            let mut pts = Vec::with_capacity(len);
            let mut labels = Vec::with_capacity(len);
            for step in 0..BURN_IN + len {
                sampler.sample_block(&mut rng, &mut block);
                for &a in block.iter().rev() {
                    x = ifs.maps[a].apply(x);
                }
                if step >= BURN_IN {
                    pts.push(x);
                    labels.push(block[0]);
                }
            }
            (pts, labels)
        })
        .collect();
    let mut points = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for (p, l) in chunks {
        points.extend(p);
        labels.extend(l);
    }
    Ok(PointCloud::labeled(points, labels))
}

/// One point `T_w(seed_point)` per word of the stopping set.
pub fn cylinder_cloud(ifs: &IFS2, stop: &StoppingSet, seed_point: Vec2) -> Result<PointCloud> {
    if stop.words.is_empty() {
        return Err(Error::EmptyStoppingSet);
    }
    let mut points = Vec::with_capacity(stop.words.len());
    let mut labels = Vec::with_capacity(stop.words.len());
    for w in &stop.words {
        points.push(ifs.code_to_point(w, seed_point)?);
        labels.push(w.first().unwrap_or(0));
    }
    Ok(PointCloud::labeled(points, labels))
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub pass: bool,
    pub min_gap: f64,
    /// Hull images met at the tested depth, so nothing is decided about the attractor.
    pub inconclusive: bool,
    pub depth: usize,
}

pub fn check_hull_invariant(ifs: &IFS2, hull: &ConvexPolygon) -> Result<()> {
    let scale = hull.diameter().max(1.0);
    for (index, t) in ifs.maps.iter().enumerate() {
        if !hull
            .transformed(t)
            .vertices()
            .iter()
            .all(|&v| hull.contains(v, 1e-12 * scale))
        {
            return Err(Error::HullNotInvariant { index });
        }
    }
    Ok(())
}

const SEPARATION_PIECE_BUDGET: usize = 1 << 22;

/// Disjointness of `T_w(hull)` for depth-`depth` words with distinct first
/// letters; disjoint pieces certify strong separation since the attractor lies
/// in their union. Pieces are swept in order of their left edge.
pub fn check_separation(
    ifs: &IFS2,
    hull: &ConvexPolygon,
    depth: usize,
) -> Result<SeparationReport> {
    check_hull_invariant(ifs, hull)?;
    let depth = depth.max(1);
    let pieces_n = (ifs.len() as u128).pow(depth as u32);
    if pieces_n > SEPARATION_PIECE_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            needed: pieces_n,
            budget: SEPARATION_PIECE_BUDGET,
        });
    }
    let words = ifs.words(depth, usize::MAX)?;
    let mut pieces: Vec<(usize, ConvexPolygon, (Vec2, Vec2))> = words
        .par_iter()
        .map(|w| {
            let p = hull.transformed(&ifs.compose(w)?);
            let b = p.bounds();
            Ok((w.letters()[0], p, b))
        })
        .collect::<Result<_>>()?;
    pieces.sort_by(|a, b| a.2 .0.x.total_cmp(&b.2 .0.x));
    let mut best = f64::INFINITY;
    for i in 0..pieces.len() {
        let (li, pi, bi) = &pieces[i];
        for (lj, pj, bj) in &pieces[i + 1..] {
            let dx = bj.0.x - bi.1.x;
            if dx >= best {
                break;
            }
            if li == lj {
                continue;
            }
            let dy = (bj.0.y - bi.1.y).max(bi.0.y - bj.1.y).max(0.0);
            if dx.max(0.0).hypot(dy) >= best {
                continue;
            }
            best = best.min(pi.distance(pj));
        }
    }
    let min_gap = if best.is_finite() { best } else { 0.0 };
    let pass = ifs.len() == 1 || min_gap > 0.0;
    Ok(SeparationReport {
        pass,
        min_gap: if pass { min_gap } else { 0.0 },
        inconclusive: !pass,
        depth,
    })
}

fn locate(ifs: &IFS2, images: &[ConvexPolygon], inverses: &[AffineMap2], mut x: Vec2, k: usize) -> Option<usize> {
    let m = ifs.len();
    let mut idx = 0usize;
    for _ in 0..k {
        let i = images.iter().position(|p| p.contains(x, 1e-9))?;
        idx = idx * m + i;
        x = inverses[i].apply(x);
    }
    Some(idx)
}

/// Upper bound on `sup_{y∈E} dist(y, cloud)`: the largest diameter of a level-k
/// hull image, valid once every level-k image holds a cloud point. `k` is the
/// deepest level with at most `max_cells` cylinders and 8 points per cylinder.
pub fn cloud_covering_radius(
    ifs: &IFS2,
    cloud: &PointCloud,
    hull: &ConvexPolygon,
    max_cells: usize,
) -> Option<f64> {
    let m = ifs.len();
    let cap = max_cells.min(cloud.len() / 8);
    let mut k = 0;
    while m.checked_pow(k as u32 + 1).is_some_and(|c| c <= cap) {
        k += 1;
        if m == 1 {
            break;
        }
    }
    if k == 0 {
        return None;
    }
    let images: Vec<ConvexPolygon> = ifs.maps.iter().map(|t| hull.transformed(t)).collect();
    let inverses: Vec<AffineMap2> = ifs.maps.iter().map(|t| t.inverse()).collect::<Result<_>>().ok()?;
    let cells = m.pow(k as u32);
    let hit: Vec<bool> = cloud
        .points
        .par_iter()
        .fold(
            || vec![false; cells],
            |mut acc, &p| {
                if let Some(i) = locate(ifs, &images, &inverses, p, k) {
                    acc[i] = true;
                }
                acc
            },
        )
        .reduce(
            || vec![false; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        );
    if !hit.iter().all(|&h| h) {
        return None;
    }
    let words = ifs.words(k, cells).ok()?;
    words
        .iter()
        .map(|w| ifs.compose(w).map(|t| hull.transformed(&t).diameter()))
        .collect::<Result<Vec<_>>>()
        .ok()
        .map(|d| d.into_iter().fold(0.0, f64::max))
}

/// Smallest distance between the convex hulls of distinct groups.
pub fn min_cross_distance(groups: &[Vec<Vec2>]) -> Option<f64> {
    let polys: Vec<ConvexPolygon> = groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| ConvexPolygon::hull_of(g))
        .collect();
    let mut best: Option<f64> = None;
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            let d = polys[i].distance(&polys[j]);
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

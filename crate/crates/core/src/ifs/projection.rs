use serde::Serialize;

use super::{PointCloud, IFS2};
use crate::error::{Error, Result};
use crate::linalg2::Vec2;
use crate::projective::{phi, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Affine1D {
    pub scale: f64,
    pub offset: f64,
}

impl Affine1D {
    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.offset
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &Affine1D) -> Affine1D {
        Affine1D {
            scale: self.scale * inner.scale,
            offset: self.scale * inner.offset + self.offset,
        }
    }
}

/// Projection along `θ` onto the diameter at angle `θ − π/2`.
pub fn project_point(x: Vec2, theta: Direction) -> f64 {
    x.dot(theta.normal())
}

pub fn project_points(cloud: &PointCloud, theta: Direction) -> Vec<f64> {
    let n = theta.normal();
    cloud.points.iter().map(|p| p.dot(n)).collect()
}

/// The 1D map `f` with `π_θ(Tᵢ x) = f(π_{φᵢ(θ)}(x))`, read off from the images
/// of the lines `π_{φᵢ(θ)} = 0` and `π_{φᵢ(θ)} = 1`.
pub fn f_theta(ifs: &IFS2, i: usize, theta: Direction) -> Result<Affine1D> {
    let t = ifs.map(i)?;
    let psi = phi(ifs, i, theta)?;
    let foot = psi.normal();
    let offset = project_point(t.apply(Vec2::default()), theta);
    let scale = project_point(t.apply(foot), theta) - offset;
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::Precondition(format!(
            "f_theta degenerates for map {i} at θ = {}",
            theta.angle()
        )));
    }
    Ok(Affine1D { scale, offset })
}

/// One-sided distance `sup_{a∈A} inf_{b∈B} |a − b|`; `b` must be sorted.
fn directed_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|&x| {
            let k = b.partition_point(|&y| y < x);
            let mut d = f64::INFINITY;
            if k < b.len() {
                d = d.min(b[k] - x);
            }
            if k > 0 {
                d = d.min(x - b[k - 1]);
            }
            d
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite subsets of the line.
pub fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    directed_hausdorff(&sa, &sb).max(directed_hausdorff(&sb, &sa))
}

/// Hausdorff distance between `π_θ(cloud)` and `⋃ᵢ f_{i,θ}(π_{φᵢ(θ)}(cloud))`.
pub fn self_similarity_defect(ifs: &IFS2, cloud: &PointCloud, theta: Direction) -> Result<f64> {
    let lhs = project_points(cloud, theta);
    let mut rhs = Vec::with_capacity(lhs.len() * ifs.len());
    for i in 0..ifs.len() {
        let f = f_theta(ifs, i, theta)?;
        let psi = phi(ifs, i, theta)?;
        rhs.extend(project_points(cloud, psi).into_iter().map(|t| f.apply(t)));
    }
    Ok(hausdorff_1d(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::AffineMap2;
    use crate::linalg2::Matrix2;
    use std::f64::consts::PI;

    #[test]
    fn projection_conventions() {
        let p = Vec2::new(0.3, 0.7);
        assert!((project_point(p, Direction::new(PI / 2.0)) - 0.3).abs() < 1e-15);
        assert!((project_point(p, Direction::new(0.0)) + 0.7).abs() < 1e-15);
        let cloud = PointCloud::new(vec![Vec2::default(), Vec2::new(0.3, 0.4)]);
        let v = project_points(&cloud, Direction::from_vector(Vec2::new(0.3, 0.4)));
        assert!((v[0] - v[1]).abs() < 1e-15);
    }

    #[test]
    fn similarity_scale_is_ratio() {
        let ifs = IFS2::new(vec![AffineMap2::new(
            Matrix2::IDENTITY.scale(0.4),
            Vec2::new(0.2, 0.1),
        )])
        .unwrap();
        for k in 1..20 {
            let f = f_theta(&ifs, 0, Direction::new(k as f64 * 0.15)).unwrap();
            assert!((f.scale - 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn f_theta_intertwines_projections() {
        let ifs = IFS2::new(vec![AffineMap2::new(
            Matrix2::new(0.3, 0.1, 0.15, 0.35),
            Vec2::new(0.2, 0.4),
        )])
        .unwrap();
        let theta = Direction::new(2.3);
        let f = f_theta(&ifs, 0, theta).unwrap();
        let psi = phi(&ifs, 0, theta).unwrap();
        for k in 0..50 {
            let x = Vec2::new((k as f64 * 0.37).sin(), (k as f64 * 0.91).cos());
            let lhs = project_point(ifs.maps()[0].apply(x), theta);
            let rhs = f.apply(project_point(x, psi));
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff_1d(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert!((hausdorff_1d(&[0.0, 1.0], &[0.0, 0.5]) - 0.5).abs() < 1e-15);
        assert!((hausdorff_1d(&[0.2], &[0.0, 1.0]) - 0.8).abs() < 1e-15);
    }
}

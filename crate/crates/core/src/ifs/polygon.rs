use std::f64::consts::PI;

use serde::Serialize;

use super::AffineMap2;
use crate::linalg2::Vec2;

/// Convex polygon with counter-clockwise vertices. One or two vertices
/// describe a point or a segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

impl ConvexPolygon {
    /// Takes vertices already in counter-clockwise convex position.
    pub fn from_ccw(vertices: Vec<Vec2>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn unit_square() -> Self {
        ConvexPolygon::from_ccw(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
    }

    /// Regular `n`-gon circumscribed about the unit disc.
    pub fn unit_disc(n: usize) -> Self {
        let r = 1.0 / (PI / n as f64).cos();
        ConvexPolygon::from_ccw(
            (0..n)
                .map(|k| Vec2::from_angle(2.0 * PI * k as f64 / n as f64) * r)
                .collect(),
        )
    }

    /// Convex hull (Andrew's monotone chain); collinear points are dropped.
    pub fn hull_of(points: &[Vec2]) -> Self {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() <= 2 {
            return ConvexPolygon { vertices: pts };
        }
        let mut lower: Vec<Vec2> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 {
                let n = lower.len();
                if (lower[n - 1] - lower[n - 2]).cross(p - lower[n - 2]) <= 0.0 {
                    lower.pop();
                } else {
                    break;
                }
            }
            lower.push(p);
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 {
                let n = upper.len();
                if (upper[n - 1] - upper[n - 2]).cross(p - upper[n - 2]) <= 0.0 {
                    upper.pop();
                } else {
                    break;
                }
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon { vertices: lower }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn transformed(&self, t: &AffineMap2) -> Self {
        let mut v: Vec<Vec2> = self.vertices.iter().map(|&p| t.apply(p)).collect();
        if t.linear.det() < 0.0 {
            v.reverse();
        }
        ConvexPolygon { vertices: v }
    }

    fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => (p - self.vertices[0]).norm() <= tol,
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]) <= tol,
            _ => self.edges().all(|(a, b)| {
                let e = b - a;
                e.cross(p - a) >= -tol * e.norm()
            }),
        }
    }

    fn project_onto(&self, axis: Vec2) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let d = v.dot(axis);
                (lo.min(d), hi.max(d))
            })
    }

    /// Separating-axis test; touching polygons count as intersecting.
    pub fn intersects(&self, other: &ConvexPolygon) -> bool {
        if self.vertices.len() < 3 || other.vertices.len() < 3 {
            return self.distance_raw(other) == 0.0;
        }
        for poly in [self, other] {
            for (a, b) in poly.edges() {
                let e = b - a;
                let axis = Vec2::new(-e.y, e.x);
                let (l1, h1) = self.project_onto(axis);
                let (l2, h2) = other.project_onto(axis);
                if h1 < l2 || h2 < l1 {
                    return false;
                }
            }
        }
        true
    }

    fn distance_raw(&self, other: &ConvexPolygon) -> f64 {
        let one_way = |p: &ConvexPolygon, q: &ConvexPolygon| {
            let mut best = f64::INFINITY;
            for &v in &p.vertices {
                if q.vertices.len() == 1 {
                    best = best.min((v - q.vertices[0]).norm());
                }
                for (a, b) in q.edges() {
                    best = best.min(point_segment_distance(v, a, b));
                }
            }
            best
        };
        one_way(self, other).min(one_way(other, self))
    }

    /// Euclidean distance between the two polygons; 0 if they meet.
    pub fn distance(&self, other: &ConvexPolygon) -> f64 {
        if self.intersects(other) {
            0.0
        } else {
            self.distance_raw(other)
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let (lx, hx) = self.project_onto(Vec2::new(1.0, 0.0));
        let (ly, hy) = self.project_onto(Vec2::new(0.0, 1.0));
        (Vec2::new(lx, ly), Vec2::new(hx, hy))
    }
}

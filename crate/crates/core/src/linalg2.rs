//! Closed-form 2×2 linear algebra.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Row-major 2×2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Matrix2::new(a, 0.0, 0.0, d)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    /// Matrix with the given columns.
    pub fn from_cols(c1: Vec2, c2: Vec2) -> Self {
        Matrix2::new(c1.x, c2.x, c1.y, c2.y)
    }

    pub fn col(&self, j: usize) -> Vec2 {
        match j {
            0 => Vec2::new(self.a11, self.a21),
            _ => Vec2::new(self.a12, self.a22),
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Matrix2 {
        Matrix2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Adjugate; equals `det · inverse` and stays defined for singular input.
    pub fn adjugate(&self) -> Matrix2 {
        Matrix2::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() || !self.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.adjugate().scale(1.0 / det))
    }

    pub fn scale(&self, k: f64) -> Matrix2 {
        Matrix2::new(self.a11 * k, self.a12 * k, self.a21 * k, self.a22 * k)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries().iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row-sum (∞-operator) norm.
    pub fn norm_inf(&self) -> f64 {
        (self.a11.abs() + self.a12.abs()).max(self.a21.abs() + self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.is_finite())
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a21 * v.x + self.a22 * v.y,
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Vec2> for Matrix2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.apply(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPair {
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomp {
    pub lambda1: f64,
    pub lambda2: f64,
    pub e1: Vec2,
    pub e2: Vec2,
}

/// Principal axes of the image ellipse `M(unit disc)`.
///
/// `major_dir`/`minor_dir` are directions in the image. `input_major` and
/// `input_minor` are the unit-disc directions that `M` sends onto them, so
/// `‖M·input_major‖ = α₁` and `‖M·input_minor‖ = α₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseAxes {
    pub major_dir: Direction,
    pub minor_dir: Direction,
    pub input_major: Direction,
    pub input_minor: Direction,
    pub alpha1: f64,
    pub alpha2: f64,
    pub degenerate: bool,
}

fn check_invertible(m: &Matrix2) -> Result<f64> {
    let det = m.det();
    if !m.is_finite() || det == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(det)
}

/// `α₁` alone; defined for singular matrices too.
pub fn top_singular_value(m: &Matrix2) -> f64 {
    let e = 0.5 * (m.a11 + m.a22);
    let f = 0.5 * (m.a11 - m.a22);
    let g = 0.5 * (m.a21 + m.a12);
    let h = 0.5 * (m.a21 - m.a12);
    e.hypot(h) + f.hypot(g)
}

/// Singular values through the rotation/reflection split
/// `M = [[E+F, G−H], [G+H, E−F]]`, for which `α₁ = hypot(E,H) + hypot(F,G)`.
pub fn singular_values(m: &Matrix2) -> Result<SingularPair> {
    let det = check_invertible(m)?;
    let alpha1 = top_singular_value(m);
    let alpha2 = det.abs() / alpha1;
    Ok(SingularPair {
        alpha1,
        alpha2: alpha2.min(alpha1),
    })
}

/// Eigenvector for eigenvalue `lambda`, taken from the larger row of `M − λI`.
fn eigenvector(m: &Matrix2, lambda: f64) -> Vec2 {
    let r1 = Vec2::new(m.a11 - lambda, m.a12);
    let r2 = Vec2::new(m.a21, m.a22 - lambda);
    let v = if r1.norm() >= r2.norm() {
        Vec2::new(m.a12, lambda - m.a11)
    } else {
        Vec2::new(lambda - m.a22, m.a21)
    };
    canonical_sign(v.normalized())
}

fn canonical_sign(v: Vec2) -> Vec2 {
    if v.x < 0.0 || (v.x == 0.0 && v.y < 0.0) {
        -v
    } else {
        v
    }
}

pub fn eigen_real(m: &Matrix2) -> Result<EigenDecomp> {
    if !m.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let tr = m.trace();
    let det = m.det();
    // (a11 − a22)² + 4 a12 a21 avoids the cancellation in tr² − 4 det.
    let diff = m.a11 - m.a22;
    let disc = diff * diff + 4.0 * m.a12 * m.a21;
    if disc < 0.0 {
        return Err(Error::ComplexEigenvalues);
    }
    let scale = m.max_abs();
    if disc.sqrt() <= 1e-14 * scale {
        if m.a12.abs() <= 1e-14 * scale && m.a21.abs() <= 1e-14 * scale {
            let lambda = 0.5 * tr;
            return Ok(EigenDecomp {
                lambda1: lambda,
                lambda2: lambda,
                e1: Vec2::new(1.0, 0.0),
                e2: Vec2::new(0.0, 1.0),
            });
        }
        return Err(Error::Defective);
    }
    let root = disc.sqrt();
    let big = if tr >= 0.0 {
        0.5 * (tr + root)
    } else {
        0.5 * (tr - root)
    };
    let small = if big != 0.0 { det / big } else { 0.0 };
    let (l1, l2) = if big.abs() >= small.abs() {
        (big, small)
    } else {
        (small, big)
    };
    Ok(EigenDecomp {
        lambda1: l1,
        lambda2: l2,
        e1: eigenvector(m, l1),
        e2: eigenvector(m, l2),
    })
}

/// Upper bound `4 / (1 − |e₁·e₂|²)` on the condition number of the
/// eigenvector matrix `[e₁ e₂]`.
pub fn condition_bound(e1: Vec2, e2: Vec2) -> Result<f64> {
    let dot = e1.dot(e2).abs();
    if !(dot < 1.0) {
        return Err(Error::ParallelEigenvectors { dot });
    }
    Ok(4.0 / (1.0 - dot * dot))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigSvReport {
    pub ratio_max: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn eigsv_check(m: &Matrix2, epsilon: f64) -> Result<EigSvReport> {
    let eig = eigen_real(m)?;
    if eig.lambda2 == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let dot = eig.e1.dot(eig.e2).abs();
    if dot >= 1.0 - epsilon {
        return Err(Error::ParallelEigenvectors { dot });
    }
    let sv = singular_values(m)?;
    let ratio = |a: f64, l: f64| (a / l.abs()).max(l.abs() / a);
    let ratio_max = ratio(sv.alpha1, eig.lambda1).max(ratio(sv.alpha2, eig.lambda2));
    let bound = condition_bound(eig.e1, eig.e2)?;
    Ok(EigSvReport {
        ratio_max,
        bound,
        pass: ratio_max <= bound,
    })
}

/// Direction of the top eigenvector of the symmetric `[[p, q], [q, r]]`.
fn principal_angle(p: f64, q: f64, r: f64) -> f64 {
    0.5 * (2.0 * q).atan2(p - r)
}

pub fn svd_axes(m: &Matrix2) -> Result<EllipseAxes> {
    let sv = singular_values(m)?;
    // M Mᵀ for image axes, Mᵀ M for their preimages.
    let out = principal_angle(
        m.a11 * m.a11 + m.a12 * m.a12,
        m.a11 * m.a21 + m.a12 * m.a22,
        m.a21 * m.a21 + m.a22 * m.a22,
    );
    let inp = principal_angle(
        m.a11 * m.a11 + m.a21 * m.a21,
        m.a11 * m.a12 + m.a21 * m.a22,
        m.a12 * m.a12 + m.a22 * m.a22,
    );
    let half_pi = std::f64::consts::FRAC_PI_2;
    Ok(EllipseAxes {
        major_dir: Direction::new(out),
        minor_dir: Direction::new(out + half_pi),
        input_major: Direction::new(inp),
        input_minor: Direction::new(inp + half_pi),
        alpha1: sv.alpha1,
        alpha2: sv.alpha2,
        degenerate: sv.alpha1 - sv.alpha2 <= 1e-12 * sv.alpha1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Square roots of the eigenvalues of M Mᵀ by the plain quadratic formula.
    fn sv_oracle(m: &Matrix2) -> (f64, f64) {
        let p = m.a11 * m.a11 + m.a12 * m.a12;
        let r = m.a21 * m.a21 + m.a22 * m.a22;
        let q = m.a11 * m.a21 + m.a12 * m.a22;
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        ((mean + rad).sqrt(), (mean - rad).max(0.0).sqrt())
    }

    fn cone(tm: f64, tp: f64) -> Matrix2 {
        Matrix2::new(tm.cos(), tp.cos(), tm.sin(), tp.sin()).scale(0.5)
    }

    #[test]
    fn singular_values_examples() {
        let sv = singular_values(&Matrix2::IDENTITY).unwrap();
        assert_eq!((sv.alpha1, sv.alpha2), (1.0, 1.0));
        let sv = singular_values(&Matrix2::diag(0.8, 0.4)).unwrap();
        assert!((sv.alpha1 - 0.8).abs() < 1e-15 && (sv.alpha2 - 0.4).abs() < 1e-15);
        let sv = singular_values(&cone(0.0, PI / 2.0)).unwrap();
        assert!((sv.alpha1 - 0.5).abs() < 1e-15 && (sv.alpha2 - 0.5).abs() < 1e-15);

        let m = cone(PI / 6.0, PI / 2.0);
        let sv = singular_values(&m).unwrap();
        let (o1, o2) = sv_oracle(&m);
        let c = (PI / 3.0).cos();
        assert!((sv.alpha1 - 0.5 * (1.0 + c).sqrt()).abs() < 1e-12);
        assert!((sv.alpha2 - 0.5 * (1.0 - c).sqrt()).abs() < 1e-12);
        assert!((sv.alpha1 - o1).abs() < 1e-12 && (sv.alpha2 - o2).abs() < 1e-12);
        assert!((sv.alpha1 - 0.612372).abs() < 1e-6);
        assert!((sv.alpha2 - 0.353553).abs() < 1e-6);
    }

    #[test]
    fn singular_values_reject_singular() {
        assert!(matches!(
            singular_values(&Matrix2::new(1.0, 2.0, 2.0, 4.0)),
            Err(Error::SingularMatrix)
        ));
        assert!(singular_values(&Matrix2::new(f64::NAN, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn thin_ellipse_keeps_relative_accuracy() {
        let m = Matrix2::new(1.0, 1.0, 1.0, 1.0 + 1e-10);
        let d = m.a22 - 1.0;
        let l1 = (2.0 + d + (d * d + 4.0).sqrt()) / 2.0;
        let sv = singular_values(&m).unwrap();
        assert!((sv.alpha1 / l1 - 1.0).abs() < 1e-15);
        assert!((sv.alpha2 / (d / l1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_examples() {
        let e = eigen_real(&Matrix2::new(2.0, 1.0, 1.0, 1.0)).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e.lambda1 - (3.0 + s5) / 2.0).abs() < 1e-14);
        assert!((e.lambda2 - (3.0 - s5) / 2.0).abs() < 1e-14);

        let e = eigen_real(&Matrix2::diag(0.8, 0.4)).unwrap();
        assert_eq!(e.lambda1, 0.8);
        assert!((e.lambda2 - 0.4).abs() < 1e-15);
        assert!((e.e1 - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e.e2 - Vec2::new(0.0, 1.0)).norm() < 1e-15);

        let e = eigen_real(&Matrix2::IDENTITY).unwrap();
        assert_eq!((e.lambda1, e.lambda2), (1.0, 1.0));
        assert!(e.e1.dot(e.e2).abs() < 1e-15);
        assert!(e.e1.x >= 0.0 && e.e2.y >= 0.0);
    }

    #[test]
    fn eigen_errors() {
        assert!(matches!(
            eigen_real(&Matrix2::rotation(0.5)),
            Err(Error::ComplexEigenvalues)
        ));
        assert!(matches!(
            eigen_real(&Matrix2::new(1.0, 1.0, 0.0, 1.0)),
            Err(Error::Defective)
        ));
    }

    #[test]
    fn condition_bound_examples() {
        let b = condition_bound(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        assert_eq!(b, 4.0);
        let half = Vec2::from_angle(PI / 3.0);
        let b = condition_bound(Vec2::new(1.0, 0.0), half).unwrap();
        assert!((b - 16.0 / 3.0).abs() < 1e-12);
        let b = condition_bound(Vec2::new(1.0, 0.0), Vec2::new(0.99, (1.0 - 0.99f64 * 0.99).sqrt())).unwrap();
        assert!((b - 4.0 / (1.0 - 0.9801)).abs() < 1e-8);
        assert!((b - 201.0).abs() < 0.1);
        assert!(condition_bound(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn eigsv_symmetric_is_exact() {
        let r = eigsv_check(&Matrix2::new(2.0, 1.0, 1.0, 1.0), 1e-9).unwrap();
        assert!((r.ratio_max - 1.0).abs() < 1e-12);
        assert!(r.pass);
        assert!((r.bound - 4.0).abs() < 1e-12);
    }

    #[test]
    fn svd_axes_examples() {
        let ax = svd_axes(&Matrix2::diag(0.8, 0.4)).unwrap();
        assert!(ax.major_dir.angle().abs() < 1e-15);
        assert!((ax.minor_dir.angle() - PI / 2.0).abs() < 1e-15);
        assert!(!ax.degenerate);

        let m = Matrix2::rotation(PI / 4.0) * Matrix2::diag(0.8, 0.4);
        let ax = svd_axes(&m).unwrap();
        assert!((ax.major_dir.angle() - PI / 4.0).abs() < 1e-12);
        // the preimage of the major axis is the x-axis
        assert!(ax.input_major.angle().abs() < 1e-12);

        assert!(svd_axes(&Matrix2::IDENTITY.scale(0.5)).unwrap().degenerate);
    }

    fn matrix() -> impl Strategy<Value = Matrix2> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(a, b, c, d)| Matrix2::new(a, b, c, d))
            .prop_filter("invertible", |m| m.det().abs() > 1e-6)
    }

    fn positive() -> impl Strategy<Value = Matrix2> {
        (1e-3..1.0f64, 1e-3..1.0f64, 1e-3..1.0f64, 1e-3..1.0f64)
            .prop_map(|(a, b, c, d)| Matrix2::new(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn singular_values_identities(m in matrix()) {
            let sv = singular_values(&m).unwrap();
            prop_assert!(sv.alpha1 >= sv.alpha2 && sv.alpha2 > 0.0);
            prop_assert!((sv.alpha1 * sv.alpha2 / m.det().abs() - 1.0).abs() < 1e-12);
            let fro = sv.alpha1 * sv.alpha1 + sv.alpha2 * sv.alpha2;
            prop_assert!((fro / m.frobenius_sq() - 1.0).abs() < 1e-12);
            let (o1, _) = sv_oracle(&m);
            prop_assert!((sv.alpha1 - o1).abs() < 1e-10 * o1);
        }

        #[test]
        fn submultiplicative(m in matrix(), n in matrix()) {
            let a = singular_values(&(m * n)).unwrap().alpha1;
            let b = singular_values(&m).unwrap().alpha1 * singular_values(&n).unwrap().alpha1;
            prop_assert!(a <= b * (1.0 + 1e-12));
        }

        #[test]
        fn svd_axes_attain_singular_values(m in matrix()) {
            let ax = svd_axes(&m).unwrap();
            prop_assume!(!ax.degenerate && ax.alpha1 > 1.001 * ax.alpha2);
            let u = ax.input_major.unit();
            let v = ax.input_minor.unit();
            prop_assert!(((m * u).norm() / ax.alpha1 - 1.0).abs() < 1e-10);
            prop_assert!(((m * v).norm() / ax.alpha2 - 1.0).abs() < 1e-10);
            // image of the major preimage lies along major_dir
            let img = (m * u).normalized();
            prop_assert!(img.cross(ax.major_dir.unit()).abs() < 1e-9);
        }

        #[test]
        fn eigen_pairs_positive(m in positive()) {
            let e = eigen_real(&m).unwrap();
            prop_assert!(e.lambda1.abs() >= e.lambda2.abs());
            for (l, v) in [(e.lambda1, e.e1), (e.lambda2, e.e2)] {
                prop_assert!(((m * v) - v * l).norm() < 1e-10);
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
                prop_assert!(v.x > 0.0 || (v.x == 0.0 && v.y > 0.0));
            }
        }

        #[test]
        fn eigsv_bound_positive(m in positive()) {
            let r = eigsv_check(&m, 1e-12).unwrap();
            prop_assert!(r.pass, "ratio {} bound {}", r.ratio_max, r.bound);
        }
    }
}

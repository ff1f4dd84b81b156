//! Parabola recognition and the Euclidean parameter.
//!
//! A parabola is a regular conic tangent to the line at infinity. Its size is
//! the parameter `p`, the focus-directrix distance: the canonical parabola
//! `x² = 2 p y` has parameter `p`.

use std::cmp::Ordering;

use nalgebra::{Matrix2, Matrix3, Point2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::projective::ConicMatrix;

/// Relative tolerance for the tangency condition `p11 p22 − p12² = 0`.
pub const PARABOLA_TOL: f64 = 1e-9;
/// Relative tolerance under which two parameters compare equal.
pub const SIZE_TOL: f64 = 1e-9;

/// Homogeneous matrix of the affine map `x ↦ a x + b` acting on `[1, x, y]`.
pub fn affine_hom(a: &Matrix2<f64>, b: &Vector2<f64>) -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, b.x, a[(0, 0)], a[(0, 1)], b.y, a[(1, 0)], a[(1, 1)])
}

/// Conic matrix of the image of `c` under the invertible affine map `x ↦ a x + b`.
pub fn map_conic(c: &ConicMatrix, a: &Matrix2<f64>, b: &Vector2<f64>) -> Result<ConicMatrix> {
    let inv = a
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("affine map is not invertible".into()))?;
    c.transformed(&affine_hom(&inv, &(-(inv * b))))
}

fn quadratic_block_defect(m: &Matrix3<f64>) -> (f64, f64) {
    let (p11, p12, p22) = (m[(1, 1)], m[(1, 2)], m[(2, 2)]);
    let scale = p11.abs().max(p12.abs()).max(p22.abs());
    (p11 * p22 - p12 * p12, scale * scale)
}

/// Regular and tangent to the line at infinity: `p11 p22 − p12² = 0`.
pub fn is_parabola(c: &ConicMatrix) -> bool {
    if !c.is_regular() {
        return false;
    }
    let (defect, scale) = quadratic_block_defect(c.matrix());
    scale > 0.0 && defect.abs() <= PARABOLA_TOL * scale
}

/// Tangency to the line at infinity alone, without the regularity test.
///
/// Thin parabolas far from the origin have a tiny Frobenius-relative
/// determinant even though they are regular; constructions that know the
/// conic is regular use this to recover the parameter.
pub(crate) fn tangent_to_infinity(m: &Matrix3<f64>) -> bool {
    let (defect, scale) = quadratic_block_defect(m);
    scale > 0.0 && defect.abs() <= PARABOLA_TOL * scale
}

/// Matrix rescaled so that `p11 + p22 > 0`.
fn oriented(m: &Matrix3<f64>) -> Matrix3<f64> {
    if m[(1, 1)] + m[(2, 2)] < 0.0 {
        -m
    } else {
        *m
    }
}

/// Parameter of a parabola from its matrix coefficients:
///
/// ```text
/// p = |p01 p12 − p02 p11| / ((p11 + p22) √(p11² + p12²))
/// ```
///
/// The formula is 0/0 when the axis is parallel to the x-axis (`p11 = p12 = 0`);
/// the twin obtained by swapping the indices 1 and 2 is used whenever its
/// square root is the larger of the two.
pub fn parameter(c: &ConicMatrix) -> Result<f64> {
    if !is_parabola(c) {
        return Err(Error::NotAParabola);
    }
    Ok(parameter_of_matrix(c.matrix()))
}

fn parameter_of_matrix(m: &Matrix3<f64>) -> f64 {
    let m = oriented(m);
    let (p01, p02, p11, p12, p22) = (m[(0, 1)], m[(0, 2)], m[(1, 1)], m[(1, 2)], m[(2, 2)]);
    let trace = p11 + p22;
    let first = (p11 * p11 + p12 * p12).sqrt();
    let second = (p22 * p22 + p12 * p12).sqrt();
    if first >= second {
        (p01 * p12 - p02 * p11).abs() / (trace * first)
    } else {
        (p02 * p12 - p01 * p22).abs() / (trace * second)
    }
}

/// Squared parameter, the algebraic size measure.
pub fn squared_parameter(c: &ConicMatrix) -> Result<f64> {
    parameter(c).map(|p| p * p)
}

/// A Euclidean parabola with its cached parameter.
///
/// The stored matrix is oriented so that `p11 + p22 > 0`, which makes the
/// quadratic form negative on the open interior (the side of the focus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parabola {
    conic: ConicMatrix,
    parameter: f64,
}

impl Parabola {
    pub fn new(conic: ConicMatrix) -> Result<Self> {
        let parameter = parameter(&conic)?;
        let conic = ConicMatrix::new(oriented(conic.matrix()))?;
        Ok(Self { conic, parameter })
    }

    /// Wraps a matrix known to be a regular conic, checking only the tangency
    /// to the line at infinity and the sign of the parameter.
    pub(crate) fn from_regular(conic: ConicMatrix) -> Result<Self> {
        if !tangent_to_infinity(conic.matrix()) {
            return Err(Error::NotAParabola);
        }
        let parameter = parameter_of_matrix(conic.matrix());
        if !(parameter > 0.0) || !parameter.is_finite() {
            return Err(Error::NotAParabola);
        }
        let conic = ConicMatrix::new(oriented(conic.matrix()))?;
        Ok(Self { conic, parameter })
    }

    pub fn conic(&self) -> &ConicMatrix {
        &self.conic
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    /// `(σ, n, d)` with quadratic block `σ n nᵀ` and `d` the opening direction.
    fn frame(&self) -> (f64, Vector2<f64>, Vector2<f64>) {
        let m = self.conic.matrix();
        let (p11, p12, p22) = (m[(1, 1)], m[(1, 2)], m[(2, 2)]);
        let sigma = p11 + p22;
        let n = if p11 >= p22 { Vector2::new(p11, p12) } else { Vector2::new(p12, p22) }.normalize();
        let g = Vector2::new(m[(0, 1)], m[(0, 2)]);
        let d = Vector2::new(-n.y, n.x);
        let d = if g.dot(&d) > 0.0 { -d } else { d };
        (sigma, n, d)
    }

    /// Unit vector along the axis, pointing into the parabola.
    pub fn axis_direction(&self) -> Vector2<f64> {
        self.frame().2
    }

    pub fn axis_angle(&self) -> f64 {
        let d = self.axis_direction();
        d.y.atan2(d.x)
    }

    /// Vertex of the parabola, found by completing the square along the axis.
    pub fn apex(&self) -> Point2<f64> {
        let m = self.conic.matrix();
        let (sigma, n, d) = self.frame();
        let g = Vector2::new(m[(0, 1)], m[(0, 2)]);
        let gn = g.dot(&n);
        let gd = g.dot(&d);
        let r0 = -gn / sigma;
        let s0 = (gn * gn / sigma - m[(0, 0)]) / (2.0 * gd);
        Point2::from(d * s0 + n * r0)
    }

    /// Focal point, at distance `p / 2` from the apex along the axis.
    pub fn focus(&self) -> Point2<f64> {
        self.apex() + self.axis_direction() * (0.5 * self.parameter)
    }

    /// Supremum of `normal · x` over the closed interior, `+∞` when the
    /// interior is unbounded in that direction. `normal` must be a unit vector.
    pub fn support(&self, normal: &Vector2<f64>) -> f64 {
        support_value(self.apex(), self.axis_direction(), self.parameter, normal)
    }

    /// Point of the curve at signed distance `r` from the axis.
    pub fn point_at(&self, r: f64) -> Point2<f64> {
        let d = self.axis_direction();
        let e = Vector2::new(-d.y, d.x);
        self.apex() + d * (r * r / (2.0 * self.parameter)) + e * r
    }

    /// Quadratic form at a Cartesian point; negative inside.
    pub fn form_at(&self, p: &Point2<f64>) -> f64 {
        self.conic.form(&Vector3::new(1.0, p.x, p.y))
    }

    /// Image under the similarity `x ↦ a x + b`.
    pub fn mapped(&self, a: &Matrix2<f64>, b: &Vector2<f64>) -> Result<Parabola> {
        Parabola::new(map_conic(&self.conic, a, b)?)
    }
}

/// Support value of the parabola with apex, unit opening direction and parameter.
pub fn support_value(apex: Point2<f64>, direction: Vector2<f64>, p: f64, normal: &Vector2<f64>) -> f64 {
    let alpha = -normal.dot(&direction);
    if alpha <= 0.0 {
        return f64::INFINITY;
    }
    let beta = normal.perp(&direction);
    normal.dot(&apex.coords) + p * beta * beta / (2.0 * alpha)
}

/// Orders parabolas by parameter; parameters within `SIZE_TOL` relative are equal.
pub fn compare_size(p1: &Parabola, p2: &Parabola) -> Ordering {
    compare_parameters(p1.parameter, p2.parameter)
}

pub fn compare_parameters(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= SIZE_TOL * a.abs().max(b.abs()) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Parabola with the given apex, opening toward `axis_angle`, and parameter `p`.
///
/// In axis coordinates `s` (along the axis) and `r` (across it) the curve is
/// `r² = 2 p s`, so the matrix is `ℓ_n ℓ_nᵀ − p (e0 ℓ_dᵀ + ℓ_d e0ᵀ)`.
pub fn parabola_from_apex(apex: Point2<f64>, axis_angle: f64, p: f64) -> Result<Parabola> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::NonpositiveParameter(p));
    }
    let d = Vector2::new(axis_angle.cos(), axis_angle.sin());
    let n = Vector2::new(-d.y, d.x);
    let ln = Vector3::new(-n.dot(&apex.coords), n.x, n.y);
    let ld = Vector3::new(-d.dot(&apex.coords), d.x, d.y);
    let e0 = Vector3::new(1.0, 0.0, 0.0);
    let m = ln * ln.transpose() - (e0 * ld.transpose() + ld * e0.transpose()) * p;
    // det = −p², so the conic is regular whatever its Frobenius scaling.
    Ok(Parabola { conic: ConicMatrix::new(m)?, parameter: p })
}

//! Conics as symmetric 3×3 matrices over homogeneous coordinates `[x0, x1, x2]`.
//!
//! The line `x0 = 0` is the line at infinity and Cartesian coordinates are
//! `x = x1 / x0`, `y = x2 / x0`. Matrices are kept unnormalized; every
//! comparison goes through a scale-invariant metric.

use nalgebra::{Matrix3, Point2, Vector3};

use crate::error::{Error, Result};

/// `|det| / ‖m‖³_F` below this value counts as singular.
pub const REGULARITY_TOL: f64 = 1e-10;
/// Relative asymmetry accepted on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative magnitude below which a quadratic form counts as vanishing.
pub const FORM_TOL: f64 = 1e-10;

/// Point of the projective plane, defined up to a nonzero factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint(Vector3<f64>);

/// Line of the projective plane, defined up to a nonzero factor.
///
/// The line `[u0, u1, u2]` is the set of points with `u0 x0 + u1 x1 + u2 x2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomLine(Vector3<f64>);

macro_rules! homogeneous {
    ($ty:ident) => {
        impl $ty {
            pub fn new(x0: f64, x1: f64, x2: f64) -> Result<Self> {
                Self::from_vector(Vector3::new(x0, x1, x2))
            }

            pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
                if v.iter().all(|c| *c == 0.0) || v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "homogeneous coordinates {:?} are zero or not finite",
                        v.as_slice()
                    )));
                }
                Ok(Self(v))
            }

            pub fn coords(&self) -> &Vector3<f64> {
                &self.0
            }

            /// Distance between the unit representatives, minimized over sign.
            pub fn projective_distance(&self, other: &Self) -> f64 {
                projective_distance(&self.0, &other.0)
            }
        }
    };
}

homogeneous!(HomPoint);
homogeneous!(HomLine);

impl HomPoint {
    pub fn from_cartesian(p: Point2<f64>) -> Self {
        Self(Vector3::new(1.0, p.x, p.y))
    }

    /// Cartesian coordinates, or `None` for points at infinity.
    pub fn to_cartesian(&self) -> Option<Point2<f64>> {
        let v = &self.0;
        if v[0].abs() <= 1e-300 * v.norm() {
            None
        } else {
            Some(Point2::new(v[1] / v[0], v[2] / v[0]))
        }
    }
}

impl HomLine {
    /// The line at infinity `x0 = 0`.
    pub fn at_infinity() -> Self {
        Self(Vector3::new(1.0, 0.0, 0.0))
    }

    /// The line `normal · x = offset`.
    pub fn from_normal_offset(normal: [f64; 2], offset: f64) -> Result<Self> {
        Self::new(-offset, normal[0], normal[1])
    }
}

/// Distance between two vectors after scaling to unit length, up to sign.
pub fn projective_distance(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let a = a / a.norm();
    let b = b / b.norm();
    (a - b).norm().min((a + b).norm())
}

/// Adjugate (transposed cofactor matrix); equals `det(m) · m⁻¹` for regular `m`.
pub fn adjugate(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
    Matrix3::new(
        c(1, 2, 1, 2),
        -c(0, 2, 1, 2),
        c(0, 1, 1, 2),
        -c(1, 2, 0, 2),
        c(0, 2, 0, 2),
        -c(0, 1, 0, 2),
        c(1, 2, 0, 1),
        -c(0, 2, 0, 1),
        c(0, 1, 0, 1),
    )
}

/// Conic (or dual conic) given by a real symmetric matrix, up to scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicMatrix {
    m: Matrix3<f64>,
}

impl ConicMatrix {
    /// Wraps a symmetric matrix. The stored matrix is the symmetric part of `m`.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("conic matrix has non-finite entries".into()));
        }
        let norm = m.norm();
        if norm == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let asym = (m - m.transpose()).norm();
        if asym > SYMMETRY_TOL * norm {
            return Err(Error::InvalidInput(format!(
                "conic matrix is not symmetric (relative asymmetry {:e})",
                asym / norm
            )));
        }
        Ok(Self { m: (m + m.transpose()) * 0.5 })
    }

    pub fn from_diagonal(d0: f64, d1: f64, d2: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(d0, d1, d2)))
    }

    /// The unit circle `x² + y² − 1 = 0`, interior negative.
    pub fn unit_circle() -> Self {
        Self { m: Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 1.0)) }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// Matrix scaled to unit Frobenius norm.
    pub fn normalized(&self) -> Matrix3<f64> {
        self.m / self.m.norm()
    }

    /// `det(m) / ‖m‖³_F`, invariant under rescaling up to sign.
    pub fn relative_det(&self) -> f64 {
        let n = self.m.norm();
        self.m.determinant() / (n * n * n)
    }

    pub fn is_regular(&self) -> bool {
        self.relative_det().abs() >= REGULARITY_TOL
    }

    fn require_regular(&self) -> Result<()> {
        let rd = self.relative_det();
        if rd.abs() < REGULARITY_TOL {
            Err(Error::SingularConic(rd))
        } else {
            Ok(())
        }
    }

    /// Quadratic form `vᵀ m v`.
    pub fn form(&self, v: &Vector3<f64>) -> f64 {
        v.dot(&(self.m * v))
    }

    /// Quadratic form at `p` divided by `‖m‖_F ‖p‖²`.
    pub fn relative_form(&self, v: &Vector3<f64>) -> f64 {
        self.form(v) / (self.m.norm() * v.norm_squared())
    }

    pub fn polar(&self, p: &HomPoint) -> Result<HomLine> {
        self.require_regular()?;
        HomLine::from_vector(self.m * p.coords())
    }

    /// Pole of `u`, computed with the adjugate instead of the inverse.
    pub fn pole(&self, u: &HomLine) -> Result<HomPoint> {
        self.require_regular()?;
        HomPoint::from_vector(adjugate(&self.m) * u.coords())
    }

    /// Dual conic, `adj(m)`.
    pub fn dualize(&self) -> Result<ConicMatrix> {
        self.require_regular()?;
        let adj = adjugate(&self.m);
        Ok(Self { m: (adj + adj.transpose()) * 0.5 })
    }

    /// Returns `±m` oriented so that the form is negative at `witness`.
    pub fn normalize_interior(&self, witness: &HomPoint) -> Result<ConicMatrix> {
        let value = self.relative_form(witness.coords());
        if value.abs() <= FORM_TOL {
            return Err(Error::WitnessOnConic);
        }
        Ok(if value < 0.0 { *self } else { Self { m: -self.m } })
    }

    /// `pᵀ m p < 0`. Assumes the matrix was normalized with [`Self::normalize_interior`].
    pub fn is_interior(&self, p: &HomPoint) -> bool {
        self.form(p.coords()) < 0.0
    }

    /// Member `(1 − t) c0 + t c1` of the pencil spanned by two conics.
    pub fn pencil_blend(c0: &ConicMatrix, c1: &ConicMatrix, t: f64) -> Result<ConicMatrix> {
        let m = c0.m * (1.0 - t) + c1.m * t;
        let scale = c0.m.norm().max(c1.m.norm());
        if m.norm() <= 1e-14 * scale {
            return Err(Error::ZeroBlend);
        }
        Ok(Self { m })
    }

    /// Frobenius distance between the unit-normalized matrices, up to sign.
    pub fn scale_invariant_distance(&self, other: &ConicMatrix) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        (a - b).norm().min((a + b).norm())
    }

    /// Congruence `Tᵀ m T`: if `T` maps new coordinates to old ones, the result
    /// describes the same conic in the new coordinates.
    pub fn transformed(&self, t: &Matrix3<f64>) -> Result<ConicMatrix> {
        Self::new(t.transpose() * self.m * t)
    }

    /// Number of real intersection points with the line `u`, from the sign of
    /// the dual form: `uᵀ adj(m) u` is negative for secants, zero for tangents,
    /// positive for lines missing the conic.
    pub fn line_discriminant(&self, u: &HomLine) -> f64 {
        let adj = adjugate(&self.m);
        u.coords().dot(&(adj * u.coords())) / (adj.norm() * u.coords().norm_squared())
    }

    pub fn scaled(&self, factor: f64) -> Result<ConicMatrix> {
        Self::new(self.m * factor)
    }
}

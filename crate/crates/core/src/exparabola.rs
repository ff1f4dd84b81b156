//! Exparabolas of a triangle.
//!
//! In a frame with `A = (a1, 0)`, `B = (b1, 0)`, `C = (0, c2)` the parabolas
//! tangent to the three side lines form the dual pencil `D(λ)`, whose member
//! `P(λ)` touches the line `AB` at `(λ, 0)`. The squared parameter along the
//! pencil is
//!
//! ```text
//! p²(λ) = 4 c2⁴ (b1 − λ)² (a1 − λ)² / ((λ − a1 − b1)² + c2²)³
//! ```
//!
//! and its critical points away from `a1`, `b1` are the roots of the cubic
//! `E(λ)`. The root in `(a1, b1)` is the exparabola of side `AB`.

use nalgebra::{Matrix2, Matrix3, Point2, Vector2};

use crate::cubic::MonicCubic;
use crate::error::{Error, Result};
use crate::parabola::{affine_hom, parabola_from_apex, Parabola};
use crate::projective::{ConicMatrix, HomLine};

/// Triangles with `area / diameter²` below this are rejected by the solvers.
pub const NEAR_DEGENERATE: f64 = 1e-6;
/// `2·area / diameter²` below this is not a triangle at all.
pub const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    AB,
    BC,
    CA,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::AB, Side::BC, Side::CA];

    /// The vertex not on this side.
    pub fn opposite(self) -> Vertex {
        match self {
            Side::AB => Vertex::C,
            Side::BC => Vertex::A,
            Side::CA => Vertex::B,
        }
    }

    /// Endpoints in cyclic order, followed by the opposite vertex.
    fn vertices(self) -> (Vertex, Vertex, Vertex) {
        match self {
            Side::AB => (Vertex::A, Vertex::B, Vertex::C),
            Side::BC => (Vertex::B, Vertex::C, Vertex::A),
            Side::CA => (Vertex::C, Vertex::A, Vertex::B),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Point2<f64>,
    pub b: Point2<f64>,
    pub c: Point2<f64>,
}

impl Triangle {
    pub fn new(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> Result<Self> {
        let t = Self { a, b, c };
        if [a, b, c].iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInput("triangle vertex is not finite".into()));
        }
        let ratio = t.area_ratio();
        if 2.0 * ratio < COLLINEAR_TOL {
            return Err(Error::DegenerateTriangle(ratio));
        }
        Ok(t)
    }

    pub fn vertex(&self, v: Vertex) -> Point2<f64> {
        match v {
            Vertex::A => self.a,
            Vertex::B => self.b,
            Vertex::C => self.c,
        }
    }

    pub fn diameter(&self) -> f64 {
        (self.a - self.b).norm().max((self.b - self.c).norm()).max((self.c - self.a).norm())
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.b - self.a).perp(&(self.c - self.a))
    }

    /// `area / diameter²`, a scale-free measure of degeneracy.
    pub fn area_ratio(&self) -> f64 {
        let d = self.diameter();
        if d == 0.0 {
            0.0
        } else {
            self.signed_area().abs() / (d * d)
        }
    }

    /// Positive half-plane of a side as `normal · x ≤ offset` with unit
    /// normal; it contains the opposite vertex in its interior.
    pub fn positive_halfplane(&self, side: Side) -> (Vector2<f64>, f64) {
        let (p, q, r) = side.vertices();
        let (p, q, r) = (self.vertex(p), self.vertex(q), self.vertex(r));
        let dir = (q - p).normalize();
        let mut normal = Vector2::new(dir.y, -dir.x);
        if normal.dot(&(r - p)) > 0.0 {
            normal = -normal;
        }
        (normal, normal.dot(&p.coords))
    }

    /// Side line as a homogeneous line.
    pub fn side_line(&self, side: Side) -> HomLine {
        let (n, o) = self.positive_halfplane(side);
        HomLine::from_normal_offset([n.x, n.y], o).expect("unit normal")
    }

    pub fn mapped(&self, a: &Matrix2<f64>, b: &Vector2<f64>) -> Result<Triangle> {
        let f = |p: Point2<f64>| Point2::from(a * p.coords + b);
        Triangle::new(f(self.a), f(self.b), f(self.c))
    }
}

/// Rigid motion placing one side on the x-axis and its opposite vertex on the
/// positive y-axis, with the foot of the altitude at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalFrame {
    /// Rows are the frame axes in world coordinates; determinant ±1.
    axes: Matrix2<f64>,
    /// Foot of the altitude in world coordinates.
    origin: Point2<f64>,
    pub a1: f64,
    pub b1: f64,
    pub c2: f64,
}

pub fn canonical_frame(t: &Triangle, side: Side) -> Result<CanonicalFrame> {
    let ratio = t.area_ratio();
    if ratio < NEAR_DEGENERATE {
        return Err(Error::DegenerateTriangle(ratio));
    }
    let (p, q, r) = side.vertices();
    let (p, q, r) = (t.vertex(p), t.vertex(q), t.vertex(r));
    let u = (q - p).normalize();
    let origin = p + u * (r - p).dot(&u);
    let v = (r - origin).normalize();
    Ok(CanonicalFrame {
        axes: Matrix2::new(u.x, u.y, v.x, v.y),
        origin,
        a1: (p - origin).dot(&u),
        b1: (q - origin).dot(&u),
        c2: (r - origin).norm(),
    })
}

impl CanonicalFrame {
    /// Frame directly from the coordinates, with the identity motion.
    pub fn from_coordinates(a1: f64, b1: f64, c2: f64) -> Result<Self> {
        if !(a1 < b1) || !(c2 > 0.0) {
            return Err(Error::InvalidInput(format!("frame needs a1 < b1 and c2 > 0, got ({a1}, {b1}, {c2})")));
        }
        Ok(Self { axes: Matrix2::identity(), origin: Point2::origin(), a1, b1, c2 })
    }

    pub fn to_frame(&self, p: &Point2<f64>) -> Point2<f64> {
        Point2::from(self.axes * (p - self.origin))
    }

    pub fn to_world(&self, p: &Point2<f64>) -> Point2<f64> {
        self.origin + self.axes.transpose() * p.coords
    }

    /// Homogeneous matrix taking world coordinates `[1, x, y]` to frame coordinates.
    pub fn world_to_frame_hom(&self) -> Matrix3<f64> {
        affine_hom(&self.axes, &(-(self.axes * self.origin.coords)))
    }

    /// Side lines `c2 x + b1 y = b1 c2`, `c2 x + a1 y = a1 c2`, `y = 0` in frame coordinates.
    pub fn side_lines(&self) -> [HomLine; 3] {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        [
            HomLine::new(-b1 * c2, c2, b1).expect("c2 > 0"),
            HomLine::new(-a1 * c2, c2, a1).expect("c2 > 0"),
            HomLine::new(0.0, 0.0, 1.0).expect("nonzero"),
        ]
    }

    /// Dual conic `D(λ)` of the pencil member tangent to the side lines and ℓ∞.
    pub fn pencil_dual(&self, lambda: f64) -> ConicMatrix {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        let m = lambda - a1 - b1;
        ConicMatrix::new(Matrix3::new(0.0, m, c2, m, -2.0 * a1 * b1, c2 * lambda, c2, c2 * lambda, 0.0))
            .expect("c2 > 0 keeps D(λ) nonzero")
    }

    /// Primal parabola `P(λ)` in frame coordinates.
    pub fn pencil_parabola(&self, lambda: f64) -> Result<Parabola> {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        let width = b1 - a1;
        if (lambda - a1).abs() <= 1e-12 * width || (lambda - b1).abs() <= 1e-12 * width {
            return Err(Error::SingularPencilMember(lambda));
        }
        let m = lambda - a1 - b1;
        let k = lambda * lambda - (a1 + b1) * lambda + 2.0 * a1 * b1;
        let p = Matrix3::new(
            -c2 * lambda * lambda,
            c2 * lambda,
            k,
            c2 * lambda,
            -c2,
            m,
            k,
            m,
            -m * m / c2,
        );
        let conic = ConicMatrix::new(p)?;
        Parabola::from_regular(conic).map_err(|e| match e {
            Error::NotAParabola => Error::SingularPencilMember(lambda),
            other => other,
        })
    }

    /// Denominator base `(λ − a1 − b1)² + c2²` of the squared parameter.
    pub fn pencil_denominator(&self, lambda: f64) -> f64 {
        let m = lambda - self.a1 - self.b1;
        m * m + self.c2 * self.c2
    }

    /// Squared parameter of `P(λ)`; defined for every real `λ`.
    pub fn squared_parameter(&self, lambda: f64) -> f64 {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        let c4 = c2 * c2 * c2 * c2;
        let num = 4.0 * c4 * (b1 - lambda).powi(2) * (a1 - lambda).powi(2);
        num / self.pencil_denominator(lambda).powi(3)
    }

    /// Closed-form `d(p²)/dλ = −8 c2⁴ (b1 − λ)(a1 − λ) E(λ) / den⁴`.
    pub fn squared_parameter_derivative(&self, lambda: f64) -> f64 {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        let c4 = c2 * c2 * c2 * c2;
        -8.0 * c4 * (b1 - lambda) * (a1 - lambda) * self.cubic_e().eval(lambda)
            / self.pencil_denominator(lambda).powi(4)
    }

    /// The cubic `E(λ)` whose roots are the critical points of `p²(λ)`.
    pub fn cubic_e(&self) -> MonicCubic {
        let (a1, b1, c2) = (self.a1, self.b1, self.c2);
        let c22 = c2 * c2;
        MonicCubic::new(
            -(a1 + b1),
            -a1 * a1 + a1 * b1 - b1 * b1 - 2.0 * c22,
            a1 * (a1 * a1 + c22) + b1 * (b1 * b1 + c22),
        )
    }

    /// Roots of `E` in ascending order.
    pub fn critical_lambdas(&self) -> Result<[f64; 3]> {
        self.cubic_e().real_roots()
    }

    /// The unique root of `E` in `(a1, b1)`.
    pub fn interval_root(&self) -> Result<f64> {
        let roots = self.critical_lambdas()?;
        let inside: Vec<f64> = roots.iter().copied().filter(|r| *r > self.a1 && *r < self.b1).collect();
        match inside.as_slice() {
            [r] => Ok(*r),
            _ => Err(Error::NumericalRootFailure(format!(
                "expected one root of E in ({}, {}), found {:?}",
                self.a1, self.b1, roots
            ))),
        }
    }

    /// Pencil member `P(λ)` carried to world coordinates.
    pub fn world_parabola(&self, lambda: f64) -> Result<Parabola> {
        let local = self.pencil_parabola(lambda)?;
        let d = self.axes.transpose() * local.axis_direction();
        parabola_from_apex(self.to_world(&local.apex()), d.y.atan2(d.x), local.parameter())
    }
}

/// One of the three exparabolas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exparabola {
    /// Side whose negative half-plane contains the parabola.
    pub side: Side,
    pub opposite_vertex: Vertex,
    /// Tangency coordinate along the side in its canonical frame.
    pub lambda: f64,
    pub parabola: Parabola,
    /// Point of tangency with the side line, in world coordinates.
    pub tangency: Point2<f64>,
    pub frame: CanonicalFrame,
}

pub fn exparabola_for_side(t: &Triangle, side: Side) -> Result<Exparabola> {
    let frame = canonical_frame(t, side)?;
    let lambda = frame.interval_root()?;
    Ok(Exparabola {
        side,
        opposite_vertex: side.opposite(),
        lambda,
        parabola: frame.world_parabola(lambda)?,
        tangency: frame.to_world(&Point2::new(lambda, 0.0)),
        frame,
    })
}

/// The three exparabolas, ordered by side `AB`, `BC`, `CA`.
pub fn exparabolas(t: &Triangle) -> Result<[Exparabola; 3]> {
    Ok([
        exparabola_for_side(t, Side::AB)?,
        exparabola_for_side(t, Side::BC)?,
        exparabola_for_side(t, Side::CA)?,
    ])
}

/// Distance by which a parabola fails to touch a line `normal · x = offset`
/// from the side the normal points away from; zero for tangency.
pub fn tangency_gap(p: &Parabola, normal: &Vector2<f64>, offset: f64) -> f64 {
    let d = p.axis_direction();
    let (n, o) = if normal.dot(&d) <= 0.0 { (*normal, offset) } else { (-normal, -offset) };
    o - p.support(&n)
}

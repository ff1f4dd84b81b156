//! Horocycles of the Cayley–Klein disk.
//!
//! The absolute conic `N` is the unit circle. A horocycle touching `N` at the
//! ideal point `(cos θ, sin θ)` is, as a Euclidean curve, the ellipse with
//! semi-axes `a` (tangential) and `a²` (radial) that hyperosculates `N` there.
//! Its size is `a`. For `θ = π/2` the matrix is
//!
//! ```text
//! [ 1 − 2a²   0   a² − 1 ]
//! [ 0         a²  0      ]
//! [ a² − 1    0   1      ]
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{Matrix3, Point2, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::projective::ConicMatrix;

/// Band around zero in which the form counts as on the boundary, absorbing
/// the rounding of `a²` (for example `fl(2^{-1/2})² > 1/2`).
pub const BOUNDARY_TOL: f64 = 1e-15;

/// Size bound below which the shrinking construction is guaranteed to work.
pub const CRITICAL_SIZE: f64 = FRAC_1_SQRT_2;

/// A point of the hyperbolic plane, strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoroPoint {
    pub x: f64,
    pub y: f64,
}

impl HoroPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput("point has non-finite coordinates".into()));
        }
        if x * x + y * y >= 1.0 {
            return Err(Error::InvalidInput(format!("point ({x}, {y}) is not inside the unit disk")));
        }
        Ok(Self { x, y })
    }

    pub fn point(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }

    /// Rotated so that the ideal point at angle `theta` moves to `(0, 1)`.
    pub fn to_canonical(&self, theta: f64) -> (f64, f64) {
        canonical_coords(theta, self.x, self.y)
    }
}

fn canonical_coords(theta: f64, x: f64, y: f64) -> (f64, f64) {
    let (s, c) = (theta - FRAC_PI_2).sin_cos();
    (c * x + s * y, -s * x + c * y)
}

/// Horocycle with ideal point at angle `theta` and size `a ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horocycle {
    pub theta: f64,
    pub a: f64,
}

impl Horocycle {
    pub fn new(theta: f64, a: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidInput("horocycle angle is not finite".into()));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidInput(format!("horocycle size {a} is not in (0, 1)")));
        }
        Ok(Self { theta, a })
    }

    pub fn size(&self) -> f64 {
        self.a
    }

    pub fn ideal_point(&self) -> Point2<f64> {
        Point2::new(self.theta.cos(), self.theta.sin())
    }

    /// Euclidean center of the ellipse.
    pub fn center(&self) -> Point2<f64> {
        self.ideal_point() * (1.0 - self.a * self.a)
    }

    /// Semi-axes `(a, a²)`: the first is tangential, the second radial.
    pub fn semi_axes(&self) -> (f64, f64) {
        (self.a, self.a * self.a)
    }

    /// Conic matrix, negative on the interior.
    pub fn matrix(&self) -> ConicMatrix {
        ConicMatrix::new(horocycle_matrix(self.theta, self.a)).expect("horocycle matrix is finite and symmetric")
    }

    /// Quadratic form at a Cartesian point; negative inside.
    pub fn form_at(&self, x: f64, y: f64) -> f64 {
        let (xc, yc) = canonical_coords(self.theta, x, y);
        canonical_form(self.a, xc, yc)
    }

    /// Open interior test; points within [`BOUNDARY_TOL`] of the curve are outside.
    pub fn contains(&self, p: &HoroPoint) -> bool {
        self.form_at(p.x, p.y) < -BOUNDARY_TOL
    }
}

fn canonical_form(a: f64, x: f64, y: f64) -> f64 {
    let s = a * a;
    s * (x * x + 2.0 * y - 2.0) + (1.0 - y) * (1.0 - y)
}

/// Matrix of the horocycle `(theta, a)`, obtained from the `θ = π/2` matrix by
/// conjugation with the rotation that carries `(0, 1)` to the ideal point.
pub fn horocycle_matrix(theta: f64, a: f64) -> Matrix3<f64> {
    let s = a * a;
    let e = Matrix3::new(1.0 - 2.0 * s, 0.0, s - 1.0, 0.0, s, 0.0, s - 1.0, 0.0, 1.0);
    let (sn, cs) = (theta - FRAC_PI_2).sin_cos();
    let t = Matrix3::new(1.0, 0.0, 0.0, 0.0, cs, sn, 0.0, -sn, cs);
    t.transpose() * e * t
}

/// Smallest size of a horocycle with ideal angle `theta` whose closed interior
/// contains `p`: `sqrt((1 − y')² / (2 − 2y' − x'²))` in rotated coordinates.
pub fn min_size_for_point(theta: f64, p: &HoroPoint) -> f64 {
    let (x, y) = p.to_canonical(theta);
    ((1.0 - y) * (1.0 - y) / (2.0 - 2.0 * y - x * x)).sqrt()
}

/// The two horocycles of size `a` with ideal angles `π/2 + ω` and `π/2 − ω`.
pub fn lemma_pair(a: f64, omega: f64) -> Result<(Horocycle, Horocycle)> {
    Ok((Horocycle::new(FRAC_PI_2 + omega, a)?, Horocycle::new(FRAC_PI_2 - omega, a)?))
}

/// Radicand `2a² − a² cos²ω − sin²ω` of the intersection formulas.
pub fn intersection_radicand(a: f64, omega: f64) -> f64 {
    let (s, c) = omega.sin_cos();
    2.0 * a * a - a * a * c * c - s * s
}

/// Lower and upper intersection points `L = (0, ℓ)`, `U = (0, u)` of the
/// horocycles of size `a` with ideal angles `π/2 ± ω`.
///
/// `U` is the ideal point `(0, 1)` when `ω = 0`, so both are returned as plain
/// Cartesian points.
pub fn intersection_points(a: f64, omega: f64) -> Result<(Point2<f64>, Point2<f64>)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidInput(format!("horocycle size {a} is not in (0, 1)")));
    }
    if !(0.0..std::f64::consts::PI).contains(&omega) {
        return Err(Error::InvalidInput(format!("angle {omega} is not in [0, π)")));
    }
    let radicand = intersection_radicand(a, omega);
    if !(radicand > 0.0) {
        return Err(Error::NoCommonInterior);
    }
    let (s, c) = omega.sin_cos();
    let den = a * a * s * s + c * c;
    let base = c - a * a * c;
    let root = a * radicand.sqrt();
    Ok((Point2::new(0.0, (base - root) / den), Point2::new(0.0, (base + root) / den)))
}

/// Horocycle tangent to `N` at `(0, 1)` whose boundary passes through `L`.
///
/// For `a < 2^{-1/2}` it is strictly smaller than the two horocycles of size
/// `a` at `π/2 ± ω` and contains their common interior.
pub fn lemma_shrink(a: f64, omega: f64) -> Result<Horocycle> {
    if !(a > 0.0 && a < CRITICAL_SIZE) {
        return Err(Error::PreconditionViolation(format!("size {a} is not in (0, 2^(-1/2))")));
    }
    lemma_shrink_unchecked(a, omega).map_err(|e| match e {
        Error::NoCommonInterior => Error::PreconditionViolation("the two horocycles have no common interior".into()),
        other => other,
    })
}

/// The same construction without the size bound; valid for any `a ∈ (0, 1)`.
pub fn lemma_shrink_unchecked(a: f64, omega: f64) -> Result<Horocycle> {
    let (lower, _) = intersection_points(a, omega)?;
    Horocycle::new(FRAC_PI_2, ((1.0 - lower.y) / 2.0).sqrt())
}

/// `ω = 2 arctan t`.
pub fn omega_from_t(t: f64) -> f64 {
    2.0 * t.atan()
}

/// `q = (t⁴ + 6t² + 1) a² − 4t²`.
pub fn lemma_q(a: f64, t: f64) -> f64 {
    let t2 = t * t;
    (t2 * t2 + 6.0 * t2 + 1.0) * a * a - 4.0 * t2
}

/// Right-hand side `R = 2 − 3a² − a² t⁴ − 2 (2a² − 1)² t²` of the size inequality.
pub fn lemma_r(a: f64, t: f64) -> f64 {
    let (s, t2) = (a * a, t * t);
    let g = 2.0 * s - 1.0;
    2.0 - 3.0 * s - s * t2 * t2 - 2.0 * g * g * t2
}

/// Left-hand side `L = a (t² + 1) √q` of the size inequality.
pub fn lemma_l(a: f64, t: f64) -> f64 {
    a * (t * t + 1.0) * lemma_q(a, t).sqrt()
}

/// Factored form `4 (1 − a²)(2a²t² + 1)(4a²t² + (t² − 1)²)(2a² − 1)` of `L² − R²`.
pub fn lemma_factored(a: f64, t: f64) -> f64 {
    let (s, t2) = (a * a, t * t);
    4.0 * (1.0 - s) * (2.0 * s * t2 + 1.0) * (4.0 * s * t2 + (t2 - 1.0) * (t2 - 1.0)) * (2.0 * s - 1.0)
}

/// Quantities of the size part of the shrinking construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaIdentityReport {
    pub a: f64,
    pub t: f64,
    pub q: f64,
    pub l: f64,
    pub r: f64,
    pub r_positive: bool,
    pub r_at_t1: f64,
    pub r_at_t1_expected: f64,
    /// `L² − R²` evaluated directly.
    pub difference: f64,
    pub factored: f64,
    /// `|(L² − R²) − factored| / max(L², R², |factored|)`.
    pub factorization_residual: f64,
    pub monotone_decreasing: bool,
    /// `2a² + ℓ − 1`, positive iff the new horocycle is smaller.
    pub size_margin: f64,
}

/// Evaluates the size inequality and its algebraic identities at `(a, t)`.
pub fn verify_lemma_identities(a: f64, t: f64) -> Result<LemmaIdentityReport> {
    if !(a > 0.0 && a < CRITICAL_SIZE) {
        return Err(Error::PreconditionViolation(format!("size {a} is not in (0, 2^(-1/2))")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::PreconditionViolation(format!("t = {t} is not in (0, 1)")));
    }
    let q = lemma_q(a, t);
    if !(q > 0.0) {
        return Err(Error::PreconditionViolation(format!("q = {q} is not positive")));
    }
    let (l, r) = (lemma_l(a, t), lemma_r(a, t));
    let difference = l * l - r * r;
    let factored = lemma_factored(a, t);
    let scale = (l * l).max(r * r).max(factored.abs()).max(f64::MIN_POSITIVE);
    let samples: Vec<f64> = (0..=64).map(|k| lemma_r(a, k as f64 / 64.0)).collect();
    let monotone_decreasing = samples.windows(2).all(|w| w[1] < w[0]);
    let (lower, _) = intersection_points(a, omega_from_t(t))?;
    Ok(LemmaIdentityReport {
        a,
        t,
        q,
        l,
        r,
        r_positive: r > 0.0,
        r_at_t1: lemma_r(a, 1.0),
        r_at_t1_expected: 4.0 * a * a * (1.0 - 2.0 * a * a),
        difference,
        factored,
        factorization_residual: (difference - factored).abs() / scale,
        monotone_decreasing,
        size_margin: 2.0 * a * a + lower.y - 1.0,
    })
}

/// Lens inequality of the horocycle at `π/2 + ω`, multiplied by `(1 + t²)²`.
pub fn lens_form0(a: f64, t: f64, x: f64, y: f64) -> f64 {
    let (s, t2) = (a * a, t * t);
    let w = t2 + 2.0 * t * x + 1.0;
    (4.0 * s * t2 + t2 * t2 - 2.0 * t2 + 1.0) * y * y - 2.0 * (t2 - 1.0) * (s - 1.0) * w * y
        + ((t2 - 1.0) * (t2 - 1.0) * x * x - (4.0 * t2 * t + 4.0 * t) * x - 2.0 * (t2 + 1.0) * (t2 + 1.0)) * s
        + w * w
}

/// Lens inequality of the horocycle at `π/2 − ω`; the mirror image of [`lens_form0`].
pub fn lens_form1(a: f64, t: f64, x: f64, y: f64) -> f64 {
    lens_form0(a, t, -x, y)
}

/// Containment in the shrunken horocycle after the substitution `ω = 2 arctan t`;
/// negative inside.
pub fn shrunk_form(a: f64, t: f64, x: f64, y: f64) -> f64 {
    let (s, t2) = (a * a, t * t);
    let g = x * x + 2.0 * y - 2.0;
    a * (t2 + 1.0) * g * lemma_q(a, t).max(0.0).sqrt()
        + ((2.0 - x * x - 2.0 * y) * s + 2.0 * x * x + 2.0 * y * y - 2.0) * t2 * t2
        + 4.0 * (s - 0.5) * (x * x + 2.0 * y * y - 2.0 * y) * t2
        + g * s
        + 2.0 * (y - 1.0) * (y - 1.0)
}

/// Polynomial `k` whose positivity is equivalent to [`shrunk_form`] being negative
/// inside the unit disk.
pub fn lemma_k(a: f64, t: f64, x: f64, y: f64) -> f64 {
    let (s, t2) = (a * a, t * t);
    let rho = x * x + y * y - 1.0;
    let ym = (y - 1.0) * (y - 1.0);
    rho * ((x * x + 2.0 * y - 2.0) * s - x * x - y * y + 1.0) * t2 * t2 - 4.0 * rho * ym * (s - 0.5) * t2
        - ym * (y * y + (2.0 * s - 2.0) * y + 1.0 + (x * x - 2.0) * s)
}

/// Outcome of the sampled containment check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentReport {
    pub a: f64,
    pub t: f64,
    /// Whether `a < 2^{-1/2}`, the range in which containment is claimed.
    pub lemma_applies: bool,
    pub shrunk_size: f64,
    /// Sampled points of the common interior.
    pub lens_points: usize,
    /// Lens points with `k ≤ 0`.
    pub k_violations: usize,
    /// Lens points where the substituted containment inequality fails.
    pub substituted_violations: usize,
    /// Lens points outside the shrunken horocycle.
    pub containment_violations: usize,
    /// Lens points outside the horocycle at `π/2` of size `min(size(H), a)`,
    /// i.e. failures of the full claim "a horocycle no larger than `a` contains the lens".
    pub capped_violations: usize,
    pub min_k: f64,
}

impl ContainmentReport {
    /// Violations of the shrinking claim: a containing horocycle no larger than `a`.
    pub fn violations(&self) -> usize {
        self.capped_violations
    }
}

const CHUNK: usize = 4096;

#[derive(Clone, Copy)]
struct Tally {
    lens: usize,
    k: usize,
    substituted: usize,
    contained: usize,
    capped: usize,
    min_k: f64,
}

impl Tally {
    const EMPTY: Tally = Tally { lens: 0, k: 0, substituted: 0, contained: 0, capped: 0, min_k: f64::INFINITY };

    fn merge(self, o: Tally) -> Tally {
        Tally {
            lens: self.lens + o.lens,
            k: self.k + o.k,
            substituted: self.substituted + o.substituted,
            contained: self.contained + o.contained,
            capped: self.capped + o.capped,
            min_k: self.min_k.min(o.min_k),
        }
    }
}

/// Bounding box of the horocycle's ellipse.
fn bounding_box(h: &Horocycle) -> (Point2<f64>, Point2<f64>) {
    let c = h.center();
    let (major, minor) = h.semi_axes();
    let (s, co) = h.theta.sin_cos();
    let hx = ((major * s).powi(2) + (minor * co).powi(2)).sqrt();
    let hy = ((major * co).powi(2) + (minor * s).powi(2)).sqrt();
    (Point2::new(c.x - hx, c.y - hy), Point2::new(c.x + hx, c.y + hy))
}

/// Samples the common interior of the horocycles of size `a` at `π/2 ± ω`,
/// `ω = 2 arctan t`, and checks each point against the shrunken horocycle.
///
/// Rejection sampling in the bounding box of the lens draws until `samples`
/// lens points are found (or a draw budget of `64 · samples` is exhausted).
/// Chunks of the sample index space use independent ChaCha streams, so the
/// report does not depend on the number of threads.
pub fn verify_containment_implication(a: f64, t: f64, samples: usize, seed: u64) -> Result<ContainmentReport> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidInput(format!("horocycle size {a} is not in (0, 1)")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidInput(format!("t = {t} is not in (0, 1)")));
    }
    let omega = omega_from_t(t);
    let shrunk = match lemma_shrink_unchecked(a, omega) {
        Ok(h) => h,
        Err(Error::NoCommonInterior) => {
            return Ok(ContainmentReport {
                a,
                t,
                lemma_applies: a < CRITICAL_SIZE,
                shrunk_size: f64::NAN,
                lens_points: 0,
                k_violations: 0,
                substituted_violations: 0,
                containment_violations: 0,
                capped_violations: 0,
                min_k: f64::INFINITY,
            })
        }
        Err(e) => return Err(e),
    };
    let capped = Horocycle::new(FRAC_PI_2, shrunk.a.min(a))?;
    let (h0, h1) = lemma_pair(a, omega)?;
    let (lo0, hi0) = bounding_box(&h0);
    let (lo1, hi1) = bounding_box(&h1);
    let lo = Point2::new(lo0.x.max(lo1.x), lo0.y.max(lo1.y));
    let hi = Point2::new(hi0.x.min(hi1.x), hi0.y.min(hi1.y));

    let chunks = samples.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let want = CHUNK.min(samples - chunk * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let mut tally = Tally::EMPTY;
            let mut draws = 0;
            while tally.lens < want && draws < 64 * want {
                draws += 1;
                let x = rng.gen_range(lo.x..=hi.x);
                let y = rng.gen_range(lo.y..=hi.y);
                if x * x + y * y >= 1.0 || lens_form0(a, t, x, y) >= 0.0 || lens_form1(a, t, x, y) >= 0.0 {
                    continue;
                }
                tally.lens += 1;
                let k = lemma_k(a, t, x, y);
                tally.min_k = tally.min_k.min(k);
                if !(k > 0.0) {
                    tally.k += 1;
                }
                if !(shrunk_form(a, t, x, y) < 0.0) {
                    tally.substituted += 1;
                }
                if !(shrunk.form_at(x, y) < 0.0) {
                    tally.contained += 1;
                }
                if !(capped.form_at(x, y) < 0.0) {
                    tally.capped += 1;
                }
            }
            tally
        })
        .reduce(|| Tally::EMPTY, Tally::merge);

    Ok(ContainmentReport {
        a,
        t,
        lemma_applies: a < CRITICAL_SIZE,
        shrunk_size: shrunk.a,
        lens_points: tally.lens,
        k_violations: tally.k,
        substituted_violations: tally.substituted,
        containment_violations: tally.contained,
        capped_violations: tally.capped,
        min_k: tally.min_k,
    })
}

/// Homogeneous coordinates `[1, x, y]` of a Cartesian point.
pub fn hom(p: &Point2<f64>) -> Vector3<f64> {
    Vector3::new(1.0, p.x, p.y)
}

/// Point of the horocycle's boundary at ellipse parameter `phi`.
pub fn boundary_point(h: &Horocycle, phi: f64) -> Point2<f64> {
    let (s, c) = h.theta.sin_cos();
    let radial = Vector2::new(c, s);
    let tangential = Vector2::new(-s, c);
    let (major, minor) = h.semi_axes();
    h.center() + tangential * (major * phi.cos()) + radial * (minor * phi.sin())
}

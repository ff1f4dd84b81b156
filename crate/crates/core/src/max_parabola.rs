//! Maximal parabola inscribed in an intersection of half-planes.
//!
//! For a fixed axis direction `d`, a parabola with apex `v` and parameter `p`
//! lies in `{x : n·x ≤ o}` iff `n·d < 0` and
//!
//! ```text
//! n·v + p β² / (2α) ≤ o,     α = −n·d,  β = n × d,
//! ```
//!
//! which is linear in `(v, p)`. The solver therefore maximizes `p` exactly by
//! linear programming for each direction and searches the direction with a
//! multi-start derivative-free pattern search.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Point2, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exparabola::{Side, Triangle};
use crate::lp::{maximize, LpOutcome};
use crate::parabola::{parabola_from_apex, support_value, Parabola};
use crate::projective::HomLine;

/// Tolerance on the opening direction for half-plane containment.
pub const RECESSION_TOL: f64 = 1e-12;
/// Relative tolerance of the tangency test in [`parabola_in_halfplane`].
pub const TANGENCY_TOL: f64 = 1e-9;
/// Containment residual allowed at a reported optimum, relative to the scale.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Slack under which a constraint counts as active, relative to the scale.
pub const ACTIVE_TOL: f64 = 1e-9;
/// Relative parameter agreement for a start to count as converged to the optimum.
pub const AGREEMENT_TOL: f64 = 1e-6;
/// Parameters beyond this multiple of the scale are reported as unbounded.
pub const UNBOUNDED_FACTOR: f64 = 1e6;

/// Closed half-plane `{x : normal · x ≤ offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Vector2<f64>,
    pub offset: f64,
}

impl HalfPlane {
    /// Requires a unit normal (within `1e-12`).
    pub fn new(normal: Vector2<f64>, offset: f64) -> Result<Self> {
        if !normal.x.is_finite() || !normal.y.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidInput("half-plane has non-finite data".into()));
        }
        if (normal.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("half-plane normal has length {}", normal.norm())));
        }
        Ok(Self { normal, offset })
    }

    /// Rescales `(normal, offset)` so that the normal has unit length.
    pub fn normalized(normal: Vector2<f64>, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidInput("half-plane normal is zero".into()));
        }
        Self::new(normal / len, offset / len)
    }

    pub fn contains(&self, p: &Point2<f64>) -> bool {
        self.normal.dot(&p.coords) <= self.offset
    }

    pub fn boundary(&self) -> HomLine {
        HomLine::from_normal_offset([self.normal.x, self.normal.y], self.offset).expect("unit normal")
    }

    fn complement(&self) -> HalfPlane {
        HalfPlane { normal: -self.normal, offset: -self.offset }
    }
}

/// Intersection of finitely many half-planes.
///
/// `tangent` lists half-planes whose boundary the parabola is required to
/// touch. A region that admits any inscribed parabola also admits arbitrarily
/// large ones (it contains a translate of its recession cone), so a finite
/// maximum needs such contact conditions, as in the definition of exparabolas.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRegion {
    pub halfplanes: Vec<HalfPlane>,
    pub tangent: Vec<usize>,
}

impl ConvexRegion {
    pub fn new(halfplanes: Vec<HalfPlane>) -> Result<Self> {
        Self::with_tangencies(halfplanes, Vec::new())
    }

    pub fn with_tangencies(halfplanes: Vec<HalfPlane>, mut tangent: Vec<usize>) -> Result<Self> {
        if halfplanes.is_empty() {
            return Err(Error::InvalidInput("region needs at least one half-plane".into()));
        }
        if let Some(&i) = tangent.iter().find(|&&i| i >= halfplanes.len()) {
            return Err(Error::InvalidInput(format!("tangency index {i} is out of range")));
        }
        tangent.sort_unstable();
        tangent.dedup();
        Ok(Self { halfplanes, tangent })
    }

    /// The negative half-plane of `side` intersected with the positive
    /// half-planes of the other two sides, with contact required on all three
    /// side lines: the maximum is the exparabola of `side`.
    pub fn exparabola_region(t: &Triangle, side: Side) -> Self {
        Self { tangent: vec![0, 1, 2], ..Self::side_region(t, side) }
    }

    /// The same half-planes without contact conditions.
    pub fn side_region(t: &Triangle, side: Side) -> Self {
        let halfplanes = Side::ALL
            .iter()
            .map(|&s| {
                let (normal, offset) = t.positive_halfplane(s);
                let h = HalfPlane { normal, offset };
                if s == side {
                    h.complement()
                } else {
                    h
                }
            })
            .collect();
        Self { halfplanes, tangent: Vec::new() }
    }

    pub fn contains(&self, p: &Point2<f64>) -> bool {
        self.halfplanes.iter().all(|h| h.contains(p))
    }

    pub fn with(&self, h: HalfPlane) -> Self {
        let mut halfplanes = self.halfplanes.clone();
        halfplanes.push(h);
        Self { halfplanes, tangent: self.tangent.clone() }
    }
}

/// Whether the closed interior of `p` lies in the half-plane `h`.
///
/// Requires the opening direction to point into `h`, the apex to satisfy the
/// inequality, and the boundary line not to cut the parabola transversally.
pub fn parabola_in_halfplane(p: &Parabola, h: &HalfPlane) -> bool {
    if h.normal.dot(&p.axis_direction()) > RECESSION_TOL {
        return false;
    }
    if !h.contains(&p.apex()) {
        return false;
    }
    p.conic().line_discriminant(&h.boundary()) >= -TANGENCY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxParabolaOptions {
    pub starts: usize,
    pub seed: u64,
    /// Reference length for tolerances and the unboundedness threshold.
    pub scale: f64,
    /// Angular step (radians) at which the pattern search stops.
    pub step_tol: f64,
}

impl Default for MaxParabolaOptions {
    fn default() -> Self {
        Self { starts: 64, seed: 0, scale: 1e3, step_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub starts: usize,
    /// Starts whose parameter is within [`AGREEMENT_TOL`] of the best.
    pub agreeing_starts: usize,
    /// Largest apex or parameter deviation among agreeing starts (length units).
    pub spread: f64,
    /// Largest axis-angle deviation among agreeing starts (radians).
    pub angle_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxParabolaSolution {
    pub parabola: Parabola,
    pub apex: Point2<f64>,
    pub axis_angle: f64,
    pub parameter: f64,
    /// Indices of the half-planes whose boundary touches the parabola.
    pub active_constraints: Vec<usize>,
    /// Largest support-function excess over all half-planes.
    pub max_residual: f64,
    pub convergence: Convergence,
}

/// Interior point of the region maximizing the distance to the boundary,
/// capped at `scale`, with that distance.
pub fn chebyshev_center(region: &ConvexRegion, scale: f64) -> (Point2<f64>, f64) {
    let mut rows: Vec<Vec<f64>> = region.halfplanes.iter().map(|h| vec![h.normal.x, h.normal.y, 1.0]).collect();
    let mut rhs: Vec<f64> = region.halfplanes.iter().map(|h| h.offset).collect();
    rows.push(vec![0.0, 0.0, 1.0]);
    rhs.push(scale);
    let r0 = rhs.iter().copied().fold(f64::INFINITY, f64::min);
    match maximize(&[0.0, 0.0, 1.0], &rows, &rhs, &[0.0, 0.0, r0]) {
        LpOutcome::Optimal { x, .. } => (Point2::new(x[0], x[1]), x[2]),
        LpOutcome::Unbounded => (Point2::origin(), scale),
        LpOutcome::Infeasible { .. } => (Point2::origin(), f64::NEG_INFINITY),
    }
}

/// Open arc of axis angles for which every half-plane has `n · d < 0`,
/// returned as `(center, lo, hi)` with the arc `center + (lo, hi)`.
fn feasible_arc(region: &ConvexRegion) -> Option<(f64, f64, f64)> {
    let inward = |h: &HalfPlane| (-h.normal.y).atan2(-h.normal.x);
    let c0 = inward(&region.halfplanes[0]);
    let (mut lo, mut hi) = (-FRAC_PI_2, FRAC_PI_2);
    for h in &region.halfplanes[1..] {
        let mut delta = (inward(h) - c0).rem_euclid(TAU);
        if delta > PI {
            delta -= TAU;
        }
        lo = lo.max(delta - FRAC_PI_2);
        hi = hi.min(delta + FRAC_PI_2);
    }
    (hi - lo > 1e-12).then_some((c0, lo, hi))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    angle: f64,
    apex: Point2<f64>,
    p: f64,
    /// `p` when feasible, minus the phase-one infeasibility otherwise.
    score: f64,
}

impl Candidate {
    fn feasible(&self) -> bool {
        self.score >= 0.0
    }
}

struct Problem<'a> {
    region: &'a ConvexRegion,
    witness: Point2<f64>,
    limit: f64,
    /// Angles handled by the search are relative to this arc center.
    center: f64,
}

impl Problem<'_> {
    /// Largest parameter for the relative axis angle `phi` with its apex.
    fn best_at(&self, phi: f64) -> Result<Candidate> {
        let d = Vector2::new((self.center + phi).cos(), (self.center + phi).sin());
        let mut rows = Vec::with_capacity(self.region.halfplanes.len() + 1);
        let mut rhs = Vec::with_capacity(self.region.halfplanes.len() + 1);
        for (i, h) in self.region.halfplanes.iter().enumerate() {
            let alpha = -h.normal.dot(&d);
            let beta = h.normal.perp(&d);
            if !(alpha > 0.0) {
                return Ok(Candidate { angle: phi, apex: self.witness, p: 0.0, score: f64::NEG_INFINITY });
            }
            let w = beta * beta / (2.0 * alpha);
            rows.push(vec![h.normal.x, h.normal.y, w]);
            rhs.push(h.offset);
            if self.region.tangent.binary_search(&i).is_ok() {
                rows.push(vec![-h.normal.x, -h.normal.y, -w]);
                rhs.push(-h.offset);
            }
        }
        rows.push(vec![0.0, 0.0, -1.0]);
        rhs.push(0.0);
        match maximize(&[0.0, 0.0, 1.0], &rows, &rhs, &[self.witness.x, self.witness.y, 0.0]) {
            LpOutcome::Optimal { x, .. } if x[2] <= self.limit => {
                let x = polish_vertex(&rows, &rhs, Vector3::new(x[0], x[1], x[2]));
                Ok(Candidate { angle: phi, apex: Point2::new(x.x, x.y), p: x.z, score: x.z })
            }
            LpOutcome::Infeasible { infeasibility } => {
                Ok(Candidate { angle: phi, apex: self.witness, p: 0.0, score: -infeasibility })
            }
            _ => Err(Error::UnboundedParameter),
        }
    }

    /// Pattern search on the axis angle within the open arc `(lo, hi)`.
    fn climb(&self, start: f64, lo: f64, hi: f64, step_tol: f64) -> Result<Candidate> {
        let mut best = self.best_at(start)?;
        let mut step = (hi - lo) / 16.0;
        let mut iterations = 0;
        while step >= step_tol && iterations < 100_000 {
            iterations += 1;
            let mut moved = false;
            for phi in [best.angle + step, best.angle - step] {
                if phi <= lo || phi >= hi {
                    continue;
                }
                let c = self.best_at(phi)?;
                if c.score > best.score {
                    best = c;
                    moved = true;
                    break;
                }
            }
            step = if moved { (step * 2.0).min(hi - lo) } else { step * 0.5 };
        }
        if best.feasible() {
            best = self.refine(best, lo, hi)?;
        }
        Ok(best)
    }

    /// Comparing values resolves a smooth maximum only to about `√ε` in the
    /// angle. Bisecting on the sign of a central-difference slope does better;
    /// the result is kept only if it does not lose parameter, which rejects it
    /// at kinks of the profile.
    fn refine(&self, best: Candidate, lo: f64, hi: f64) -> Result<Candidate> {
        const H: f64 = 1e-6;
        let slope = |phi: f64| -> Result<Option<f64>> {
            if phi - H <= lo || phi + H >= hi {
                return Ok(None);
            }
            let (a, b) = (self.best_at(phi - H)?, self.best_at(phi + H)?);
            Ok((a.feasible() && b.feasible()).then_some(b.p - a.p))
        };
        let (mut left, mut right) = (best.angle - 16.0 * H, best.angle + 16.0 * H);
        match (slope(left)?, slope(right)?) {
            (Some(l), Some(r)) if l > 0.0 && r < 0.0 => {}
            _ => return Ok(best),
        }
        for _ in 0..60 {
            let mid = 0.5 * (left + right);
            match slope(mid)? {
                Some(m) if m > 0.0 => left = mid,
                Some(_) => right = mid,
                None => return Ok(best),
            }
        }
        let refined = self.best_at(0.5 * (left + right))?;
        if refined.feasible() && refined.p >= best.p * (1.0 - 4.0 * f64::EPSILON) {
            Ok(refined)
        } else {
            Ok(best)
        }
    }
}

/// Re-solves the three active constraints of an LP vertex as a linear system,
/// removing the rounding accumulated by the tableau. Falls back to `x` when
/// the vertex is degenerate or the polished point is not better.
fn polish_vertex(rows: &[Vec<f64>], rhs: &[f64], x: Vector3<f64>) -> Vector3<f64> {
    let mut active: Vec<(Vector3<f64>, f64)> = Vec::with_capacity(3);
    for (row, &b) in rows.iter().zip(rhs) {
        let r = Vector3::new(row[0], row[1], row[2]);
        let norm = r.norm();
        if (b - r.dot(&x)).abs() > 1e-9 * norm * (1.0 + x.norm()) {
            continue;
        }
        // Equalities appear as opposite pairs; keep one representative.
        let unit = r / norm;
        if active.iter().any(|(a, _)| (a.normalize() + unit).norm() < 1e-12 || (a.normalize() - unit).norm() < 1e-12) {
            continue;
        }
        active.push((r, b));
    }
    if active.len() != 3 {
        return x;
    }
    let m = Matrix3::from_rows(&[active[0].0.transpose(), active[1].0.transpose(), active[2].0.transpose()]);
    let Some(y) = m.lu().solve(&Vector3::new(active[0].1, active[1].1, active[2].1)) else {
        return x;
    };
    let feasible = rows.iter().zip(rhs).all(|(row, &b)| {
        let r = Vector3::new(row[0], row[1], row[2]);
        r.dot(&y) <= b + 1e-9 * r.norm() * (1.0 + y.norm())
    });
    if feasible && y.iter().all(|v| v.is_finite()) && (y - x).norm() <= 1e-6 * (1.0 + x.norm()) {
        y
    } else {
        x
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Starting angles (relative to the arc center): inward normals, bisectors
/// of normal pairs, then stratified jittered samples of the arc.
fn start_angles(region: &ConvexRegion, c0: f64, lo: f64, hi: f64, starts: usize, seed: u64) -> Vec<f64> {
    let width = hi - lo;
    let inside = |rel: f64| rel.clamp(lo + 0.01 * width, hi - 0.01 * width);
    let rel = |v: Vector2<f64>| wrap_angle(v.y.atan2(v.x) - c0);
    let normals: Vec<Vector2<f64>> = region.halfplanes.iter().map(|h| -h.normal).collect();
    let mut seeds: Vec<f64> = normals.iter().map(|n| inside(rel(*n))).collect();
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let s = normals[i] + normals[j];
            if s.norm() > 1e-9 {
                seeds.push(inside(rel(s)));
            }
        }
    }
    seeds.truncate(starts / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rest = starts.saturating_sub(seeds.len());
    for k in 0..rest {
        let u: f64 = rng.gen();
        seeds.push(lo + width * (k as f64 + u) / rest as f64);
    }
    seeds.into_iter().map(|s| s.clamp(lo + 1e-3 * width, hi - 1e-3 * width)).collect()
}

/// Maximal-parameter parabola contained in the region and touching the
/// boundaries listed in `region.tangent`.
///
/// Errors: [`Error::EmptyRegion`] when the region has no interior,
/// [`Error::NoInscribedParabola`] when no axis direction points into every
/// half-plane (e.g. parallel boundaries) or no axis direction satisfies the
/// contact conditions, [`Error::UnboundedParameter`] when the parameter can
/// exceed `1e6 · scale`.
pub fn solve_max_parabola(region: &ConvexRegion, options: &MaxParabolaOptions) -> Result<MaxParabolaSolution> {
    if options.starts == 0 {
        return Err(Error::InvalidInput("at least one start is required".into()));
    }
    if !(options.scale > 0.0) || !(options.step_tol > 0.0) {
        return Err(Error::InvalidInput("scale and step tolerance must be positive".into()));
    }
    let scale = options.scale;
    let (witness, radius) = chebyshev_center(region, scale);
    if !(radius > 1e-12 * scale) {
        return Err(Error::EmptyRegion);
    }
    let (c0, lo, hi) = feasible_arc(region).ok_or(Error::NoInscribedParabola)?;
    let problem = Problem { region, witness, limit: UNBOUNDED_FACTOR * scale, center: c0 };
    let seeds = start_angles(region, c0, lo, hi, options.starts, options.seed);
    let results: Vec<Candidate> = seeds
        .par_iter()
        .map(|&s| problem.climb(s, lo, hi, options.step_tol))
        .collect::<Result<_>>()?;

    let best = *results
        .iter()
        .reduce(|a, b| if b.score > a.score { b } else { a })
        .expect("at least one start");
    if !best.feasible() || !(best.p > 0.0) {
        return Err(Error::NoInscribedParabola);
    }
    let agreeing: Vec<&Candidate> =
        results.iter().filter(|c| c.feasible() && best.p - c.p <= AGREEMENT_TOL * best.p).collect();
    let spread = agreeing
        .iter()
        .map(|c| (c.apex - best.apex).norm().max((c.p - best.p).abs()))
        .fold(0.0, f64::max);
    let angle_spread = agreeing.iter().map(|c| (c.angle - best.angle).abs()).fold(0.0, f64::max);

    let axis_angle = wrap_angle(c0 + best.angle);
    let parabola = parabola_from_apex(best.apex, axis_angle, best.p)?;
    let d = parabola.axis_direction();
    let mut active_constraints = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for (i, h) in region.halfplanes.iter().enumerate() {
        let excess = support_value(best.apex, d, best.p, &h.normal) - h.offset;
        max_residual = max_residual.max(excess);
        if excess >= -ACTIVE_TOL * scale {
            active_constraints.push(i);
        }
    }
    if max_residual > FEASIBILITY_TOL * scale {
        return Err(Error::VerificationFailure {
            check: "containment".into(),
            detail: format!("support excess {max_residual:e} at the optimum"),
        });
    }
    Ok(MaxParabolaSolution {
        parabola,
        apex: best.apex,
        axis_angle,
        parameter: best.p,
        active_constraints,
        max_residual,
        convergence: Convergence { starts: results.len(), agreeing_starts: agreeing.len(), spread, angle_spread },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exparabola::{exparabola_for_side, tests::random_triangle};
    use nalgebra::Rotation2;

    fn hp(nx: f64, ny: f64, o: f64) -> HalfPlane {
        HalfPlane::normalized(Vector2::new(nx, ny), o).unwrap()
    }

    fn region_of(t: &Triangle, side: Side) -> ConvexRegion {
        ConvexRegion::exparabola_region(t, side)
    }

    #[test]
    fn side_region_without_contacts_is_unbounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..10 {
            let t = random_triangle(&mut rng);
            for side in Side::ALL {
                let region = ConvexRegion::side_region(&t, side);
                assert_eq!(solve_max_parabola(&region, &MaxParabolaOptions::default()), Err(Error::UnboundedParameter));
            }
        }
    }

    #[test]
    fn tangency_index_validation() {
        assert!(ConvexRegion::with_tangencies(vec![hp(0.0, 1.0, 0.0)], vec![1]).is_err());
    }

    #[test]
    fn halfplane_examples() {
        // x² = 4y
        let p = parabola_from_apex(Point2::origin(), FRAC_PI_2, 2.0).unwrap();
        assert!(parabola_in_halfplane(&p, &hp(0.0, -1.0, 1.0)));
        assert!(parabola_in_halfplane(&p, &hp(0.0, -1.0, 0.0)));
        assert!(!parabola_in_halfplane(&p, &hp(0.0, 1.0, 10.0)));
        assert!(!parabola_in_halfplane(&p, &hp(-1.0, 0.0, 0.0)));
        // y ≥ x − 1 is tangent at (2, 1): x² = 4(x − 1) has a double root.
        assert!(parabola_in_halfplane(&p, &hp(1.0, -1.0, 1.0)));
        assert!(!parabola_in_halfplane(&p, &hp(1.0, -1.0, 0.5)));
        assert!(HalfPlane::new(Vector2::new(1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn triangle_example() {
        let t = Triangle::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        let sol = solve_max_parabola(&region_of(&t, Side::AB), &MaxParabolaOptions::default()).unwrap();
        assert!((sol.parameter - 2.0).abs() < 1e-9);
        assert!(sol.apex.coords.norm() < 1e-7);
        assert!((sol.axis_angle + FRAC_PI_2).abs() < 1e-7);
        assert_eq!(sol.active_constraints, vec![0, 1, 2]);
        assert!(sol.convergence.agreeing_starts > 1);
    }

    #[test]
    fn strip_has_no_parabola() {
        let region = ConvexRegion::new(vec![hp(0.0, 1.0, 1.0), hp(0.0, -1.0, 1.0)]).unwrap();
        assert_eq!(solve_max_parabola(&region, &MaxParabolaOptions::default()), Err(Error::NoInscribedParabola));
    }

    #[test]
    fn wedge_is_unbounded() {
        let region = ConvexRegion::new(vec![hp(-1.0, -1.0, 0.0), hp(1.0, -1.0, 0.0)]).unwrap();
        assert_eq!(solve_max_parabola(&region, &MaxParabolaOptions::default()), Err(Error::UnboundedParameter));
        let half = ConvexRegion::new(vec![hp(0.0, -1.0, 0.0)]).unwrap();
        assert_eq!(solve_max_parabola(&half, &MaxParabolaOptions::default()), Err(Error::UnboundedParameter));
    }

    #[test]
    fn empty_region() {
        let region = ConvexRegion::new(vec![hp(1.0, 0.0, -1.0), hp(-1.0, 0.0, -1.0), hp(0.0, -1.0, 0.0)]).unwrap();
        assert_eq!(solve_max_parabola(&region, &MaxParabolaOptions::default()), Err(Error::EmptyRegion));
    }

    #[test]
    fn agrees_with_the_exparabolas() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let t = random_triangle(&mut rng);
            for side in Side::ALL {
                let want = exparabola_for_side(&t, side).unwrap().parabola;
                let sol = solve_max_parabola(&region_of(&t, side), &MaxParabolaOptions::default()).unwrap();
                assert!((sol.parameter - want.parameter()).abs() <= 1e-6 * want.parameter());
                assert!((sol.apex - want.apex()).norm() <= 1e-5 * t.diameter());
                assert!(sol.max_residual <= FEASIBILITY_TOL * 1e3);
                for h in &region_of(&t, side).halfplanes {
                    assert!(parabola_in_halfplane(&sol.parabola, h));
                }
            }
        }
    }

    #[test]
    fn adding_a_halfplane_never_helps() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let t = random_triangle(&mut rng);
            let region = region_of(&t, Side::BC);
            let base = solve_max_parabola(&region, &MaxParabolaOptions::default()).unwrap();
            let phi = rng.gen_range(-PI..PI);
            let n = Vector2::new(phi.cos(), phi.sin());
            // Keep the apex feasible so the region stays nonempty.
            let extra = HalfPlane::new(n, n.dot(&base.apex.coords) + rng.gen_range(0.0..2.0)).unwrap();
            match solve_max_parabola(&region.with(extra), &MaxParabolaOptions::default()) {
                Ok(sol) => assert!(sol.parameter <= base.parameter * (1.0 + 1e-9)),
                Err(e) => assert_eq!(e, Error::NoInscribedParabola),
            }
        }
    }

    #[test]
    fn extra_halfplanes_keep_a_unique_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut solved = 0;
        for _ in 0..20 {
            let t = random_triangle(&mut rng);
            let mut region = region_of(&t, Side::AB);
            let base = exparabola_for_side(&t, Side::AB).unwrap().parabola;
            for _ in 0..rng.gen_range(1..=3) {
                let phi = rng.gen_range(-PI..PI);
                let n = Vector2::new(phi.cos(), phi.sin());
                let h = HalfPlane::new(n, n.dot(&base.apex().coords) + rng.gen_range(0.0..1.0)).unwrap();
                region = region.with(h);
            }
            let Ok(sol) = solve_max_parabola(&region, &MaxParabolaOptions::default()) else { continue };
            solved += 1;
            assert!(sol.parameter <= base.parameter() * (1.0 + 1e-9));
            assert!(sol.convergence.spread <= 1e-4 * 1e3);
            assert!(sol.active_constraints.len() >= 3);
            for h in &region.halfplanes {
                assert!(parabola_in_halfplane(&sol.parabola, h));
            }
        }
        assert!(solved >= 5);
    }

    #[test]
    fn equivariant_under_rigid_motions() {
        let t = Triangle::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(1.0, 3.0)).unwrap();
        let base = solve_max_parabola(&region_of(&t, Side::CA), &MaxParabolaOptions::default()).unwrap();
        let rot = *Rotation2::new(0.7).matrix();
        let shift = Vector2::new(-2.0, 5.0);
        let moved = t.mapped(&rot, &shift).unwrap();
        let sol = solve_max_parabola(&region_of(&moved, Side::CA), &MaxParabolaOptions::default()).unwrap();
        assert!((sol.parameter - base.parameter).abs() < 1e-9 * base.parameter);
        assert!((sol.apex - Point2::from(rot * base.apex.coords + shift)).norm() < 1e-7);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let t = Triangle::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(1.0, 3.0)).unwrap();
        let options = MaxParabolaOptions { seed: 5, ..Default::default() };
        let a = solve_max_parabola(&region_of(&t, Side::AB), &options).unwrap();
        let b = solve_max_parabola(&region_of(&t, Side::AB), &options).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arc_of_a_triangle_region() {
        let t = Triangle::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        let (c0, lo, hi) = feasible_arc(&region_of(&t, Side::AB)).unwrap();
        // Outward normals (0,1), (1,1)/√2, (−1,1)/√2 admit directions strictly
        // between −3π/4 and −π/4.
        assert!((wrap_angle(c0 + lo) + 0.75 * PI).abs() < 1e-12);
        assert!((wrap_angle(c0 + hi) + 0.25 * PI).abs() < 1e-12);
    }
}

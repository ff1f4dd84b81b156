//! Minimal enclosing horocycle of a finite point set.
//!
//! With the ideal point fixed at angle `θ`, the smallest enclosing horocycle
//! has size `a(θ) = max_p min_size_for_point(θ, p)`. The minimal enclosing
//! horocycle minimizes this continuous profile over the circle; the search is
//! a dense grid scan followed by golden-section refinement of every local
//! minimum of the grid.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::horocycle::{min_size_for_point, HoroPoint, Horocycle};

/// Points within this distance of the optimal size count as support points.
pub const SUPPORT_TOL: f64 = 1e-8;
/// Refined minima within this distance of the optimum are tied.
pub const TIE_TOL: f64 = 1e-7;
/// Tied minimizers closer than this (radians) are the same minimizer.
pub const SAME_ANGLE_TOL: f64 = 1e-6;
/// The optimum must lie this far below `2^{-1/2}` to be certified unique.
pub const UNIQUENESS_MARGIN: f64 = 1e-9;
/// Allowed excess of a point's required size over the reported size.
pub const ENCLOSURE_TOL: f64 = 1e-10;

/// Nonempty set of points strictly inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<HoroPoint>,
}

impl PointSet {
    pub fn new(points: Vec<HoroPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point set is empty".into()));
        }
        Ok(Self { points })
    }

    pub fn from_coords(coords: &[[f64; 2]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| HoroPoint::new(c[0], c[1])).collect::<Result<_>>()?)
    }
}

/// Size of the smallest enclosing horocycle with ideal point at angle `theta`.
pub fn size_profile(ps: &PointSet, theta: f64) -> f64 {
    ps.points.iter().map(|p| min_size_for_point(theta, p)).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinHorocycleOptions {
    pub grid: usize,
    /// Golden-section stopping width (radians).
    pub refine_tol: f64,
    /// Shift of the grid as a fraction of one cell, in `[0, 1)`.
    pub grid_offset: f64,
}

impl Default for MinHorocycleOptions {
    fn default() -> Self {
        Self { grid: 720, refine_tol: 1e-12, grid_offset: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub theta: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinHorocycleSolution {
    pub horocycle: Horocycle,
    /// Indices of the points on the boundary (within [`SUPPORT_TOL`]).
    pub support: Vec<usize>,
    pub unique: bool,
    /// All refined minimizers whose size is within [`TIE_TOL`] of the optimum.
    pub minimizers: Vec<ProfileSample>,
    /// The grid scan of the profile.
    pub profile: Vec<ProfileSample>,
}

impl MinHorocycleSolution {
    pub fn theta(&self) -> f64 {
        self.horocycle.theta
    }

    pub fn size(&self) -> f64 {
        self.horocycle.a
    }
}

fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> ProfileSample {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
        if x1 >= x2 {
            break;
        }
    }
    if f1 <= f2 {
        ProfileSample { theta: x1, a: f1 }
    } else {
        ProfileSample { theta: x2, a: f2 }
    }
}

/// Comparing values locates a smooth minimum only to about `√ε`; bisecting on
/// the sign of a central-difference slope does better. The result is kept
/// only if it does not increase the size, which rejects it at kinks.
fn refine_slope(f: impl Fn(f64) -> f64, best: ProfileSample) -> ProfileSample {
    const H: f64 = 1e-6;
    let slope = |t: f64| f(t + H) - f(t - H);
    let (mut left, mut right) = (best.theta - 16.0 * H, best.theta + 16.0 * H);
    if !(slope(left) < 0.0 && slope(right) > 0.0) {
        return best;
    }
    for _ in 0..60 {
        let mid = 0.5 * (left + right);
        if slope(mid) < 0.0 {
            left = mid;
        } else {
            right = mid;
        }
    }
    let theta = 0.5 * (left + right);
    let a = f(theta);
    if a <= best.a {
        ProfileSample { theta, a }
    } else {
        best
    }
}

/// Minimal enclosing horocycle of the point set.
///
/// `unique` is certified when the minimal size is below `2^{-1/2}` by more
/// than [`UNIQUENESS_MARGIN`] and all tied minimizers coincide.
pub fn solve_min_horocycle(ps: &PointSet, options: &MinHorocycleOptions) -> Result<MinHorocycleSolution> {
    if options.grid < 3 {
        return Err(Error::InvalidInput("grid needs at least three angles".into()));
    }
    if !(options.refine_tol > 0.0) || !(0.0..1.0).contains(&options.grid_offset) {
        return Err(Error::InvalidInput("invalid refinement tolerance or grid offset".into()));
    }
    let n = options.grid;
    let step = TAU / n as f64;
    let profile: Vec<ProfileSample> = (0..n)
        .into_par_iter()
        .map(|k| {
            let theta = step * (k as f64 + options.grid_offset);
            ProfileSample { theta, a: size_profile(ps, theta) }
        })
        .collect();

    let f = |theta: f64| size_profile(ps, theta);
    let local: Vec<usize> = (0..n)
        .filter(|&k| {
            let a = profile[k].a;
            a <= profile[(k + n - 1) % n].a && a <= profile[(k + 1) % n].a
        })
        .collect();
    let mut refined: Vec<ProfileSample> = local
        .par_iter()
        .map(|&k| {
            let center = profile[k].theta;
            let g = golden_section(f, center - step, center + step, options.refine_tol);
            let g = refine_slope(f, g);
            let best = if g.a <= profile[k].a { g } else { profile[k] };
            ProfileSample { theta: wrap(best.theta), a: best.a }
        })
        .collect();
    if refined.is_empty() {
        // A profile without grid minima cannot occur on a circle; keep the argmin.
        let k = (0..n).min_by(|&i, &j| profile[i].a.total_cmp(&profile[j].a)).expect("nonempty grid");
        refined.push(profile[k]);
    }

    let best = *refined.iter().min_by(|x, y| x.a.total_cmp(&y.a).then(x.theta.total_cmp(&y.theta))).expect("nonempty");
    let mut minimizers: Vec<ProfileSample> = Vec::new();
    let mut tied: Vec<ProfileSample> = refined.into_iter().filter(|s| s.a <= best.a + TIE_TOL).collect();
    tied.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.theta.total_cmp(&y.theta)));
    for s in tied {
        if minimizers.iter().all(|m| angular_distance(m.theta, s.theta) > SAME_ANGLE_TOL) {
            minimizers.push(s);
        }
    }
    let unique = best.a < FRAC_1_SQRT_2 - UNIQUENESS_MARGIN && minimizers.len() == 1;
    let support = ps
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| min_size_for_point(best.theta, p) >= best.a - SUPPORT_TOL)
        .map(|(i, _)| i)
        .collect();
    Ok(MinHorocycleSolution { horocycle: Horocycle::new(best.theta, best.a)?, support, unique, minimizers, profile })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    /// `a − max_p min_size(θ, p)`; nonnegative when every point is enclosed.
    pub enclosure_margin: f64,
    pub perturbations: usize,
    /// Smallest `size_profile(θ + δ) − a` over the sampled perturbations.
    pub min_perturbation_excess: f64,
    /// Grid angles checked for a second horocycle of the optimal size.
    pub uniqueness_angles: usize,
}

/// Independent checks of a solution: enclosure, local optimality under
/// perturbations `δ ∈ ±[1e-6, 1e-2]`, and, when uniqueness is claimed, the
/// absence of another enclosing horocycle of the same size at grid angles.
pub fn verify_solution(
    ps: &PointSet,
    sol: &MinHorocycleSolution,
    perturbations: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let (theta, a) = (sol.theta(), sol.size());
    let enclosure_margin = a - size_profile(ps, theta);
    if enclosure_margin < -ENCLOSURE_TOL {
        return Err(Error::VerificationFailure {
            check: "enclosure".into(),
            detail: format!("a point needs size {} > {a}", a - enclosure_margin),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_perturbation_excess = f64::INFINITY;
    for _ in 0..perturbations {
        let magnitude = 10f64.powf(rng.gen_range(-6.0..=-2.0));
        let delta = if rng.gen::<bool>() { magnitude } else { -magnitude };
        let excess = size_profile(ps, theta + delta) - a;
        min_perturbation_excess = min_perturbation_excess.min(excess);
        if excess < -1e-12 {
            return Err(Error::VerificationFailure {
                check: "local_optimality".into(),
                detail: format!("size {} at θ + {delta:e} is below {a}", a + excess),
            });
        }
    }
    let mut uniqueness_angles = 0;
    if sol.unique {
        let grid = sol.profile.len().max(720);
        for k in 0..grid {
            let t = TAU * k as f64 / grid as f64;
            if angular_distance(t, theta) < 1e-4 {
                continue;
            }
            uniqueness_angles += 1;
            let value = size_profile(ps, t);
            if value <= a + 1e-12 {
                return Err(Error::VerificationFailure {
                    check: "uniqueness".into(),
                    detail: format!("horocycle at θ = {t} also has size {value}"),
                });
            }
        }
    }
    Ok(VerificationReport { enclosure_margin, perturbations, min_perturbation_excess, uniqueness_angles })
}

/// Rotates every point by `phi` about the disk center.
pub fn rotated(ps: &PointSet, phi: f64) -> Result<PointSet> {
    let (s, c) = phi.sin_cos();
    PointSet::new(ps.points.iter().map(|p| HoroPoint::new(c * p.x - s * p.y, s * p.x + c * p.y)).collect::<Result<_>>()?)
}

/// Signed angular difference `a − b` wrapped to `(−π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn set(coords: &[[f64; 2]]) -> PointSet {
        PointSet::from_coords(coords).unwrap()
    }

    fn solve(ps: &PointSet) -> MinHorocycleSolution {
        solve_min_horocycle(ps, &MinHorocycleOptions::default()).unwrap()
    }

    pub(crate) fn random_set(rng: &mut ChaCha8Rng) -> PointSet {
        // A cluster away from the center keeps the optimum below 2^{-1/2}.
        let n = rng.gen_range(1..=50);
        let phi = rng.gen_range(0.0..TAU);
        let r0 = rng.gen_range(0.2..0.8);
        let spread = rng.gen_range(0.01..0.3);
        let center = (r0 * phi.cos(), r0 * phi.sin());
        let pts = (0..n)
            .map(|_| loop {
                let (x, y) = (center.0 + spread * rng.gen_range(-1.0..1.0), center.1 + spread * rng.gen_range(-1.0..1.0));
                if x * x + y * y < 0.98 {
                    break HoroPoint::new(x, y).unwrap();
                }
            })
            .collect();
        PointSet::new(pts).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert!((size_profile(&set(&[[0.0, 0.0]]), 1.234) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((size_profile(&set(&[[0.0, 0.5]]), FRAC_PI_2) - 0.5).abs() < 1e-15);
        assert!((size_profile(&set(&[[0.0, 0.5]]), -FRAC_PI_2) - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(PointSet::new(vec![]).is_err());
    }

    #[test]
    fn single_point() {
        let sol = solve(&set(&[[0.0, 0.5]]));
        assert!((sol.theta() - FRAC_PI_2).abs() < 1e-9);
        assert!((sol.size() - 0.5).abs() < 1e-12);
        assert!(sol.unique);
        assert_eq!(sol.support, vec![0]);
    }

    #[test]
    fn center_is_degenerate() {
        let sol = solve(&set(&[[0.0, 0.0]]));
        assert!((sol.size() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(!sol.unique);
        assert!(sol.minimizers.len() > 1);
        assert!(sol.profile.iter().all(|s| (s.a - FRAC_1_SQRT_2).abs() < 1e-12));
        // Any point set containing the center behaves the same.
        let sol = solve(&set(&[[0.0, 0.0], [0.1, 0.05], [-0.2, 0.1]]));
        assert!((sol.size() - FRAC_1_SQRT_2).abs() < 1e-12 || sol.size() > FRAC_1_SQRT_2);
        assert!(!sol.unique);
    }

    #[test]
    fn symmetric_pair() {
        let ps = set(&[[0.3, 0.2], [-0.3, 0.2]]);
        let sol = solve(&ps);
        assert!((sol.theta() - FRAC_PI_2).abs() < 1e-9);
        assert!(sol.unique);
        assert_eq!(sol.support, vec![0, 1]);
        // Grid oracle: no grid angle does better.
        for k in 0..3600 {
            let t = TAU * k as f64 / 3600.0;
            assert!(size_profile(&ps, t) >= sol.size() - 1e-15);
        }
        verify_solution(&ps, &sol, 200, 1).unwrap();
    }

    #[test]
    fn verification_catches_corruption() {
        let ps = set(&[[0.3, 0.2], [-0.1, 0.4]]);
        let mut sol = solve(&ps);
        verify_solution(&ps, &sol, 100, 2).unwrap();
        sol.horocycle.a -= 1e-3;
        match verify_solution(&ps, &sol, 100, 2) {
            Err(Error::VerificationFailure { check, .. }) => assert_eq!(check, "enclosure"),
            other => panic!("unexpected {other:?}"),
        }
        let center = set(&[[0.0, 0.0]]);
        let mut sol = solve(&center);
        verify_solution(&center, &sol, 100, 2).unwrap();
        sol.unique = true;
        match verify_solution(&center, &sol, 100, 2) {
            Err(Error::VerificationFailure { check, .. }) => assert_eq!(check, "uniqueness"),
            other => panic!("unexpected {other:?}"),
        }
        let mut sol = solve(&ps);
        sol.horocycle.theta += 0.05;
        sol.horocycle.a = size_profile(&ps, sol.horocycle.theta);
        match verify_solution(&ps, &sol, 100, 2) {
            Err(Error::VerificationFailure { check, .. }) => assert_eq!(check, "local_optimality"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        for _ in 0..60 {
            let ps = random_set(&mut rng);
            let sol = solve(&ps);
            if sol.size() >= 0.7 {
                continue;
            }
            checked += 1;
            assert!(sol.unique);
            assert!(!sol.support.is_empty());
            for p in &ps.points {
                assert!(sol.size() - min_size_for_point(sol.theta(), p) >= -ENCLOSURE_TOL);
            }
            verify_solution(&ps, &sol, 100, 3).unwrap();
            let offset = MinHorocycleOptions { grid_offset: rng.gen(), ..Default::default() };
            let other = solve_min_horocycle(&ps, &offset).unwrap();
            assert!(angular_distance(other.theta(), sol.theta()) < 1e-6);
            let phi = rng.gen_range(0.0..TAU);
            let turned = solve(&rotated(&ps, phi).unwrap());
            assert!((turned.size() - sol.size()).abs() <= 1e-9 * sol.size());
            assert!(angular_distance(turned.theta(), sol.theta() + phi) < 1e-6);
        }
        assert!(checked > 30);
    }

    #[test]
    fn golden_section_finds_a_parabola_minimum() {
        let s = golden_section(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((s.theta - 0.3).abs() < 1e-7);
        let s = refine_slope(|x| (x - 0.3) * (x - 0.3), s);
        assert!((s.theta - 0.3).abs() < 1e-10);
    }
}

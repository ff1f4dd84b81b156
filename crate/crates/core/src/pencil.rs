//! Sampling checks for convex pencils of conics and of dual conics.
//!
//! A point interior to two conics whose forms are both negative there stays
//! interior to every blend `(1 − t) C₀ + t C₁`. Dually, once two dual
//! parabolas are oriented so that lines missing them get a positive dual form,
//! a line that misses both and keeps both on one side (so it misses the convex
//! hull of their interiors) misses every member of the dual blend, as long as
//! the blend does not pass through a degenerate member. Pairs tangent to three
//! common lines and taken from one arc of their pencil satisfy this.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::parabola::Parabola;
use crate::projective::{adjugate, ConicMatrix, HomLine, HomPoint};

/// Blend weights checked by both suites.
pub const BLEND_WEIGHTS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Lines or points closer than this (relative form) to either conic are skipped.
const MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PencilReport {
    /// Samples that satisfied the hypothesis (inside both, or missing the hull of both).
    pub checked: usize,
    /// Sample and blend weight pairs where the conclusion failed.
    pub violations: usize,
}

/// Draws up to `samples` points of the box `[lo, hi]` interior to both `c0` and
/// `c1`, and checks each against every blend in [`BLEND_WEIGHTS`].
///
/// Both conics are first oriented to be negative at `witness`, which must lie
/// inside both.
pub fn interior_preservation(
    c0: &ConicMatrix,
    c1: &ConicMatrix,
    witness: Point2<f64>,
    lo: Point2<f64>,
    hi: Point2<f64>,
    samples: usize,
    seed: u64,
) -> Result<PencilReport> {
    let w = HomPoint::from_cartesian(witness);
    let c0 = c0.normalize_interior(&w)?;
    let c1 = c1.normalize_interior(&w)?;
    let blends = BLEND_WEIGHTS
        .iter()
        .map(|&t| ConicMatrix::pencil_blend(&c0, &c1, t))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PencilReport { checked: 0, violations: 0 };
    for _ in 0..samples.saturating_mul(64) {
        if report.checked == samples {
            break;
        }
        let p = HomPoint::from_cartesian(Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y)));
        if c0.relative_form(p.coords()) >= -MARGIN || c1.relative_form(p.coords()) >= -MARGIN {
            continue;
        }
        report.checked += 1;
        report.violations += blends.iter().filter(|b| !b.is_interior(&p)).count();
    }
    Ok(report)
}

/// Dual of `p` oriented so that lines missing the parabola have a positive form.
fn oriented_dual(p: &Parabola, witness: &HomLine) -> Result<Matrix3<f64>> {
    let d = adjugate(p.conic().matrix());
    let value = witness.coords().dot(&(d * witness.coords()));
    if value == 0.0 {
        return Err(Error::WitnessOnConic);
    }
    Ok(if value > 0.0 { d } else { -d })
}

/// Whether the line misses the primal conic of the dual matrix `d`.
///
/// The primal conic is `adj(d)` and `adj(adj(d)) = det(d) d`.
fn dual_misses(d: &Matrix3<f64>, u: &HomLine) -> bool {
    d.determinant() * u.coords().dot(&(d * u.coords())) > 0.0
}

fn random_line(rng: &mut ChaCha8Rng, radius: f64) -> HomLine {
    let phi = rng.gen_range(0.0..2.0 * PI);
    let offset = rng.gen_range(-radius..radius);
    HomLine::from_normal_offset([phi.cos(), phi.sin()], offset).expect("unit normal")
}

/// Draws up to `samples` lines at distance below `radius` from the origin that
/// miss both parabolas with both foci on the same side, and checks that each misses every member of the dual
/// blend for the weights in [`BLEND_WEIGHTS`].
pub fn dual_line_preservation(
    p0: &Parabola,
    p1: &Parabola,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<PencilReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let misses = |p: &Parabola, u: &HomLine| p.conic().line_discriminant(u) > MARGIN;
    let side = |p: &Parabola, u: &HomLine| u.coords().dot(HomPoint::from_cartesian(p.focus()).coords()) > 0.0;
    let budget = samples.saturating_mul(64).max(1024);
    let mut lines = Vec::with_capacity(samples);
    for _ in 0..budget {
        if lines.len() == samples {
            break;
        }
        let u = random_line(&mut rng, radius);
        if misses(p0, &u) && misses(p1, &u) && side(p0, &u) == side(p1, &u) {
            lines.push(u);
        }
    }
    let Some(witness) = lines.first() else {
        return Ok(PencilReport { checked: 0, violations: 0 });
    };
    let d0 = oriented_dual(p0, witness)?;
    let d1 = oriented_dual(p1, witness)?;
    let blends: Vec<Matrix3<f64>> = BLEND_WEIGHTS.iter().map(|&t| d0 * (1.0 - t) + d1 * t).collect();
    let violations = lines
        .iter()
        .map(|u| blends.iter().filter(|d| !dual_misses(d, u)).count())
        .sum();
    Ok(PencilReport { checked: lines.len(), violations })
}

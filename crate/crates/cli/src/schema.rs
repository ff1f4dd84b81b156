//! JSON documents read and written by the command-line tool.
//!
//! Points are `[x, y]` pairs, triangles `{"A": .., "B": .., "C": ..}`,
//! half-planes `{"normal": [..], "offset": ..}` meaning `normal · x ≤ offset`,
//! horocycles `{"theta": .., "a": ..}`.

use std::collections::BTreeMap;

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use conic_extrema::exparabola::{Exparabola, Side, Triangle, Vertex};
use conic_extrema::horocycle::Horocycle;
use conic_extrema::max_parabola::{ConvexRegion, HalfPlane, MaxParabolaSolution};
use conic_extrema::min_horocycle::{MinHorocycleSolution, PointSet};
use conic_extrema::parabola::Parabola;

pub type Pt = [f64; 2];

/// Adding `0.0` turns `-0.0` into `0.0`.
pub fn pt(p: &Point2<f64>) -> Pt {
    [p.x + 0.0, p.y + 0.0]
}

/// Longest minimizer list written out; flat profiles tie at every grid angle.
pub const MAX_LISTED_MINIMIZERS: usize = 16;

/// Viewport `[xmin, ymin, xmax, ymax]` for figures.
pub type ViewportJson = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleJson {
    #[serde(rename = "A")]
    pub a: Pt,
    #[serde(rename = "B")]
    pub b: Pt,
    #[serde(rename = "C")]
    pub c: Pt,
}

impl TriangleJson {
    pub fn build(&self) -> conic_extrema::Result<Triangle> {
        Triangle::new(self.a.into(), self.b.into(), self.c.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlaneJson {
    pub normal: Pt,
    pub offset: f64,
    /// Require the parabola to touch the boundary line.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tangent: bool,
}

pub fn build_region(halfplanes: &[HalfPlaneJson]) -> conic_extrema::Result<ConvexRegion> {
    let planes = halfplanes
        .iter()
        .map(|h| HalfPlane::normalized(Vector2::new(h.normal[0], h.normal[1]), h.offset))
        .collect::<conic_extrema::Result<Vec<_>>>()?;
    let tangent = halfplanes.iter().enumerate().filter(|(_, h)| h.tangent).map(|(i, _)| i).collect();
    ConvexRegion::with_tangencies(planes, tangent)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorocycleJson {
    pub theta: f64,
    pub a: f64,
}

impl From<&Horocycle> for HorocycleJson {
    fn from(h: &Horocycle) -> Self {
        Self { theta: h.theta, a: h.a }
    }
}

pub fn point_set(points: &[Pt]) -> conic_extrema::Result<PointSet> {
    PointSet::from_coords(points)
}

// Inputs

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExparabolaInput {
    pub triangle: TriangleJson,
    pub viewport: Option<ViewportJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxParabolaInput {
    pub halfplanes: Vec<HalfPlaneJson>,
    /// Length scale of the region; defaults to the solver's.
    pub scale: Option<f64>,
    pub viewport: Option<ViewportJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaShrinkInput {
    pub a: f64,
    pub omega: f64,
    pub viewport: Option<ViewportJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinHorocycleInput {
    pub points: Vec<Pt>,
    /// Fractional shift of the angle grid, in `[0, 1)`.
    #[serde(default)]
    pub grid_offset: f64,
    pub viewport: Option<ViewportJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyInput {
    pub checks: Vec<CheckSpec>,
    /// Overrides for the default tolerances, keyed by name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Contained,
    /// The lemma does not apply and the capped horocycle misses lens points.
    Violated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    Exparabola {
        triangle: TriangleJson,
    },
    MaxParabola {
        halfplanes: Vec<HalfPlaneJson>,
        scale: Option<f64>,
    },
    LemmaIdentities {
        a: f64,
        t: f64,
    },
    Containment {
        a: f64,
        t: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        expect: Expectation,
    },
    MinHorocycle {
        points: Vec<Pt>,
        #[serde(default = "default_perturbations")]
        perturbations: usize,
    },
}

fn default_samples() -> usize {
    100_000
}

fn default_perturbations() -> usize {
    1000
}

// Outputs

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolaJson {
    pub apex: Pt,
    pub axis_angle: f64,
    pub parameter: f64,
    pub focus: Pt,
    /// Conic matrix scaled to unit Frobenius norm, rows first.
    pub matrix: [[f64; 3]; 3],
}

impl From<&Parabola> for ParabolaJson {
    fn from(p: &Parabola) -> Self {
        let m = p.conic().normalized();
        Self {
            apex: pt(&p.apex()),
            axis_angle: p.axis_angle(),
            parameter: p.parameter(),
            focus: pt(&p.focus()),
            matrix: [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]),
        }
    }
}

pub fn side_name(s: Side) -> &'static str {
    match s {
        Side::AB => "AB",
        Side::BC => "BC",
        Side::CA => "CA",
    }
}

pub fn vertex_name(v: Vertex) -> &'static str {
    match v {
        Vertex::A => "A",
        Vertex::B => "B",
        Vertex::C => "C",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExparabolaJson {
    pub side: String,
    pub opposite: String,
    pub lambda: f64,
    pub parameter: f64,
    pub tangency: Pt,
    /// Canonical frame coordinates `A = (a1, 0)`, `B = (b1, 0)`, `C = (0, c2)`.
    pub frame: [f64; 3],
    pub parabola: ParabolaJson,
}

impl From<&Exparabola> for ExparabolaJson {
    fn from(e: &Exparabola) -> Self {
        Self {
            side: side_name(e.side).into(),
            opposite: vertex_name(e.opposite_vertex).into(),
            lambda: e.lambda,
            parameter: e.parabola.parameter(),
            tangency: pt(&e.tangency),
            frame: [e.frame.a1, e.frame.b1, e.frame.c2],
            parabola: (&e.parabola).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExparabolaOutput {
    pub command: String,
    pub triangle: TriangleJson,
    pub exparabolas: Vec<ExparabolaJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceJson {
    pub starts: usize,
    pub agreeing_starts: usize,
    pub spread: f64,
    pub angle_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxParabolaOutput {
    pub command: String,
    pub halfplanes: Vec<HalfPlaneJson>,
    pub parameter: f64,
    pub apex: Pt,
    pub axis_angle: f64,
    pub active_constraints: Vec<usize>,
    pub max_residual: f64,
    pub convergence: ConvergenceJson,
    pub parabola: ParabolaJson,
}

impl MaxParabolaOutput {
    pub fn new(halfplanes: Vec<HalfPlaneJson>, s: &MaxParabolaSolution) -> Self {
        Self {
            command: "max-parabola".into(),
            halfplanes,
            parameter: s.parameter,
            apex: pt(&s.apex),
            axis_angle: s.axis_angle,
            active_constraints: s.active_constraints.clone(),
            max_residual: s.max_residual,
            convergence: ConvergenceJson {
                starts: s.convergence.starts,
                agreeing_starts: s.convergence.agreeing_starts,
                spread: s.convergence.spread,
                angle_spread: s.convergence.angle_spread,
            },
            parabola: (&s.parabola).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaShrinkOutput {
    pub command: String,
    pub a: f64,
    pub omega: f64,
    #[serde(rename = "H0")]
    pub h0: HorocycleJson,
    #[serde(rename = "H1")]
    pub h1: HorocycleJson,
    /// The shrunk horocycle containing the common interior of `H0` and `H1`.
    #[serde(rename = "H")]
    pub h: HorocycleJson,
    #[serde(rename = "L")]
    pub l: Pt,
    #[serde(rename = "U")]
    pub u: Pt,
    /// `a − size(H)`.
    pub size_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinHorocycleOutput {
    pub command: String,
    pub points: Vec<Pt>,
    pub horocycle: HorocycleJson,
    pub a: f64,
    pub theta: f64,
    pub unique: bool,
    pub support: Vec<usize>,
    pub minimizer_count: usize,
    /// At most [`MAX_LISTED_MINIMIZERS`] of the tied minimizers.
    pub minimizers: Vec<HorocycleJson>,
    pub grid: usize,
}

impl MinHorocycleOutput {
    pub fn new(points: Vec<Pt>, s: &MinHorocycleSolution) -> Self {
        Self {
            command: "min-horocycle".into(),
            points,
            horocycle: (&s.horocycle).into(),
            a: s.size(),
            theta: s.theta(),
            unique: s.unique,
            support: s.support.clone(),
            minimizer_count: s.minimizers.len(),
            minimizers: s.minimizers.iter().take(MAX_LISTED_MINIMIZERS).map(|m| HorocycleJson { theta: m.theta, a: m.a }).collect(),
            grid: s.profile.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub kind: String,
    pub passed: bool,
    /// Measured quantities; keys are sorted.
    pub values: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub command: String,
    pub passed: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
}

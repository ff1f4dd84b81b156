use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use conic_extrema::exparabola::{exparabolas, tangency_gap, Side};
use conic_extrema::horocycle::{
    intersection_points, lemma_pair, lemma_shrink, verify_containment_implication, verify_lemma_identities,
};
use conic_extrema::max_parabola::{parabola_in_halfplane, solve_max_parabola, ConvexRegion, MaxParabolaOptions};
use conic_extrema::min_horocycle::{solve_min_horocycle, verify_solution, MinHorocycleOptions};
use conic_extrema::Error;

use crate::schema::*;
use crate::svg::{Figure, Viewport};
use crate::{CliError, Command, Job};

pub fn execute(job: &Job) -> Result<(), CliError> {
    match job.command {
        Command::Exparabola => exparabola(job),
        Command::MaxParabola => max_parabola(job),
        Command::LemmaShrink => lemma(job),
        Command::MinHorocycle => min_horocycle(job),
        Command::Verify => verify(job),
    }
}

fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write_output<T: Serialize>(job: &Job, doc: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| CliError::Parse(e.to_string()))?;
    text.push('\n');
    write_file(&job.output, &text)
}

fn viewport(v: Option<ViewportJson>, default: Viewport) -> Result<Viewport, CliError> {
    match v {
        None => Ok(default),
        Some(v) => Viewport::from_array(v).ok_or_else(|| CliError::Parse(format!("invalid viewport {v:?}"))),
    }
}

fn exparabola(job: &Job) -> Result<(), CliError> {
    let input: ExparabolaInput = read_input(&job.input)?;
    let vp = viewport(input.viewport, Viewport::PLANE)?;
    let t = input.triangle.build()?;
    let es = exparabolas(&t)?;
    write_output(
        job,
        &ExparabolaOutput {
            command: "exparabola".into(),
            triangle: input.triangle,
            exparabolas: es.iter().map(ExparabolaJson::from).collect(),
        },
    )?;
    if let Some(path) = &job.svg {
        let mut fig = Figure::new(vp);
        for s in Side::ALL {
            let (n, o) = t.positive_halfplane(s);
            fig.line(n, o, "gray");
        }
        fig.polygon(&[t.a, t.b, t.c], "black");
        let colors = ["#d62728", "#1f77b4", "#2ca02c"];
        for (e, color) in es.iter().zip(colors) {
            fig.parabola(&e.parabola, &format!("exparabola-{}", side_name(e.side)), color);
        }
        for (p, name) in [(t.a, "A"), (t.b, "B"), (t.c, "C")] {
            fig.point(&p, Some(name));
        }
        write_file(path, &fig.finish())?;
    }
    Ok(())
}

fn solver_options(job: &Job, scale: Option<f64>) -> Result<MaxParabolaOptions, CliError> {
    let mut options = MaxParabolaOptions { seed: job.seed, ..Default::default() };
    if let Some(starts) = job.starts {
        options.starts = starts;
    }
    if let Some(scale) = scale {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(CliError::Parse(format!("scale must be positive, got {scale}")));
        }
        options.scale = scale;
    }
    Ok(options)
}

fn max_parabola(job: &Job) -> Result<(), CliError> {
    let input: MaxParabolaInput = read_input(&job.input)?;
    let vp = viewport(input.viewport, Viewport::PLANE)?;
    let region = build_region(&input.halfplanes)?;
    let solution = solve_max_parabola(&region, &solver_options(job, input.scale)?)?;
    write_output(job, &MaxParabolaOutput::new(input.halfplanes.clone(), &solution))?;
    if let Some(path) = &job.svg {
        let mut fig = Figure::new(vp);
        for h in &region.halfplanes {
            fig.line(h.normal, h.offset, "gray");
        }
        fig.parabola(&solution.parabola, "max-parabola", "#d62728");
        fig.point(&solution.apex, None);
        write_file(path, &fig.finish())?;
    }
    Ok(())
}

fn lemma(job: &Job) -> Result<(), CliError> {
    let input: LemmaShrinkInput = read_input(&job.input)?;
    let vp = viewport(input.viewport, Viewport::DISK)?;
    let (h0, h1) = lemma_pair(input.a, input.omega)?;
    let (l, u) = intersection_points(input.a, input.omega)?;
    let h = lemma_shrink(input.a, input.omega)?;
    write_output(
        job,
        &LemmaShrinkOutput {
            command: "lemma-shrink".into(),
            a: input.a,
            omega: input.omega,
            h0: (&h0).into(),
            h1: (&h1).into(),
            h: (&h).into(),
            l: pt(&l),
            u: pt(&u),
            size_margin: input.a - h.size(),
        },
    )?;
    if let Some(path) = &job.svg {
        let mut fig = Figure::new(vp);
        fig.unit_circle("N");
        fig.horocycle(&h0, "H0", "#1f77b4");
        fig.horocycle(&h1, "H1", "#2ca02c");
        fig.horocycle(&h, "H", "#d62728");
        fig.point(&l, Some("L"));
        fig.point(&u, Some("U"));
        write_file(path, &fig.finish())?;
    }
    Ok(())
}

fn horocycle_options(job: &Job, grid_offset: f64) -> MinHorocycleOptions {
    let mut options = MinHorocycleOptions { grid_offset, ..Default::default() };
    if let Some(grid) = job.grid {
        options.grid = grid;
    }
    options
}

fn min_horocycle(job: &Job) -> Result<(), CliError> {
    let input: MinHorocycleInput = read_input(&job.input)?;
    let vp = viewport(input.viewport, Viewport::DISK)?;
    let ps = point_set(&input.points)?;
    let solution = solve_min_horocycle(&ps, &horocycle_options(job, input.grid_offset))?;
    write_output(job, &MinHorocycleOutput::new(input.points.clone(), &solution))?;
    if let Some(path) = &job.svg {
        let mut fig = Figure::new(vp);
        fig.unit_circle("N");
        fig.horocycle(&solution.horocycle, "H", "#d62728");
        for p in &ps.points {
            fig.point(&p.point(), None);
        }
        write_file(path, &fig.finish())?;
    }
    Ok(())
}

/// Default tolerances of the verification checks.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        // exparabola tangency residual, relative to the triangle diameter
        ("tangency", 1e-9),
        // agreement of the parameter with the closed form p²(λ), relative
        ("parameter", 1e-9),
        // max-parabola containment residual, relative to the solver scale
        ("residual", 1e-7),
        // R at t = 1 against 4a²(1 − 2a²), relative
        ("r_at_t1", 1e-12),
        // L² − R² against its factorization, relative
        ("factorization", 1e-10),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

struct Check {
    kind: &'static str,
    values: BTreeMap<String, Value>,
    failures: Vec<String>,
}

impl Check {
    fn new(kind: &'static str) -> Self {
        Self { kind, values: BTreeMap::new(), failures: Vec::new() }
    }

    fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.into(), v.into());
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            kind: self.kind.into(),
            passed: self.failures.is_empty(),
            values: self.values,
            message: (!self.failures.is_empty()).then(|| self.failures.join("; ")),
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn check(job: &Job, spec: &CheckSpec, tol: &BTreeMap<String, f64>) -> Result<CheckResult, CliError> {
    match spec {
        CheckSpec::Exparabola { triangle } => {
            let mut c = Check::new("exparabola");
            let t = triangle.build()?;
            let es = exparabolas(&t)?;
            let diam = t.diameter();
            let mut tangency = 0.0f64;
            let mut parameter = 0.0f64;
            let mut placed = 0;
            for e in &es {
                for s in Side::ALL {
                    let (n, o) = t.positive_halfplane(s);
                    tangency = tangency.max(tangency_gap(&e.parabola, &n, o).abs() / diam);
                }
                let p = e.parabola.parameter();
                parameter = parameter.max(relative(e.frame.squared_parameter(e.lambda), p * p));
                if ConvexRegion::side_region(&t, e.side).contains(&e.parabola.focus()) {
                    placed += 1;
                }
            }
            c.value("count", es.len());
            c.value("max_tangency_residual", tangency);
            c.value("max_parameter_deviation", parameter);
            c.value("in_own_region", placed);
            c.require(tangency <= tol["tangency"], || format!("tangency residual {tangency:e}"));
            c.require(parameter <= tol["parameter"], || format!("parameter deviation {parameter:e}"));
            c.require(placed == 3, || format!("only {placed} exparabolas lie in their regions"));
            Ok(c.finish())
        }
        CheckSpec::MaxParabola { halfplanes, scale } => {
            let mut c = Check::new("max-parabola");
            let region = build_region(halfplanes)?;
            let options = solver_options(job, *scale)?;
            let s = solve_max_parabola(&region, &options)?;
            let contained = region.halfplanes.iter().filter(|h| parabola_in_halfplane(&s.parabola, h)).count();
            let touching = region
                .tangent
                .iter()
                .map(|&i| {
                    let h = &region.halfplanes[i];
                    tangency_gap(&s.parabola, &h.normal, h.offset).abs()
                })
                .fold(0.0, f64::max);
            c.value("parameter", s.parameter);
            c.value("max_residual", s.max_residual);
            c.value("contained_in", contained);
            c.value("max_contact_gap", touching);
            c.value("agreeing_starts", s.convergence.agreeing_starts);
            let limit = tol["residual"] * options.scale;
            c.require(s.max_residual <= limit, || format!("residual {:e}", s.max_residual));
            c.require(contained == region.halfplanes.len(), || {
                format!("parabola leaves {} half-planes", region.halfplanes.len() - contained)
            });
            c.require(touching <= limit, || format!("contact gap {touching:e}"));
            Ok(c.finish())
        }
        CheckSpec::LemmaIdentities { a, t } => {
            let mut c = Check::new("lemma-identities");
            let r = verify_lemma_identities(*a, *t)?;
            let at_t1 = relative(r.r_at_t1, r.r_at_t1_expected);
            c.value("a", r.a);
            c.value("t", r.t);
            c.value("r", r.r);
            c.value("r_at_t1", r.r_at_t1);
            c.value("r_at_t1_expected", r.r_at_t1_expected);
            c.value("factorization_residual", r.factorization_residual);
            c.value("size_margin", r.size_margin);
            c.require(r.r_positive, || "R is not positive".into());
            c.require(at_t1 <= tol["r_at_t1"], || format!("R at t = 1 deviates by {at_t1:e}"));
            c.require(r.factorization_residual <= tol["factorization"], || {
                format!("factorization residual {:e}", r.factorization_residual)
            });
            c.require(r.size_margin > 0.0, || format!("size margin {}", r.size_margin));
            c.require(r.monotone_decreasing, || "size is not decreasing in t".into());
            Ok(c.finish())
        }
        CheckSpec::Containment { a, t, samples, expect } => {
            let mut c = Check::new("containment");
            let r = verify_containment_implication(*a, *t, *samples, job.seed)?;
            c.value("a", r.a);
            c.value("t", r.t);
            c.value("expect", serde_json::to_value(expect).expect("enum serializes"));
            c.value("lemma_applies", r.lemma_applies);
            c.value("shrunk_size", r.shrunk_size);
            c.value("lens_points", r.lens_points);
            c.value("containment_violations", r.containment_violations);
            c.value("capped_violations", r.capped_violations);
            c.value("k_violations", r.k_violations);
            match expect {
                Expectation::Contained => {
                    c.require(r.lemma_applies, || "a is not below 2^(-1/2)".into());
                    c.require(r.lens_points > 0, || "no lens points sampled".into());
                    c.require(r.containment_violations == 0, || {
                        format!("{} lens points outside H", r.containment_violations)
                    });
                }
                Expectation::Violated => {
                    c.require(!r.lemma_applies, || "the lemma applies".into());
                    c.require(r.capped_violations > 0, || "no lens point escapes the capped horocycle".into());
                }
            }
            Ok(c.finish())
        }
        CheckSpec::MinHorocycle { points, perturbations } => {
            let mut c = Check::new("min-horocycle");
            let ps = point_set(points)?;
            let s = solve_min_horocycle(&ps, &horocycle_options(job, 0.0))?;
            c.value("a", s.size());
            c.value("theta", s.theta());
            c.value("unique", s.unique);
            c.value("support", json!(s.support));
            c.require(!s.support.is_empty(), || "no support point".into());
            match verify_solution(&ps, &s, *perturbations, job.seed) {
                Ok(r) => {
                    c.value("enclosure_margin", r.enclosure_margin);
                    c.value("min_perturbation_excess", r.min_perturbation_excess);
                    c.value("uniqueness_angles", r.uniqueness_angles);
                }
                Err(Error::VerificationFailure { check, detail }) => c.failures.push(format!("{check}: {detail}")),
                Err(e) => return Err(e.into()),
            }
            Ok(c.finish())
        }
    }
}

fn verify(job: &Job) -> Result<(), CliError> {
    if job.svg.is_some() {
        return Err(CliError::Parse("verify does not produce figures; drop --svg".into()));
    }
    let input: VerifyInput = read_input(&job.input)?;
    let mut tolerances = default_tolerances();
    for (key, value) in &input.tolerances {
        match tolerances.get_mut(key) {
            Some(slot) if *value >= 0.0 && value.is_finite() => *slot = *value,
            Some(_) => return Err(CliError::Parse(format!("tolerance {key} must be a nonnegative number"))),
            None => return Err(CliError::Parse(format!("unknown tolerance {key:?}"))),
        }
    }
    let checks = input.checks.iter().map(|c| check(job, c, &tolerances)).collect::<Result<Vec<_>, _>>()?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    write_output(job, &VerifyOutput { command: "verify".into(), passed: failed == 0, tolerances, checks })?;
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} checks failed", input.checks.len())));
    }
    Ok(())
}

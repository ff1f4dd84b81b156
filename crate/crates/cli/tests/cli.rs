use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conic_extrema_cli::schema::{ExparabolaOutput, LemmaShrinkOutput, MaxParabolaOutput, MinHorocycleOutput, VerifyOutput};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_conic-extrema");

const TRIANGLE: &str = r#"{"triangle": {"A": [-1, 0], "B": [1, 0], "C": [0, 1]}}"#;
const REGION: &str = r#"{"halfplanes": [
    {"normal": [0, 1], "offset": 0, "tangent": true},
    {"normal": [1, 1], "offset": 1, "tangent": true},
    {"normal": [-1, 1], "offset": 1, "tangent": true}]}"#;
const LEMMA: &str = r#"{"a": 0.5, "omega": 0.2}"#;
const POINTS: &str = r#"{"points": [[0.1, 0.2], [-0.2, 0.05], [0.15, -0.1], [0.0, 0.3]]}"#;
const CHECKS: &str = r#"{"checks": [
    {"kind": "exparabola", "triangle": {"A": [0, 0], "B": [3, 0], "C": [1, 2]}},
    {"kind": "lemma-identities", "a": 0.6, "t": 0.4},
    {"kind": "containment", "a": 0.5, "t": 0.2, "samples": 5000},
    {"kind": "min-horocycle", "points": [[0.1, 0.2], [-0.2, 0.05]], "perturbations": 200}]}"#;

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn exec(&self, command: &str, input: &Path, output: &Path, extra: &[&str], threads: Option<&str>) -> Output {
        let mut cmd = Command::new(BIN);
        cmd.arg(command).arg("--input").arg(input).arg("--output").arg(output).args(extra);
        match threads {
            Some(t) => cmd.env("CONIC_EXTREMA_THREADS", t),
            None => cmd.env_remove("CONIC_EXTREMA_THREADS"),
        };
        cmd.output().unwrap()
    }

    fn ok(&self, command: &str, input_text: &str, extra: &[&str]) -> String {
        let input = self.write("in.json", input_text);
        let output = self.path("out.json");
        let out = self.exec(command, &input, &output, extra, None);
        assert!(out.status.success(), "{command}: {}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(output).unwrap()
    }
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "diagnostic is not one line: {text}");
    serde_json::from_str(text.trim_end()).unwrap()
}

fn round_trip<T: DeserializeOwned + Serialize>(text: &str) -> T {
    let doc: T = serde_json::from_str(text).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()), text);
    doc
}

#[test]
fn exparabola_worked_example() {
    let text = Run::new().ok("exparabola", TRIANGLE, &[]);
    let doc: ExparabolaOutput = round_trip(&text);
    assert_eq!(doc.exparabolas.len(), 3);
    let ab = doc.exparabolas.iter().find(|e| e.opposite == "C").unwrap();
    assert_eq!(ab.side, "AB");
    assert!(ab.lambda.abs() < 1e-12);
    assert!((ab.parameter - 2.0).abs() < 1e-12);
}

#[test]
fn max_parabola_matches_exparabola() {
    let text = Run::new().ok("max-parabola", REGION, &["--starts", "16"]);
    let doc: MaxParabolaOutput = round_trip(&text);
    assert!((doc.parameter - 2.0).abs() < 1e-9);
    assert_eq!(doc.active_constraints, vec![0, 1, 2]);
    assert_eq!(doc.convergence.starts, 16);
}

#[test]
fn lemma_shrink_figure() {
    let run = Run::new();
    let svg = run.path("fig.svg");
    let text = run.ok("lemma-shrink", LEMMA, &["--svg", svg.to_str().unwrap()]);
    let doc: LemmaShrinkOutput = round_trip(&text);
    assert!(doc.h.a < 0.5 && doc.size_margin > 0.0);
    let svg = fs::read_to_string(svg).unwrap();
    let xml = roxmltree::Document::parse(&svg).unwrap();
    let ids: Vec<&str> =
        xml.descendants().filter(|n| n.has_tag_name("path")).map(|n| n.attribute("id").unwrap()).collect();
    assert_eq!(ids, ["N", "H0", "H1", "H"]);
    let labels: Vec<String> = xml.descendants().filter(|n| n.has_tag_name("text")).map(|n| n.text().unwrap().into()).collect();
    assert_eq!(labels, ["L", "U"]);
}

#[test]
fn single_point_is_degenerate() {
    let text = Run::new().ok("min-horocycle", r#"{"points": [[0, 0]]}"#, &["--grid", "360"]);
    assert!(text.contains("\"a\": 0.7071067811865476"));
    let doc: MinHorocycleOutput = round_trip(&text);
    assert!(!doc.unique);
    assert_eq!(doc.grid, 360);
    assert_eq!(doc.minimizer_count, 360);
    assert_eq!(doc.minimizers.len(), 16);
}

#[test]
fn svg_has_one_path_per_conic() {
    let cases = [("exparabola", TRIANGLE, 3), ("max-parabola", REGION, 1), ("lemma-shrink", LEMMA, 4), ("min-horocycle", POINTS, 2)];
    for (command, input, conics) in cases {
        let run = Run::new();
        let svg = run.path("fig.svg");
        run.ok(command, input, &["--svg", svg.to_str().unwrap()]);
        let svg = fs::read_to_string(svg).unwrap();
        let xml = roxmltree::Document::parse(&svg).unwrap_or_else(|e| panic!("{command}: {e}"));
        let root = xml.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("version"), Some("1.1"));
        assert_eq!(xml.descendants().filter(|n| n.has_tag_name("path")).count(), conics, "{command}");
    }
}

#[test]
fn verify_passes_and_reports() {
    let text = Run::new().ok("verify", CHECKS, &["--seed", "3"]);
    let doc: VerifyOutput = round_trip(&text);
    assert!(doc.passed);
    assert_eq!(doc.checks.len(), 4);
    assert!(doc.checks.iter().all(|c| c.passed && c.message.is_none()));
}

#[test]
fn deterministic_output_across_runs_and_thread_counts() {
    let cases = [
        ("exparabola", TRIANGLE),
        ("max-parabola", REGION),
        ("lemma-shrink", LEMMA),
        ("min-horocycle", POINTS),
        ("verify", CHECKS),
    ];
    for (command, input_text) in cases {
        let run = Run::new();
        let input = run.write("in.json", input_text);
        let mut outputs = Vec::new();
        for (k, threads) in [None, Some("1"), Some("0"), Some("3")].into_iter().enumerate() {
            let output = run.path(&format!("out{k}.json"));
            let out = run.exec(command, &input, &output, &["--seed", "7"], threads);
            assert!(out.status.success(), "{command}");
            outputs.push(fs::read(output).unwrap());
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{command} output differs between runs");
    }
}

#[test]
fn exit_codes() {
    let run = Run::new();
    let out_path = run.path("out.json");
    let code = |command: &str, input: &Path, extra: &[&str], threads: Option<&str>| {
        let out = run.exec(command, input, &out_path, extra, threads);
        let diag = stderr_json(&out);
        let code = out.status.code().unwrap();
        assert_eq!(diag["code"], code);
        (code, diag["error"].as_str().unwrap().to_string())
    };

    assert_eq!(code("exparabola", &run.path("missing.json"), &[], None), (3, "io".into()));
    let broken = run.write("broken.json", "{\"triangle\": ");
    assert_eq!(code("exparabola", &broken, &[], None), (3, "parse".into()));
    let unknown = run.write("unknown.json", r#"{"triangle": {"A": [0, 0], "B": [1, 0], "C": [0, 1]}, "extra": 1}"#);
    assert_eq!(code("exparabola", &unknown, &[], None).0, 3);
    let good = run.write("good.json", TRIANGLE);
    assert_eq!(code("exparabola", &good, &[], Some("many")).0, 3);
    assert_eq!(code("exparabola", &good, &["--seed", "x"], None).0, 3);
    assert_eq!(code("verify", &good, &["--svg", "fig.svg"], None).0, 3);

    let collinear = run.write("collinear.json", r#"{"triangle": {"A": [0, 0], "B": [1, 1], "C": [2, 2]}}"#);
    assert_eq!(code("exparabola", &collinear, &[], None), (1, "domain".into()));
    let outside = run.write("outside.json", r#"{"points": [[0.5, 0.9]]}"#);
    assert_eq!(code("min-horocycle", &outside, &[], None).0, 1);
    let big = run.write("big.json", r#"{"a": 0.75, "omega": 0.1}"#);
    assert_eq!(code("lemma-shrink", &big, &[], None).0, 1);
    let open = run.write("open.json", r#"{"halfplanes": [{"normal": [0, 1], "offset": 0}]}"#);
    assert_eq!(code("max-parabola", &open, &[], None).0, 1);

    // A sharpness check expected to hold for a = 0.5 fails, and the report is still written.
    let failing = run.write(
        "failing.json",
        r#"{"checks": [{"kind": "containment", "a": 0.5, "t": 0.2, "samples": 2000, "expect": "violated"}]}"#,
    );
    assert_eq!(code("verify", &failing, &[], None), (2, "verification".into()));
    let doc: VerifyOutput = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(!doc.passed && doc.checks[0].message.is_some());

    let tolerances = run.write("tol.json", r#"{"checks": [], "tolerances": {"nonsense": 1}}"#);
    assert_eq!(code("verify", &tolerances, &[], None).0, 3);
}

#[test]
fn tolerance_override_is_applied() {
    let input = r#"{"checks": [{"kind": "exparabola", "triangle": {"A": [0, 0], "B": [3, 0], "C": [1, 2]}}],
                    "tolerances": {"tangency": 0.0}}"#;
    let run = Run::new();
    let path = run.write("in.json", input);
    let out = run.path("out.json");
    let status = run.exec("verify", &path, &out, &[], None).status.code().unwrap();
    let doc: VerifyOutput = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc.tolerances["tangency"], 0.0);
    // A zero tolerance only passes if the residual is exactly zero.
    let residual = doc.checks[0].values["max_tangency_residual"].as_f64().unwrap();
    assert_eq!(status == 0, residual == 0.0);
}

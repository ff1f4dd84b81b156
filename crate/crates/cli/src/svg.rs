//! Minimal SVG 1.1 writer for conic figures.
//!
//! Every conic becomes exactly one `<path>`. Lines, polygons and marked points
//! use `<line>`, `<polygon>` and `<circle>` so that paths can be counted.

use std::fmt::Write as _;

use nalgebra::{Point2, Vector2};

use conic_extrema::horocycle::Horocycle;
use conic_extrema::parabola::Parabola;

const WIDTH: f64 = 800.0;
/// Maximal chord deviation of parabola polylines, in pixels.
const FLATNESS_PX: f64 = 0.25;
const MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Viewport {
    pub const PLANE: Viewport = Viewport { xmin: -4.0, ymin: -4.0, xmax: 4.0, ymax: 4.0 };
    pub const DISK: Viewport = Viewport { xmin: -1.1, ymin: -1.1, xmax: 1.1, ymax: 1.1 };

    pub fn from_array(v: [f64; 4]) -> Option<Self> {
        let vp = Viewport { xmin: v[0], ymin: v[1], xmax: v[2], ymax: v[3] };
        let ok = v.iter().all(|x| x.is_finite()) && vp.xmax > vp.xmin && vp.ymax > vp.ymin;
        ok.then_some(vp)
    }

    fn contains(&self, p: &Point2<f64>) -> bool {
        (self.xmin..=self.xmax).contains(&p.x) && (self.ymin..=self.ymax).contains(&p.y)
    }

    fn corners(&self) -> [Point2<f64>; 4] {
        [
            Point2::new(self.xmin, self.ymin),
            Point2::new(self.xmax, self.ymin),
            Point2::new(self.xmax, self.ymax),
            Point2::new(self.xmin, self.ymax),
        ]
    }
}

pub struct Figure {
    vp: Viewport,
    scale: f64,
    body: String,
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl Figure {
    pub fn new(vp: Viewport) -> Self {
        Self { vp, scale: WIDTH / (vp.xmax - vp.xmin), body: String::new() }
    }

    fn height(&self) -> f64 {
        (self.vp.ymax - self.vp.ymin) * self.scale
    }

    /// World to screen coordinates; the y axis points up in the world.
    fn map(&self, p: &Point2<f64>) -> (f64, f64) {
        ((p.x - self.vp.xmin) * self.scale, (self.vp.ymax - p.y) * self.scale)
    }

    fn xy(&self, p: &Point2<f64>) -> String {
        let (x, y) = self.map(p);
        format!("{} {}", num(x), num(y))
    }

    /// Parabola as an adaptively sampled polyline, clipped to the viewport.
    pub fn parabola(&mut self, p: &Parabola, id: &str, stroke: &str) {
        let apex = p.apex();
        let reach = self.vp.corners().iter().map(|c| (c - apex).norm()).fold(0.0, f64::max);
        let tol = FLATNESS_PX / self.scale;
        let mut samples = vec![(-reach, p.point_at(-reach))];
        let n = 64;
        for k in 0..n {
            let r0 = -reach + 2.0 * reach * k as f64 / n as f64;
            let r1 = -reach + 2.0 * reach * (k + 1) as f64 / n as f64;
            subdivide(p, r0, r1, tol, 0, &mut samples);
        }
        // Keep runs inside the viewport plus one neighbour on each side; the
        // clip path trims the overhang.
        let inside: Vec<bool> = samples.iter().map(|(_, q)| self.vp.contains(q)).collect();
        let mut d = String::new();
        let mut pen_down = false;
        for (i, (_, q)) in samples.iter().enumerate() {
            let near = inside[i] || (i > 0 && inside[i - 1]) || (i + 1 < samples.len() && inside[i + 1]);
            if near {
                let _ = write!(d, "{}{} ", if pen_down { "L" } else { "M" }, self.xy(q));
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        self.path(d.trim_end(), id, stroke);
    }

    /// Ellipse with the given semi-axes, the first along `major_dir`, as two
    /// elliptical arcs.
    pub fn ellipse(&mut self, center: Point2<f64>, major: f64, minor: f64, major_dir: Vector2<f64>, id: &str, stroke: &str) {
        let dir = major_dir.normalize();
        let p0 = center + dir * major;
        let p1 = center - dir * major;
        // Screen y points down, so the rotation angle changes sign.
        let rot = -dir.y.atan2(dir.x).to_degrees();
        let (rx, ry) = (num(major * self.scale), num(minor * self.scale));
        let d = format!(
            "M{} A{rx} {ry} {} 1 0 {} A{rx} {ry} {} 1 0 {} Z",
            self.xy(&p0),
            num(rot),
            self.xy(&p1),
            num(rot),
            self.xy(&p0)
        );
        self.path(&d, id, stroke);
    }

    pub fn horocycle(&mut self, h: &Horocycle, id: &str, stroke: &str) {
        let (major, minor) = h.semi_axes();
        let radial = Vector2::new(h.theta.cos(), h.theta.sin());
        self.ellipse(h.center(), major, minor, Vector2::new(-radial.y, radial.x), id, stroke);
    }

    pub fn unit_circle(&mut self, id: &str) {
        self.ellipse(Point2::origin(), 1.0, 1.0, Vector2::x(), id, "black");
    }

    fn path(&mut self, d: &str, id: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"  <path id="{id}" d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5" clip-path="url(#view)"/>"#
        );
    }

    /// Line `normal · x = offset` clipped to the viewport.
    pub fn line(&mut self, normal: Vector2<f64>, offset: f64, stroke: &str) {
        let Some((a, b)) = self.clip_line(normal, offset) else {
            return;
        };
        let (x1, y1) = self.map(&a);
        let (x2, y2) = self.map(&b);
        let _ = writeln!(
            self.body,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="0.75" stroke-dasharray="4 3"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }

    fn clip_line(&self, normal: Vector2<f64>, offset: f64) -> Option<(Point2<f64>, Point2<f64>)> {
        let len = normal.norm();
        let (n, o) = (normal / len, offset / len);
        let base = Point2::from(n * o);
        let dir = Vector2::new(-n.y, n.x);
        // Liang–Barsky against the viewport box.
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (origin, d, lo, hi) in [(base.x, dir.x, self.vp.xmin, self.vp.xmax), (base.y, dir.y, self.vp.ymin, self.vp.ymax)] {
            if d.abs() < 1e-15 {
                if origin < lo || origin > hi {
                    return None;
                }
            } else {
                let (a, b) = ((lo - origin) / d, (hi - origin) / d);
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
            }
        }
        (t0 < t1).then(|| (base + dir * t0, base + dir * t1))
    }

    pub fn polygon(&mut self, points: &[Point2<f64>], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|p| self.xy(p).replace(' ', ",")).collect();
        let _ = writeln!(
            self.body,
            r#"  <polygon points="{}" fill="none" stroke="{stroke}" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }

    pub fn point(&mut self, p: &Point2<f64>, label: Option<&str>) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"  <circle cx="{}" cy="{}" r="3" fill="black"/>"#, num(x), num(y));
        if let Some(label) = label {
            let _ = writeln!(
                self.body,
                r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="14">{label}</text>"#,
                num(x + 5.0),
                num(y - 5.0)
            );
        }
    }

    pub fn finish(self) -> String {
        let (w, h) = (num(WIDTH), num(self.height()));
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
                "  <defs><clipPath id=\"view\"><rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\"/></clipPath></defs>\n",
                "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
                "{body}",
                "</svg>\n"
            ),
            w = w,
            h = h,
            body = self.body
        )
    }
}

fn subdivide(p: &Parabola, r0: f64, r1: f64, tol: f64, depth: u32, out: &mut Vec<(f64, Point2<f64>)>) {
    let a = p.point_at(r0);
    let b = p.point_at(r1);
    let rm = 0.5 * (r0 + r1);
    let m = p.point_at(rm);
    let chord = b - a;
    let dev = if chord.norm() > 0.0 {
        (chord.x * (m.y - a.y) - chord.y * (m.x - a.x)).abs() / chord.norm()
    } else {
        0.0
    };
    if dev > tol && depth < MAX_DEPTH {
        subdivide(p, r0, rm, tol, depth + 1, out);
        subdivide(p, rm, r1, tol, depth + 1, out);
    } else {
        out.push((r1, b));
    }
}

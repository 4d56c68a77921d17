//! Self-contained SVG drawings of the triangle `x, y > 0, x + y < 1`.
//!
//! `O` sits at the lower left, `P = (1, 0)` at the lower right and `Q = (0, 1)` at
//! the top. All styling is inline.

use std::fmt::Write;

use flagflow::verify::CellClass;
use flagflow::{Boundary, Equilibrium, EquilibriumLabel, Path, StabilityClass};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const SIDE: f64 = SIZE - 2.0 * MARGIN;

const PRESERVED_FILL: &str = "#f5d76e";
const BOUNDARY_STROKE: &str = "#b5651d";
const TRAJECTORY_STROKE: &str = "#3a6ea5";

fn map(p: [f64; 2]) -> (f64, f64) {
    (MARGIN + SIDE * p[0], SIZE - MARGIN - SIDE * p[1])
}

fn points_attr(points: impl IntoIterator<Item = [f64; 2]>) -> String {
    let mut s = String::new();
    for p in points {
        let (u, v) = map(p);
        if !s.is_empty() {
            s.push(' ');
        }
        write!(s, "{u:.2},{v:.2}").unwrap();
    }
    s
}

pub struct Canvas {
    title: String,
    body: String,
}

impl Canvas {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), body: String::new() }
    }

    /// Shades member cells: solid for preserved, checkered for members the flow
    /// carries out. Adjacent cells of one row and class are merged.
    pub fn cells(&mut self, cells: &[CellClass<f64>], resolution: usize) {
        let h = 1.0 / resolution as f64;
        let class = |c: &CellClass<f64>| match (c.member, c.preserved) {
            (true, true) => Some(PRESERVED_FILL),
            (true, false) => Some("url(#checker)"),
            _ => None,
        };
        self.body.push_str("<g clip-path=\"url(#domain)\" shape-rendering=\"crispEdges\">\n");
        let mut i = 0;
        while i < cells.len() {
            let Some(fill) = class(&cells[i]) else {
                i += 1;
                continue;
            };
            let mut j = i + 1;
            while j < cells.len()
                && cells[j].y == cells[i].y
                && class(&cells[j]) == Some(fill)
                && (cells[j].x - cells[j - 1].x - h).abs() < 0.5 * h
            {
                j += 1;
            }
            let (u0, v0) = map([cells[i].x - 0.5 * h, cells[i].y + 0.5 * h]);
            let (u1, v1) = map([cells[j - 1].x + 0.5 * h, cells[i].y - 0.5 * h]);
            writeln!(
                self.body,
                "<rect x=\"{u0:.2}\" y=\"{v0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                u1 - u0,
                v1 - v0
            )
            .unwrap();
            i = j;
        }
        self.body.push_str("</g>\n");
    }

    pub fn boundaries(&mut self, lines: &[Boundary]) {
        for line in lines {
            writeln!(
                self.body,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{BOUNDARY_STROKE}\" stroke-width=\"1.2\"/>",
                points_attr(line.points.iter().copied())
            )
            .unwrap();
        }
    }

    pub fn segments(&mut self, segments: &[(EquilibriumLabel, EquilibriumLabel)]) {
        for &(a, b) in segments {
            writeln!(
                self.body,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"5,3\"/>",
                points_attr([a.position::<f64>(), b.position::<f64>()])
            )
            .unwrap();
        }
    }

    pub fn trajectories(&mut self, paths: &[Path]) {
        for path in paths {
            writeln!(
                self.body,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{TRAJECTORY_STROKE}\" stroke-width=\"0.8\" stroke-opacity=\"0.8\"/>",
                points_attr(path.samples.iter().map(|s| [s.x, s.y]))
            )
            .unwrap();
        }
    }

    pub fn equilibria(&mut self, eqs: &[Equilibrium<f64>]) {
        for e in eqs {
            let (u, v) = map(e.position);
            let fill = match e.class {
                StabilityClass::UnstableStarNode => "#c0392b",
                StabilityClass::StableStarNode => "#27ae60",
                StabilityClass::Saddle => "#8e44ad",
                StabilityClass::Other => "#7f8c8d",
            };
            writeln!(self.body, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"0.6\"/>").unwrap();
            writeln!(
                self.body,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
                u + 6.0,
                v - 6.0,
                e.label
            )
            .unwrap();
        }
    }

    pub fn finish(self) -> String {
        let outline = points_attr([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let mut s = String::new();
        writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
        )
        .unwrap();
        writeln!(s, "<title>{}</title>", self.title).unwrap();
        s.push_str("<defs>\n");
        writeln!(s, "<clipPath id=\"domain\"><polygon points=\"{outline}\"/></clipPath>").unwrap();
        writeln!(
            s,
            "<pattern id=\"checker\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\">\
<rect width=\"8\" height=\"8\" fill=\"#ffffff\"/><rect width=\"4\" height=\"4\" fill=\"{PRESERVED_FILL}\"/>\
<rect x=\"4\" y=\"4\" width=\"4\" height=\"4\" fill=\"{PRESERVED_FILL}\"/></pattern>"
        )
        .unwrap();
        s.push_str("</defs>\n");
        writeln!(s, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>").unwrap();
        s.push_str(&self.body);
        writeln!(s, "<polygon points=\"{outline}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>").unwrap();
        s.push_str("</svg>\n");
        s
    }
}

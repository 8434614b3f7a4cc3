//! Deterministic SVG for staircases, window partitions and patches.
//!
//! Exact values are converted to `f64` only here and printed with twelve
//! fractional digits, so identical input gives identical bytes.

use std::fmt::Write as _;

use crate::lattice::Vec2;
use crate::quadfield::{rational_to_f64, QfNum};
use crate::staircase::{LabelStyle, Patch, Tiling};
use crate::substitution::LabelPartition;
use crate::Result;

const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

/// Twelve fractional digits, trailing zeros removed, no negative zero.
pub fn num(x: f64) -> String {
    let mut s = format!("{x:.12}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Canvas {
    fn new() -> Self {
        Canvas { body: String::new(), min: (f64::INFINITY, f64::INFINITY), max: (f64::NEG_INFINITY, f64::NEG_INFINITY) }
    }

    fn see(&mut self, x: f64, y: f64) {
        self.min = (self.min.0.min(x), self.min.1.min(y));
        self.max = (self.max.0.max(x), self.max.1.max(y));
    }

    fn line(&mut self, class: &str, a: (f64, f64), b: (f64, f64)) {
        self.see(a.0, a.1);
        self.see(b.0, b.1);
        let _ = writeln!(
            self.body,
            r#"  <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
    }

    fn text(&mut self, class: &str, at: (f64, f64), s: &str) {
        self.see(at.0, at.1);
        let _ = writeln!(self.body, r#"  <text class="{class}" x="{}" y="{}">{}</text>"#, num(at.0), num(at.1), escape(s));
    }

    fn polyline(&mut self, class: &str, pts: &[(f64, f64)]) {
        for p in pts {
            self.see(p.0, p.1);
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.0), num(p.1))).collect();
        let _ = writeln!(self.body, r#"  <polyline class="{class}" points="{}"/>"#, coords.join(" "));
    }

    fn polygon(&mut self, class: &str, pts: &[(f64, f64)]) {
        for p in pts {
            self.see(p.0, p.1);
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.0), num(p.1))).collect();
        let _ = writeln!(self.body, r#"  <polygon class="{class}" points="{}"/>"#, coords.join(" "));
    }

    fn finish(self) -> String {
        let (min, max) = if self.min.0.is_finite() { (self.min, self.max) } else { ((0.0, 0.0), (0.0, 0.0)) };
        let (x0, y0) = (min.0 - MARGIN, min.1 - MARGIN);
        let (w, h) = (max.0 - min.0 + 2.0 * MARGIN, max.1 - min.1 + 2.0 * MARGIN);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
            num(x0),
            num(y0),
            num(w),
            num(h),
            num(w),
            num(h)
        );
        out.push_str(
            "  <style>line,polyline{stroke:#222;stroke-width:1.5;fill:none}.strip{fill:#dde8f5;stroke:none}\
             .window{stroke-width:3}.tile-boundary{stroke:#c03}.cell-boundary{stroke:#36c}\
             text{font-family:monospace;font-size:12px}</style>\n",
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn lattice_xy(z: &Vec2) -> (f64, f64) {
    (rational_to_f64(&z.x) * SCALE, -rational_to_f64(&z.y) * SCALE)
}

/// The strip and the staircase through `steps + 1` consecutive vertices,
/// starting at the strip point nearest the origin.
pub fn render_staircase(tiling: &Tiling, steps: usize) -> Result<String> {
    let mut c = Canvas::new();
    let mut p = tiling.find_strip_point()?;
    let mut pts = vec![p.z.clone()];
    for _ in 0..steps {
        p = tiling.phi(&p);
        pts.push(p.z.clone());
    }
    let (ylo, yhi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| {
        let y = rational_to_f64(&z.y);
        (a.min(y), b.max(y))
    });
    let (ylo, yhi) = (ylo - 1.0, yhi + 1.0);
    // Boundary lines Π_Y(x, y) = w, i.e. x = y·y₂ − w.
    let y2 = tiling.projection().y_generators().1.to_f64();
    let w = tiling.window_interval();
    let (lo, hi) = (w.lo.to_f64(), w.hi.to_f64());
    let at = |y: f64, v: f64| ((y * y2 - v) * SCALE, -y * SCALE);
    c.polygon("strip", &[at(ylo, lo), at(yhi, lo), at(yhi, hi), at(ylo, hi)]);
    let xy: Vec<(f64, f64)> = pts.iter().map(lattice_xy).collect();
    c.polyline("staircase", &xy);
    Ok(c.finish())
}

/// The window as a segment, with tile-type boundaries as long ticks and,
/// if given, labelling cells as short ticks with their names.
pub fn render_partition(tiling: &Tiling, labels: Option<&LabelPartition>, style: LabelStyle) -> String {
    let mut c = Canvas::new();
    let w = tiling.window_interval();
    let len = tiling.window_length().to_f64() * SCALE * 4.0;
    let x = |v: &QfNum| (v - &w.lo).to_f64() * SCALE * 4.0;
    c.line("window", (0.0, 0.0), (len, 0.0));
    for b in &tiling.partition().boundaries {
        let bx = x(b);
        c.line("tile-boundary", (bx, -18.0), (bx, 18.0));
    }
    for (shape, cell) in &tiling.partition().cells {
        let mid = (x(&cell.lo) + x(&cell.hi)) / 2.0;
        c.text("shape", (mid, 34.0), &shape.letter().to_string());
    }
    if let Some(part) = labels {
        for (label, cell) in &part.cells {
            let (a, b) = (cell.lo.to_f64() * SCALE * 4.0, cell.hi.to_f64() * SCALE * 4.0);
            c.line("cell-boundary", (a, -8.0), (a, 8.0));
            c.text("label", ((a + b) / 2.0, -12.0), &label.display(style, false));
        }
        c.line("cell-boundary", (len, -8.0), (len, 8.0));
    }
    c.finish()
}

/// A patch drawn along the line, one segment per tile.
pub fn render_patch(patch: &Patch, style: LabelStyle) -> String {
    let mut c = Canvas::new();
    let verts = patch.vertices();
    let origin = verts.first().map(QfNum::to_f64).unwrap_or(0.0);
    for (t, pair) in patch.tiles.iter().zip(verts.windows(2)) {
        let (a, b) = ((pair[0].to_f64() - origin) * SCALE, (pair[1].to_f64() - origin) * SCALE);
        c.line("tile", (a, 0.0), (b, 0.0));
        c.line("vertex", (a, -6.0), (a, 6.0));
        c.text("label", ((a + b) / 2.0, -10.0), &t.label.display(style, false));
    }
    if let Some(last) = verts.last() {
        if verts.len() > 1 {
            let e = (last.to_f64() - origin) * SCALE;
            c.line("vertex", (e, -6.0), (e, 6.0));
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{UniMatrix, WindowSpec};
    use crate::substitution::Derivation;

    #[test]
    fn numbers_are_stable() {
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn fibonacci_staircase_has_all_vertices() {
        let t = Tiling::new(UniMatrix::new(1, 1, 1, 0), WindowSpec::new(Vec2::int(-1, 1))).unwrap();
        let svg = render_staircase(&t, 20).unwrap();
        let line = svg.lines().find(|l| l.contains("class=\"staircase\"")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 21);
        assert_eq!(svg, render_staircase(&t, 20).unwrap());
    }

    #[test]
    fn worked_partition_marks() {
        let der = Derivation::new(UniMatrix::new(2, 1, 1, 1), &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap();
        let part = der.label_partition().unwrap();
        let svg = render_partition(&der.tiling, Some(&part), LabelStyle::Steps);
        assert_eq!(svg.matches("class=\"label\"").count(), 4);
        assert_eq!(svg.matches("class=\"tile-boundary\"").count(), 2);
    }

    #[test]
    fn empty_patch_is_valid() {
        let f = crate::QuadField::golden();
        let svg = render_patch(&Patch::empty(f.zero()), LabelStyle::Letters);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

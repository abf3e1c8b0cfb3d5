//! SVG drawings of bases and triangulated spheres.
//!
//! Output depends only on the input: elements are emitted in the order of
//! the underlying vectors and coordinates are printed with two decimals.

use std::collections::BTreeSet;
use std::fmt::Write;

use cusp_core::surgery::SegmentKind;
use cusp_core::{AlmostToricBase, Pt, TriComplex};

const PANEL: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// Maps lattice points of one panel into SVG coordinates, y pointing up.
struct Frame {
    min: (i128, i128),
    unit: f64,
    left: f64,
    height: f64,
}

impl Frame {
    fn fit<'a>(pts: impl IntoIterator<Item = &'a Pt>, left: f64) -> Frame {
        let (mut lo, mut hi) = ((i128::MAX, i128::MAX), (i128::MIN, i128::MIN));
        for p in pts {
            lo = (lo.0.min(p.x), lo.1.min(p.y));
            hi = (hi.0.max(p.x), hi.1.max(p.y));
        }
        if lo.0 > hi.0 {
            lo = (0, 0);
            hi = (1, 1);
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1) as f64;
        let unit = PANEL / span;
        Frame { min: lo, unit, left, height: (hi.1 - lo.1) as f64 * unit }
    }

    fn xy(&self, p: Pt) -> (f64, f64) {
        let x = self.left + MARGIN + (p.x - self.min.0) as f64 * self.unit;
        let y = MARGIN + self.height - (p.y - self.min.1) as f64 * self.unit;
        (x, y)
    }

    fn width(&self) -> f64 {
        PANEL + 2.0 * MARGIN
    }
}

fn line(out: &mut String, f: &Frame, a: Pt, b: Pt, class: &str) {
    let ((x1, y1), (x2, y2)) = (f.xy(a), f.xy(b));
    let _ = writeln!(out, r#"<line class="{class}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
}

fn dot(out: &mut String, f: &Frame, p: Pt, class: &str, r: f64) {
    let (x, y) = f.xy(p);
    let _ = writeln!(out, r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{r:.1}"/>"#);
}

const STYLE: &str = "<style>\
.edge{stroke:#000;stroke-width:2}\
.cut{stroke:#a33;stroke-width:1.5;stroke-dasharray:6 4}\
.tri{stroke:#888;stroke-width:0.5}\
.seam{stroke:#36c;stroke-width:1.5}\
.singular{fill:#c00}\
.v0{fill:#06c}\
</style>";

fn document(width: f64, height: f64, body: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    out.push_str(STYLE);
    out.push('\n');
    out.push_str(body);
    out.push_str("</svg>\n");
    out
}

/// The base outline with cut sides dashed and singular points marked.
pub fn base_svg(b: &AlmostToricBase) -> String {
    let pts: Vec<Pt> = b.outline.iter().map(|s| s.start).collect();
    let f = Frame::fit(&pts, 0.0);
    let mut body = String::from("<g class=\"panel\">\n");
    for s in &b.outline {
        let class = match s.kind {
            SegmentKind::Edge { .. } => "edge",
            SegmentKind::Cut { .. } => "cut",
        };
        line(&mut body, &f, s.start, s.end, class);
    }
    for p in &b.singular_points {
        dot(&mut body, &f, p.position, "singular", 4.0);
    }
    body.push_str("</g>\n");
    document(f.width(), f.height + 2.0 * MARGIN, &body)
}

/// Faces drawn in their base chart go in the left panel, the rest in the right.
pub fn complex_svg(t: &TriComplex) -> String {
    let mut panels: [Vec<[Pt; 3]>; 2] = [Vec::new(), Vec::new()];
    let mut marks: [BTreeSet<(Pt, &'static str)>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for (i, face) in t.faces.iter().enumerate() {
        let (k, tri) = match t.base_charts[i] {
            Some(m) => (0, t.charts[i].map(|p| m.apply(p))),
            None => (1, t.charts[i]),
        };
        for (c, &v) in face.iter().enumerate() {
            if v == t.v0 {
                marks[k].insert((tri[c], "v0"));
            } else if t.vertices[v].singular {
                marks[k].insert((tri[c], "singular"));
            }
        }
        panels[k].push(tri);
    }
    let mut body = String::new();
    let mut left = 0.0;
    let mut height: f64 = 0.0;
    for k in 0..2 {
        if panels[k].is_empty() {
            continue;
        }
        let f = Frame::fit(panels[k].iter().flatten(), left);
        let _ = writeln!(body, "<g class=\"panel\">");
        for tri in &panels[k] {
            let [(x1, y1), (x2, y2), (x3, y3)] = tri.map(|p| f.xy(p));
            let _ = writeln!(
                body,
                r#"<polygon class="tri" fill="none" points="{x1:.2},{y1:.2} {x2:.2},{y2:.2} {x3:.2},{y3:.2}"/>"#
            );
        }
        for (p, class) in &marks[k] {
            dot(&mut body, &f, *p, class, if *class == "v0" { 5.0 } else { 3.0 });
        }
        body.push_str("</g>\n");
        left += f.width();
        height = height.max(f.height + 2.0 * MARGIN);
    }
    document(left.max(1.0), height.max(1.0), &body)
}

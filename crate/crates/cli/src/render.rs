//! SVG diagrams of a traced skizze.

use std::collections::BTreeMap;
use std::fmt::Write;

use skizze_core::graph::{EdgeColor, FaceColor};
use skizze_core::tracer::{Endpoint, SkVertexKind, Skizze};
use skizze_core::Complex;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub size: u32,
    /// Face fill grid resolution per side.
    pub cells: u32,
    pub blue: String,
    pub red: String,
    /// Fills for faces A, B, C, D.
    pub faces: [String; 4],
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            size: 512,
            cells: 96,
            blue: "#1f4fd1".into(),
            red: "#d1291f".into(),
            faces: ["#f4efe1", "#e3eef8", "#eaf5e6", "#f7e6ee"].map(String::from),
        }
    }
}

/// Quadrant of `w` as a face color: A is `Re > 0, Im > 0`, then counterclockwise.
fn quadrant(w: Complex) -> FaceColor {
    let i = match (w.re >= 0.0, w.im >= 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    };
    FaceColor::from_index(i)
}

/// Arcs of one color chained straight through vertices: a curve enters a
/// vertex at one port and leaves at the opposite port of the same color.
pub fn curves(s: &Skizze, color: EdgeColor) -> Vec<Vec<Complex>> {
    let arcs: Vec<usize> = (0..s.arcs.len()).filter(|&a| s.arcs[a].color == color).collect();
    let mut at_port: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &a in &arcs {
        for e in [s.arcs[a].start, s.arcs[a].end] {
            if let Endpoint::Vertex { id, port } = e {
                at_port.insert((id, port), a);
            }
        }
    }
    let opposite = |id: usize, port: usize| -> Option<usize> {
        let same: Vec<usize> = (0..s.vertices[id].ports.len())
            .filter(|&p| s.vertices[id].ports[p].color == color)
            .collect();
        let k = same.iter().position(|&p| p == port)?;
        Some(same[(k + same.len() / 2) % same.len()])
    };
    let mut used = vec![false; s.arcs.len()];
    let mut out = Vec::new();
    for &a0 in &arcs {
        if used[a0] {
            continue;
        }
        used[a0] = true;
        let mut line = s.arcs[a0].polyline.clone();
        // extend forward from the end, then backward from the start
        for forward in [true, false] {
            let mut tip = if forward { s.arcs[a0].end } else { s.arcs[a0].start };
            while let Endpoint::Vertex { id, port } = tip {
                let Some(q) = opposite(id, port) else { break };
                let Some(&next) = at_port.get(&(id, q)) else { break };
                if used[next] {
                    break;
                }
                used[next] = true;
                let arc = &s.arcs[next];
                let outward_start = arc.start == Endpoint::Vertex { id, port: q };
                let mut pts = arc.polyline.clone();
                if !outward_start {
                    pts.reverse();
                }
                tip = if outward_start { arc.end } else { arc.start };
                if forward {
                    line.extend(pts.into_iter().skip(1));
                } else {
                    pts.reverse();
                    pts.pop();
                    pts.extend(line);
                    line = pts;
                }
            }
        }
        out.push(line);
    }
    out
}

pub fn render_svg(s: &Skizze, spec: &RenderSpec) -> String {
    let r = s.radius * 1.05;
    let size = spec.size as f64;
    let map = |z: Complex| ((z.re + r) / (2.0 * r) * size, (r - z.im) / (2.0 * r) * size);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        spec.size
    );
    let _ = writeln!(svg, "<title>{}</title>", s.poly);
    svg.push_str("<g class=\"faces\">\n");
    let cell = size / spec.cells as f64;
    for i in 0..spec.cells {
        for j in 0..spec.cells {
            let x = (i as f64 + 0.5) * cell;
            let y = (j as f64 + 0.5) * cell;
            let z = Complex::new(x / size * 2.0 * r - r, r - y / size * 2.0 * r);
            let f = quadrant(s.poly.eval(z));
            let _ = writeln!(
                svg,
                r#"<rect class="face-{f}" x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}"/>"#,
                i as f64 * cell,
                j as f64 * cell,
                spec.faces[f.index()]
            );
        }
    }
    svg.push_str("</g>\n");
    for (color, stroke) in [(EdgeColor::Red, &spec.red), (EdgeColor::Blue, &spec.blue)] {
        let name = if color == EdgeColor::Red { "red" } else { "blue" };
        for line in curves(s, color) {
            let mut d = String::new();
            for (k, z) in line.iter().enumerate() {
                let (x, y) = map(*z);
                let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { " L" });
            }
            let _ = writeln!(
                svg,
                r#"<path class="curve {name}" d="{d}" fill="none" stroke="{stroke}" stroke-width="2"/>"#
            );
        }
    }
    for l in &s.leaves {
        let (x, y) = map(l.point);
        let stroke = if l.color == EdgeColor::Red { &spec.red } else { &spec.blue };
        let _ = writeln!(
            svg,
            r#"<circle class="leaf" data-slot="{}" cx="{x:.2}" cy="{y:.2}" r="4" fill="white" stroke="{stroke}"/>"#,
            l.slot
        );
    }
    for v in &s.vertices {
        let (x, y) = map(v.position);
        match v.kind {
            SkVertexKind::Root { mult } => {
                let _ = writeln!(
                    svg,
                    r#"<circle class="root" data-mult="{mult}" cx="{x:.2}" cy="{y:.2}" r="5" fill="black"/>"#
                );
            }
            SkVertexKind::Crit { color, .. } => {
                let stroke = if color == EdgeColor::Red { &spec.red } else { &spec.blue };
                let _ = writeln!(
                    svg,
                    r#"<rect class="crit" x="{:.2}" y="{:.2}" width="8" height="8" fill="white" stroke="{stroke}"/>"#,
                    x - 4.0,
                    y - 4.0
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

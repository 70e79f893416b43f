//! Numerical tracing of the skizze `Re P = 0` (blue) and `Im P = 0` (red).
//!
//! Roots and on-skizze critical points are located first; tracing then only
//! discovers how they connect. Arcs start at the `4n` boundary crossings on
//! `|z| = R` and at unused vertex branch directions.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CanonicalCode, EdgeColor, GaussGraph, Port, VertexKind};
use crate::poly::{critical_data, find_roots, multiplicity_radius, root_bound, Complex, Polynomial};

/// Tracing parameters. Step sizes and the snap radius are fractions of the
/// trace radius `R`; the corrector tolerance is relative to `Σ|c_k||z|^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig {
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub corrector_tol: f64,
    pub snap_radius: f64,
    pub max_steps: usize,
    /// On-skizze tolerance for critical values.
    pub axis_eps: f64,
    pub root_tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            h0: 0.01,
            h_min: 1e-13,
            h_max: 0.05,
            corrector_tol: 1e-12,
            snap_radius: 1e-6,
            max_steps: 100_000,
            axis_eps: 1e-9,
            root_tol: 1e-9,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.h_min
            && self.h_min <= self.h0
            && self.h0 <= self.h_max
            && self.snap_radius > self.corrector_tol
            && self.corrector_tol > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inconsistent trace configuration {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SkVertexKind {
    Root { mult: usize },
    /// Critical point of multiplicity `mult` in `P'` lying on the `color` level set.
    Crit { mult: usize, color: EdgeColor },
}

/// Branch direction of the level set at a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PortDir {
    pub angle: f64,
    pub color: EdgeColor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkVertex {
    pub position: Complex,
    pub kind: SkVertexKind,
    /// Branch directions in counterclockwise order.
    pub ports: Vec<PortDir>,
    /// Capture radius for arriving arcs.
    pub snap: f64,
}

impl SkVertex {
    fn carries(&self, color: EdgeColor) -> bool {
        match self.kind {
            SkVertexKind::Root { .. } => true,
            SkVertexKind::Crit { color: c, .. } => c == color,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Leaf(usize),
    Vertex { id: usize, port: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub color: EdgeColor,
    pub polyline: Vec<Complex>,
    pub start: Endpoint,
    pub end: Endpoint,
}

/// Boundary crossing of the skizze with `|z| = R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leaf {
    pub slot: usize,
    pub point: Complex,
    pub color: EdgeColor,
}

#[derive(Clone, Debug)]
pub struct Skizze {
    pub poly: Polynomial,
    pub radius: f64,
    pub vertices: Vec<SkVertex>,
    /// Leaves indexed by slot.
    pub leaves: Vec<Leaf>,
    pub arcs: Vec<Arc>,
    /// Roots and all critical points; used for step control.
    singular: Vec<Complex>,
    config: TraceConfig,
}

impl Skizze {
    pub fn n(&self) -> usize {
        self.poly.degree()
    }

    /// Arc ends at vertex `v` in counterclockwise order: `(arc, is_start)`.
    pub fn incidence(&self, v: usize) -> Vec<(usize, bool)> {
        let mut ends: Vec<(usize, usize, bool)> = Vec::new();
        for (a, arc) in self.arcs.iter().enumerate() {
            if let Endpoint::Vertex { id, port } = arc.start {
                if id == v {
                    ends.push((port, a, true));
                }
            }
            if let Endpoint::Vertex { id, port } = arc.end {
                if id == v {
                    ends.push((port, a, false));
                }
            }
        }
        ends.sort_unstable();
        ends.into_iter().map(|(_, a, s)| (a, s)).collect()
    }

    /// Traces arc `index` again from its end back to its start.
    pub fn retrace_reversed(&self, index: usize) -> Result<Arc> {
        let arc = &self.arcs[index];
        let tracer = Tracer::new(self);
        let (start, seed) = match arc.end {
            Endpoint::Leaf(slot) => (tracer.leaf_start(slot), arc.end),
            Endpoint::Vertex { id, port } => (tracer.port_start(id, port)?, arc.end),
        };
        tracer.follow(arc.color, start, seed)
    }
}

struct Start {
    point: Complex,
    sign: f64,
}

/// Read-only tracing context shared by all arcs.
struct Tracer<'a> {
    poly: &'a Polynomial,
    radius: f64,
    vertices: &'a [SkVertex],
    leaves: &'a [Leaf],
    singular: &'a [Complex],
    cfg: TraceConfig,
}

impl<'a> Tracer<'a> {
    fn new(s: &'a Skizze) -> Self {
        Tracer {
            poly: &s.poly,
            radius: s.radius,
            vertices: &s.vertices,
            leaves: &s.leaves,
            singular: &s.singular,
            cfg: s.config,
        }
    }

    fn level(color: EdgeColor, v: Complex) -> f64 {
        match color {
            EdgeColor::Red => v.im,
            EdgeColor::Blue => v.re,
        }
    }

    fn tangent(&self, color: EdgeColor, z: Complex) -> Option<Complex> {
        let (_, d) = self.poly.eval_with_derivative(z);
        let nd = d.norm();
        if nd == 0.0 || !nd.is_finite() {
            return None;
        }
        let t = d.conj() / nd;
        Some(match color {
            EdgeColor::Red => t,
            EdgeColor::Blue => Complex::i() * t,
        })
    }

    /// Newton projection onto the level set along the gradient.
    fn correct(&self, color: EdgeColor, mut z: Complex, max_move: f64) -> Option<Complex> {
        let origin = z;
        for _ in 0..12 {
            let (v, d) = self.poly.eval_with_derivative(z);
            let f = Self::level(color, v);
            let tol = self.cfg.corrector_tol * self.poly.magnitude_at(z).max(f64::MIN_POSITIVE);
            if f.abs() <= tol {
                return ((z - origin).norm() <= max_move).then_some(z);
            }
            let nd2 = d.norm_sqr();
            if nd2 == 0.0 {
                return None;
            }
            let delta = match color {
                EdgeColor::Red => -f * Complex::i() * d.conj() / nd2,
                EdgeColor::Blue => -f * d.conj() / nd2,
            };
            z += delta;
            if !z.re.is_finite() || !z.im.is_finite() {
                return None;
            }
        }
        None
    }

    fn nearest_singular(&self, z: Complex) -> f64 {
        self.singular
            .iter()
            .map(|s| (s - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn leaf_start(&self, slot: usize) -> Start {
        let leaf = self.leaves[slot];
        let t = self.tangent(leaf.color, leaf.point).unwrap_or(Complex::new(1.0, 0.0));
        // point inward
        let outward = (t * leaf.point.conj()).re;
        Start {
            point: leaf.point,
            sign: if outward > 0.0 { -1.0 } else { 1.0 },
        }
    }

    fn port_start(&self, id: usize, port: usize) -> Result<Start> {
        let v = &self.vertices[id];
        let dir = Complex::from_polar(1.0, v.ports[port].angle);
        let offset = 10.0 * v.snap;
        let guess = v.position + dir * offset;
        let color = v.ports[port].color;
        let point = self
            .correct(color, guess, 0.5 * offset)
            .ok_or(Error::ConditioningFailure { at: guess })?;
        let t = self
            .tangent(color, point)
            .ok_or(Error::ConditioningFailure { at: point })?;
        Ok(Start {
            point,
            sign: if (t * dir.conj()).re >= 0.0 { 1.0 } else { -1.0 },
        })
    }

    /// Nearest port of `color` at vertex `id` to the direction of `z`.
    fn arrival_port(&self, id: usize, z: Complex, color: EdgeColor) -> usize {
        let v = &self.vertices[id];
        let a = (z - v.position).arg();
        let mut best = (f64::INFINITY, 0);
        for (i, p) in v.ports.iter().enumerate() {
            if p.color != color {
                continue;
            }
            let d = angle_dist(a, p.angle);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    fn leaf_at(&self, z: Complex, color: EdgeColor) -> Result<usize> {
        let n = self.leaves.len() / 4;
        let spacing = PI / (2.0 * n as f64) * self.radius;
        self.leaves
            .iter()
            .filter(|l| l.color == color)
            .map(|l| ((l.point - z).norm(), l.slot))
            .filter(|(d, _)| *d < 0.5 * spacing)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, s)| s)
            .ok_or_else(|| Error::TraceFailure(format!("arc left the trace disc at {z} away from every leaf")))
    }

    /// Follows the `color` level set from `start` until a vertex or the boundary.
    fn follow(&self, color: EdgeColor, start: Start, from: Endpoint) -> Result<Arc> {
        let r = self.radius;
        let mut z = start.point;
        let mut polyline = vec![match from {
            Endpoint::Vertex { id, .. } => self.vertices[id].position,
            Endpoint::Leaf(_) => z,
        }];
        if matches!(from, Endpoint::Vertex { .. }) {
            polyline.push(z);
        }
        let s = start.sign;
        let mut h = self.cfg.h0 * r;
        let t_of = |z: Complex| -> Result<Complex> {
            self.tangent(color, z)
                .map(|t| t * s)
                .ok_or(Error::ConditioningFailure { at: z })
        };
        for _ in 0..self.cfg.max_steps {
            let target = (0.25 * self.nearest_singular(z)).clamp(self.cfg.h_min * r, self.cfg.h_max * r);
            h = target.min(2.0 * h);
            let k1 = t_of(z)?;
            let next = loop {
                if h < self.cfg.h_min * r {
                    return Err(Error::ConditioningFailure { at: z });
                }
                let attempt = (|| -> Option<Complex> {
                    let k2 = self.tangent(color, z + k1 * (0.5 * h))? * s;
                    let k3 = self.tangent(color, z + k2 * (0.5 * h))? * s;
                    let k4 = self.tangent(color, z + k3 * h)? * s;
                    let pred = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                    let zn = self.correct(color, pred, 0.5 * h)?;
                    let tn = self.tangent(color, zn)? * s;
                    ((tn * k1.conj()).re > 0.8).then_some(zn)
                })();
                match attempt {
                    Some(zn) => break zn,
                    None => h *= 0.5,
                }
            };
            if next.norm() >= r {
                if matches!(from, Endpoint::Leaf(_)) && polyline.len() < 3 {
                    // still hugging the circle near the seed
                    return Err(Error::TraceFailure(format!("arc from {from:?} does not enter the disc")));
                }
                let exit = boundary_crossing(z, next, r);
                let slot = self.leaf_at(exit, color)?;
                polyline.push(self.leaves[slot].point);
                return Ok(Arc {
                    color,
                    polyline,
                    start: from,
                    end: Endpoint::Leaf(slot),
                });
            }
            let hit = self
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.carries(color))
                .filter(|(_, v)| (v.position - next).norm() < v.snap)
                .map(|(i, v)| ((v.position - next).norm(), i))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((_, id)) = hit {
                let port = self.arrival_port(id, z, color);
                polyline.push(self.vertices[id].position);
                return Ok(Arc {
                    color,
                    polyline,
                    start: from,
                    end: Endpoint::Vertex { id, port },
                });
            }
            polyline.push(next);
            z = next;
        }
        Err(Error::TraceFailure(format!(
            "arc from {from:?} exceeded {} steps",
            self.cfg.max_steps
        )))
    }
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Point where the segment `a -> b` meets `|z| = r`, with `|a| < r <= |b|`.
fn boundary_crossing(a: Complex, b: Complex, r: f64) -> Complex {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (a + (b - a) * mid).norm() < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    a + (b - a) * hi
}

/// Branch directions of `c (z - z0)^m`: `φ_j = (jπ/2 - arg c)/m`, `j` even red.
fn local_ports(c: Complex, m: usize, keep: impl Fn(usize) -> bool) -> Vec<PortDir> {
    let ac = c.arg();
    (0..4 * m)
        .filter(|&j| keep(j))
        .map(|j| PortDir {
            angle: (j as f64 * PI / 2.0 - ac) / m as f64,
            color: if j % 2 == 0 { EdgeColor::Red } else { EdgeColor::Blue },
        })
        .collect()
}

/// Boundary crossings of `Re P = 0` and `Im P = 0` on `|z| = r`, sorted by
/// angle; `None` unless there are `2n` of each and the colors alternate.
fn seed_circle(p: &Polynomial, r: f64) -> Option<Vec<(f64, EdgeColor)>> {
    let n = p.degree();
    let samples = 16 * n;
    let step = 2.0 * PI / samples as f64;
    let offset = step / 7.3;
    let mut found = Vec::new();
    for color in [EdgeColor::Red, EdgeColor::Blue] {
        let f = |th: f64| Tracer::level(color, p.eval(Complex::from_polar(r, th)));
        let mut count = 0;
        for i in 0..samples {
            let (a, b) = (offset + i as f64 * step, offset + (i + 1) as f64 * step);
            let (fa, fb) = (f(a), f(b));
            if (fa < 0.0) == (fb < 0.0) {
                continue;
            }
            let (mut lo, mut hi, flo) = (a, b, fa);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if (f(mid) < 0.0) == (flo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            found.push(((0.5 * (lo + hi)).rem_euclid(2.0 * PI), color));
            count += 1;
        }
        if count != 2 * n {
            return None;
        }
    }
    let mut tagged = found;
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alternating = (0..tagged.len()).all(|i| tagged[i].1 != tagged[(i + 1) % tagged.len()].1);
    alternating.then_some(tagged)
}

/// Slot offset for the angularly sorted crossings: slot of crossing `j` is
/// `(j + off) mod 4n`, parity fixed by color, total deviation minimal.
pub(crate) fn assign_slots(crossings: &[(f64, EdgeColor)]) -> Vec<usize> {
    let m = crossings.len();
    let unit = 2.0 * PI / m as f64;
    let parity = usize::from(crossings[0].1 == EdgeColor::Blue);
    let best = (0..m)
        .filter(|off| off % 2 == parity)
        .map(|off| {
            let dev: f64 = crossings
                .iter()
                .enumerate()
                .map(|(j, (a, _))| angle_dist(*a, ((j + off) % m) as f64 * unit))
                .sum();
            (dev, off)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, off)| off)
        .unwrap_or(0);
    (0..m).map(|j| (j + best) % m).collect()
}

/// Largest axis offset of a critical value `u` still counted as on the axis:
/// an angular tolerance plus the rounding floor of evaluating `P`.
pub fn axis_tolerance(axis_eps: f64, u: Complex, magnitude: f64) -> f64 {
    axis_eps * u.norm() + 64.0 * f64::EPSILON * magnitude
}

/// Traces the skizze of `p`.
pub fn trace(p: &Polynomial, cfg: &TraceConfig) -> Result<Skizze> {
    cfg.validate()?;
    let n = p.degree();
    let roots = find_roots(p, cfg.root_tol)?;
    let crit = critical_data(p, cfg.root_tol)?;

    let mut vertices = Vec::new();
    let mut singular = Vec::new();
    let reach: Vec<f64> = roots
        .roots
        .iter()
        .map(|r| {
            let spread = if r.multiplicity > 1 {
                4.0 * multiplicity_radius(p, r.point, r.multiplicity)
            } else {
                0.0
            };
            spread.max(roots.cluster_radius)
        })
        .collect();
    for (r, &reach) in roots.roots.iter().zip(&reach) {
        let c = p.taylor_at(r.point)[r.multiplicity];
        vertices.push(SkVertex {
            position: r.point,
            kind: SkVertexKind::Root { mult: r.multiplicity },
            ports: local_ports(c, r.multiplicity, |_| true),
            snap: reach,
        });
        singular.push(r.point);
    }
    for cp in &crit.points {
        singular.push(cp.point);
        let absorbed = roots
            .roots
            .iter()
            .zip(&reach)
            .any(|(r, &reach)| (r.point - cp.point).norm() <= reach.max(1e-12));
        if absorbed {
            continue;
        }
        let scale = axis_tolerance(cfg.axis_eps, cp.value, p.magnitude_at(cp.point));
        let color = if cp.value.re.abs() <= scale {
            EdgeColor::Blue
        } else if cp.value.im.abs() <= scale {
            EdgeColor::Red
        } else {
            continue;
        };
        let m = cp.multiplicity + 1;
        let c = p.taylor_at(cp.point)[m];
        let want = usize::from(color == EdgeColor::Blue);
        // a level curve off by `gap` misses the point by about (gap/|c|)^(1/m)
        let gap = match color {
            EdgeColor::Blue => cp.value.re.abs(),
            EdgeColor::Red => cp.value.im.abs(),
        };
        vertices.push(SkVertex {
            position: cp.point,
            kind: SkVertexKind::Crit { mult: cp.multiplicity, color },
            ports: local_ports(c, m, |j| j % 2 == want),
            snap: 8.0 * (gap / c.norm()).powf(1.0 / m as f64),
        });
    }

    let mut radius = root_bound(p).max(1.0);
    let mut crossings = None;
    for _ in 0..=10 {
        if let Some(c) = seed_circle(p, radius) {
            crossings = Some(c);
            break;
        }
        radius *= 2.0;
    }
    let crossings = crossings.ok_or_else(|| {
        Error::TraceFailure(format!("boundary seeding failed up to radius {radius}"))
    })?;
    let slots = assign_slots(&crossings);
    let mut leaves = vec![
        Leaf {
            slot: 0,
            point: Complex::new(0.0, 0.0),
            color: EdgeColor::Red
        };
        4 * n
    ];
    for ((angle, color), slot) in crossings.iter().zip(slots) {
        leaves[slot] = Leaf {
            slot,
            point: Complex::from_polar(radius, *angle),
            color: *color,
        };
    }

    for v in &mut vertices {
        v.snap = v.snap.max(cfg.snap_radius * radius);
    }

    let mut sk = Skizze {
        poly: p.clone(),
        radius,
        vertices,
        leaves,
        arcs: Vec::new(),
        singular,
        config: *cfg,
    };

    let tracer = Tracer::new(&sk);
    let leaf_arcs: Vec<Arc> = (0..4 * n)
        .into_par_iter()
        .map(|slot| {
            let leaf = tracer.leaves[slot];
            tracer.follow(leaf.color, tracer.leaf_start(slot), Endpoint::Leaf(slot))
        })
        .collect::<Result<_>>()?;

    let mut used: Vec<Vec<bool>> = sk.vertices.iter().map(|v| vec![false; v.ports.len()]).collect();
    let claim = |e: Endpoint, used: &mut Vec<Vec<bool>>| -> Result<()> {
        match e {
            Endpoint::Leaf(_) => Err(Error::TraceFailure("leaf reached twice".into())),
            Endpoint::Vertex { id, port } => {
                if std::mem::replace(&mut used[id][port], true) {
                    Err(Error::TraceFailure(format!("port {port} of vertex {id} reached twice")))
                } else {
                    Ok(())
                }
            }
        }
    };
    for arc in &leaf_arcs {
        claim(arc.end, &mut used)?;
    }
    let mut arcs = leaf_arcs;
    loop {
        let free = used
            .iter()
            .enumerate()
            .find_map(|(id, ports)| ports.iter().position(|u| !u).map(|port| (id, port)));
        let Some((id, port)) = free else { break };
        used[id][port] = true;
        let color = tracer.vertices[id].ports[port].color;
        let from = Endpoint::Vertex { id, port };
        let arc = tracer.follow(color, tracer.port_start(id, port)?, from)?;
        if arc.end == from {
            return Err(Error::TraceFailure(format!("arc returned to its own port at vertex {id}")));
        }
        claim(arc.end, &mut used)?;
        arcs.push(arc);
    }
    sk.arcs = arcs;
    Ok(sk)
}

/// Combinatorial type of a traced skizze.
pub fn extract_graph(s: &Skizze) -> Result<GaussGraph> {
    let n = s.n();
    let nv = s.vertices.len();
    let node = |e: Endpoint| match e {
        Endpoint::Leaf(slot) => nv + slot,
        Endpoint::Vertex { id, .. } => id,
    };
    let mut kinds: Vec<VertexKind> = s
        .vertices
        .iter()
        .map(|v| match v.kind {
            SkVertexKind::Root { mult } => VertexKind::Root { mult },
            SkVertexKind::Crit { .. } => VertexKind::Crit,
        })
        .collect();
    kinds.extend((0..4 * n).map(|slot| VertexKind::Leaf { slot }));
    let mut ports: Vec<Vec<Option<Port>>> = s
        .vertices
        .iter()
        .map(|v| vec![None; v.ports.len()])
        .chain((0..4 * n).map(|_| vec![None]))
        .collect();
    let mut place = |at: Endpoint, other: Endpoint, color: EdgeColor| {
        let to = node(other);
        match at {
            Endpoint::Leaf(slot) => ports[nv + slot][0] = Some(Port { to, color }),
            Endpoint::Vertex { id, port } => ports[id][port] = Some(Port { to, color }),
        }
    };
    for arc in &s.arcs {
        place(arc.start, arc.end, arc.color);
        place(arc.end, arc.start, arc.color);
    }
    let rotation = ports
        .into_iter()
        .enumerate()
        .map(|(v, rot)| {
            rot.into_iter()
                .collect::<Option<Vec<Port>>>()
                .ok_or_else(|| Error::ExtractionFailure(format!("vertex {v} has an untraced branch")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = GaussGraph::from_parts(n, kinds, rotation)
        .map_err(|e| Error::ExtractionFailure(e.to_string()))?;
    g.compute_faces()
        .map_err(|e| Error::ExtractionFailure(e.to_string()))?;
    let report = g.validate();
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::ExtractionFailure(list.join("; ")));
    }
    Ok(g)
}

/// Stratum of `p` with default tracing parameters.
pub fn classify(p: &Polynomial) -> Result<(GaussGraph, CanonicalCode)> {
    classify_with(p, &TraceConfig::default())
}

pub fn classify_with(p: &Polynomial, cfg: &TraceConfig) -> Result<(GaussGraph, CanonicalCode)> {
    let g = extract_graph(&trace(p, cfg)?)?;
    let code = g.canonical_code();
    Ok((g, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn identity_traces_four_rays() {
        let s = trace(&poly("1:0,0:0"), &TraceConfig::default()).unwrap();
        assert_eq!(s.vertices.len(), 1);
        assert_eq!(s.arcs.len(), 4);
        for arc in &s.arcs {
            let Endpoint::Leaf(slot) = arc.start else { panic!() };
            let dir = Complex::from_polar(1.0, slot as f64 * PI / 2.0);
            for z in &arc.polyline {
                assert!((z * dir.conj()).im.abs() < 1e-9, "{z} off ray {slot}");
            }
        }
        let (_, code) = classify(&poly("1:0,0:0")).unwrap();
        assert_eq!(code.as_str(), "n1|T[L0 r:R4 L1 L2 L3]");
    }

    #[test]
    fn z2_minus_1_matches_axes_and_hyperbola() {
        let (g, code) = classify(&poly("1:0,0:0,-1:0")).unwrap();
        assert_eq!(code.as_str(), "n2|T[L0 r:R4 L1 c:R4 L2 r:R4 L3 L4 L5 ^ L6 ^ L7]");
        assert_eq!(g.crits().count(), 1);
    }

    #[test]
    fn z_power_is_a_star() {
        for n in 1..=5 {
            let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
            coeffs[n] = Complex::new(1.0, 0.0);
            let p = Polynomial::from_ascending(coeffs).unwrap();
            let (g, _) = classify(&p).unwrap();
            assert_eq!(g.internal_vertex_count(), 1);
            assert_eq!(g.valency(0), 4 * n);
        }
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = TraceConfig {
            h_min: 1.0,
            ..TraceConfig::default()
        };
        assert!(trace(&poly("1:0,0:0"), &cfg).is_err());
    }
}

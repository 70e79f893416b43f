//! Configurations of labelled points and their operadic structure maps:
//! directions, relative distances, weak-partition composition, doubling and
//! forgetting, plus a tracer-backed check that composition is compatible
//! with root contraction.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CanonicalCode, GaussGraph, Port, VertexKind};
use crate::poly::{format_complex, parse_complex, Complex, Polynomial};
use crate::poset::{apply_contract, apply_contract_traced, enumerate_moves, generic_estimate, MoveDescriptor};
use crate::tracer::{assign_slots, classify, extract_graph, trace, Endpoint, SkVertexKind, Skizze, TraceConfig};

pub const DEFAULT_COMPOSITION_CAP: usize = 4;
pub const MAX_HALVINGS: usize = 8;

/// Ordered labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    labels: Vec<String>,
    points: Vec<Complex>,
    compactified: bool,
}

impl Configuration {
    pub fn new(labels: Vec<String>, points: Vec<Complex>) -> Result<Self> {
        Self::build(labels, points, false)
    }

    /// Coincident points allowed.
    pub fn compactified(labels: Vec<String>, points: Vec<Complex>) -> Result<Self> {
        Self::build(labels, points, true)
    }

    /// Labels `1..=n` in order.
    pub fn from_points(points: &[Complex]) -> Result<Self> {
        Self::new((1..=points.len()).map(|i| i.to_string()).collect(), points.to_vec())
    }

    fn build(labels: Vec<String>, points: Vec<Complex>, compactified: bool) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidArgument("repeated label".into()));
        }
        if let Some(bad) = labels.iter().find(|l| l.is_empty() || l.contains(['=', ',']) || l.contains(char::is_whitespace)) {
            return Err(Error::InvalidArgument(format!("bad label {bad:?}")));
        }
        if !compactified {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    if points[i] == points[j] {
                        return Err(Error::InvalidArgument(format!(
                            "points {} and {} coincide",
                            labels[i], labels[j]
                        )));
                    }
                }
            }
        }
        Ok(Configuration {
            labels,
            points,
            compactified,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn is_compactified(&self) -> bool {
        self.compactified
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidArgument(format!("no label {label:?}")))
    }

    pub fn point(&self, label: &str) -> Result<Complex> {
        Ok(self.points[self.index_of(label)?])
    }

    /// `∏ (z - x(a))`.
    pub fn polynomial(&self) -> Result<Polynomial> {
        Polynomial::from_roots(&self.points)
    }

    /// Same points under new labels.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Self::build(self.labels.iter().map(|l| f(l)).collect(), self.points.clone(), self.compactified)
    }

    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.min((self.points[i] - self.points[j]).norm());
            }
        }
        d
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, z)) in self.labels.iter().zip(&self.points).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}={}", format_complex(*z))?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    /// `label=re:im` entries separated by commas or whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut points = Vec::new();
        for entry in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|e| !e.is_empty()) {
            let (l, z) = entry
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected label=re:im, got {entry:?}")))?;
            labels.push(l.to_string());
            points.push(parse_complex(z)?);
        }
        Configuration::new(labels, points)
    }
}

/// `(x(b) - x(a)) / |x(b) - x(a)|`.
pub fn theta(x: &Configuration, a: &str, b: &str) -> Result<Complex> {
    let d = x.point(b)? - x.point(a)?;
    if d.norm() == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    Ok(d / d.norm())
}

/// `|x(a) - x(b)| / |x(a) - x(c)|`.
pub fn delta(x: &Configuration, a: &str, b: &str, c: &str) -> Result<f64> {
    let (pa, pb, pc) = (x.point(a)?, x.point(b)?, x.point(c)?);
    let den = (pa - pc).norm();
    if den == 0.0 {
        return Err(Error::DivisionDegenerate);
    }
    Ok((pa - pb).norm() / den)
}

/// Rebuilds a configuration from its directions and relative distances,
/// with the first point at 0 and the second at distance 1.
pub fn from_theta_delta(
    labels: &[String],
    theta: impl Fn(&str, &str) -> Result<Complex>,
    delta: impl Fn(&str, &str, &str) -> Result<f64>,
) -> Result<Configuration> {
    let mut points = vec![Complex::new(0.0, 0.0); labels.len()];
    if labels.len() >= 2 {
        let (a, b) = (&labels[0], &labels[1]);
        points[1] = theta(a, b)?;
        for (i, c) in labels.iter().enumerate().skip(2) {
            points[i] = theta(a, c)? / delta(a, b, c)?;
        }
    }
    Configuration::new(labels.to_vec(), points)
}

/// Equal after translating the first point to 0 and scaling the first
/// distance to 1.
pub fn similar(x: &Configuration, y: &Configuration, tol: f64) -> bool {
    if x.labels != y.labels {
        return false;
    }
    let norm = |c: &Configuration| -> Vec<Complex> {
        let o = c.points[0];
        let s = c.points.get(1).map_or(1.0, |p| (p - o).norm());
        c.points.iter().map(|p| (p - o) / s).collect()
    };
    norm(x).iter().zip(norm(y)).all(|(a, b)| (a - b).norm() <= tol)
}

/// Map `ṽ: S -> Q`; fibers may be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakPartition {
    target: Vec<usize>,
    q: usize,
}

impl WeakPartition {
    pub fn new(target: Vec<usize>, q: usize) -> Result<Self> {
        if let Some(&bad) = target.iter().find(|&&p| p >= q) {
            return Err(Error::InvalidArgument(format!("target {bad} outside Q of size {q}")));
        }
        Ok(WeakPartition { target, q })
    }

    pub fn source_len(&self) -> usize {
        self.target.len()
    }

    pub fn target_len(&self) -> usize {
        self.q
    }

    pub fn target(&self, a: usize) -> usize {
        self.target[a]
    }

    pub fn fiber(&self, p: usize) -> Vec<usize> {
        (0..self.target.len()).filter(|&a| self.target[a] == p).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartNormalization {
    pub base: Complex,
    pub centroid: Complex,
    /// Max modulus after centring (1 when there is nothing to scale).
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositionWitness {
    pub eps: f64,
    pub parts: Vec<PartNormalization>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Composition {
    pub config: Configuration,
    pub partition: WeakPartition,
    pub witness: CompositionWitness,
}

/// Centroid at 0, max modulus 1.
pub fn normalize(part: &Configuration) -> (Vec<Complex>, Complex, f64) {
    if part.is_empty() {
        return (Vec::new(), Complex::new(0.0, 0.0), 1.0);
    }
    let centroid = part.points.iter().sum::<Complex>() / part.len() as f64;
    let centred: Vec<Complex> = part.points.iter().map(|p| p - centroid).collect();
    let m = centred.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let scale = if m > 0.0 { m } else { 1.0 };
    (centred.iter().map(|p| p / scale).collect(), centroid, scale)
}

fn check_scale(base: &Configuration, eps: f64) -> Result<()> {
    let max_admissible = base.min_distance() / 8.0;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {eps}")));
    }
    if eps > max_admissible {
        return Err(Error::ScaleTooLarge { max_admissible });
    }
    Ok(())
}

fn insert(base: &Configuration, parts: &[Configuration], eps: f64, normalized: bool) -> Result<Composition> {
    if parts.len() != base.len() {
        return Err(Error::InvalidArgument(format!(
            "{} parts for {} base points",
            parts.len(),
            base.len()
        )));
    }
    check_scale(base, eps)?;
    let mut labels = Vec::new();
    let mut points = Vec::new();
    let mut target = Vec::new();
    let mut norms = Vec::new();
    for (p, part) in parts.iter().enumerate() {
        let (local, centroid, scale) = if normalized {
            normalize(part)
        } else {
            (part.points.clone(), Complex::new(0.0, 0.0), 1.0)
        };
        norms.push(PartNormalization {
            base: base.points[p],
            centroid,
            scale,
        });
        for (l, z) in part.labels.iter().zip(local) {
            labels.push(l.clone());
            points.push(base.points[p] + z * eps);
            target.push(p);
        }
    }
    Ok(Composition {
        config: Configuration::build(labels, points, base.compactified)?,
        partition: WeakPartition::new(target, base.len())?,
        witness: CompositionWitness { eps, parts: norms },
    })
}

/// `x₀(p) + ε·norm(x_p)(a)` for `a` in part `p`, labels in ordered-sum order.
pub fn compose(base: &Configuration, parts: &[Configuration], eps: f64) -> Result<Composition> {
    insert(base, parts, eps, true)
}

/// As [`compose`] without normalizing the parts.
pub fn compose_raw(base: &Configuration, parts: &[Configuration], eps: f64) -> Result<Composition> {
    insert(base, parts, eps, false)
}

fn fresh_label(x: &Configuration, from: &str) -> String {
    let mut l = format!("{from}'");
    while x.labels.contains(&l) {
        l.push('\'');
    }
    l
}

/// Inserts `x(i) + εv` right after `i`.
pub fn doubling(x: &Configuration, i: &str, v: Complex, eps: f64) -> Result<Configuration> {
    let k = x.index_of(i)?;
    if (v.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("direction {v} is not a unit vector")));
    }
    let room = x
        .points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, p)| (p - x.points[k]).norm())
        .fold(f64::INFINITY, f64::min);
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {eps}")));
    }
    if eps >= 0.5 * room {
        return Err(Error::ScaleTooLarge {
            max_admissible: 0.5 * room,
        });
    }
    let mut labels = x.labels.clone();
    let mut points = x.points.clone();
    labels.insert(k + 1, fresh_label(x, i));
    points.insert(k + 1, x.points[k] + v * eps);
    Configuration::build(labels, points, x.compactified)
}

pub fn forgetting(x: &Configuration, j: &str) -> Result<Configuration> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument("cannot forget the only point".into()));
    }
    let k = x.index_of(j)?;
    let mut labels = x.labels.clone();
    let mut points = x.points.clone();
    labels.remove(k);
    points.remove(k);
    Configuration::build(labels, points, x.compactified)
}

/// Polynomial side of forgetting: the quotient by `z - root`.
pub fn forget_root(p: &Polynomial, root: Complex) -> Result<Polynomial> {
    Ok(p.deflate(root)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartCheck {
    pub index: usize,
    pub expected: CanonicalCode,
    pub found: Option<CanonicalCode>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositionReport {
    pub passed: bool,
    pub inconclusive: bool,
    pub eps: f64,
    pub halvings: usize,
    pub composed_code: Option<CanonicalCode>,
    pub base_code: CanonicalCode,
    /// Codes reachable by contracting every cluster of roots.
    pub contracted_codes: Vec<CanonicalCode>,
    /// A contracted code equals the base code, or lies below it when the
    /// degenerate base sits on further walls.
    pub contraction_matches: bool,
    pub contraction_exact: bool,
    pub parts: Vec<PartCheck>,
    pub diagnostics: Vec<String>,
}

struct Attempt {
    composed: Option<CanonicalCode>,
    contracted: Vec<CanonicalCode>,
    contraction_ok: bool,
    exact: bool,
    parts: Vec<PartCheck>,
    diagnostics: Vec<String>,
}

impl Attempt {
    fn ok(&self) -> bool {
        self.contraction_ok && self.parts.iter().all(|p| p.matches)
    }
}

/// Degenerate base `∏ (z - x₀(p))^{|A_p|}` over nonempty fibers.
pub fn degenerate_base(base: &Configuration, parts: &[Configuration]) -> Result<Polynomial> {
    let roots: Vec<Complex> = base
        .points
        .iter()
        .zip(parts)
        .flat_map(|(&z, part)| std::iter::repeat_n(z, part.len()))
        .collect();
    Polynomial::from_roots(&roots)
}

pub fn verify_composition(base: &Configuration, parts: &[Configuration], eps0: f64) -> Result<CompositionReport> {
    verify_composition_with(base, parts, eps0, DEFAULT_COMPOSITION_CAP)
}

pub fn verify_composition_with(
    base: &Configuration,
    parts: &[Configuration],
    eps0: f64,
    cap: usize,
) -> Result<CompositionReport> {
    let total: usize = parts.iter().map(Configuration::len).sum();
    if total > cap {
        return Err(Error::CapExceeded {
            n: total,
            cap,
            estimate: generic_estimate(total),
        });
    }
    if total == 0 {
        return Err(Error::InvalidArgument("composition has no points".into()));
    }
    compose(base, parts, eps0)?;
    let base_code = classify(&degenerate_base(base, parts)?)?.1;

    let mut previous: Option<Attempt> = None;
    let mut eps = eps0;
    let mut last_diag = Vec::new();
    for halvings in 0..=MAX_HALVINGS {
        let attempt = attempt(base, parts, eps, &base_code);
        let stable = match &previous {
            Some(prev) => prev.ok() && attempt.ok() && prev.composed == attempt.composed,
            None => false,
        };
        if stable {
            let prev = previous.unwrap();
            return Ok(CompositionReport {
                passed: true,
                inconclusive: false,
                eps: 2.0 * eps,
                halvings: halvings - 1,
                composed_code: prev.composed,
                base_code,
                contracted_codes: prev.contracted,
                contraction_matches: true,
                contraction_exact: prev.exact,
                parts: prev.parts,
                diagnostics: prev.diagnostics,
            });
        }
        last_diag.extend(attempt.diagnostics.iter().map(|d| format!("eps {eps:e}: {d}")));
        previous = Some(attempt);
        eps *= 0.5;
    }
    let last = previous.unwrap();
    Ok(CompositionReport {
        passed: false,
        inconclusive: true,
        eps: 2.0 * eps,
        halvings: MAX_HALVINGS,
        composed_code: last.composed,
        base_code,
        contracted_codes: last.contracted,
        contraction_matches: last.contraction_ok,
        contraction_exact: last.exact,
        parts: last.parts,
        diagnostics: last_diag,
    })
}

fn attempt(base: &Configuration, parts: &[Configuration], eps: f64, base_code: &CanonicalCode) -> Attempt {
    let mut diagnostics = Vec::new();
    let fail = |d: String| Attempt {
        composed: None,
        contracted: Vec::new(),
        contraction_ok: false,
        exact: false,
        parts: Vec::new(),
        diagnostics: vec![d],
    };
    let comp = match compose(base, parts, eps) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let p = match comp.config.polynomial() {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let sk = match trace(&p, &TraceConfig::default()) {
        Ok(s) => s,
        Err(e) => return fail(format!("composed polynomial: {e}")),
    };
    let g = match extract_graph(&sk) {
        Ok(g) => g,
        Err(e) => return fail(format!("composed polynomial: {e}")),
    };
    let composed = g.canonical_code();

    let clusters: Vec<Vec<usize>> = (0..base.len())
        .filter(|&q| parts[q].len() >= 2)
        .map(|q| {
            sk.vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| matches!(v.kind, SkVertexKind::Root { .. }))
                .filter(|(_, v)| (v.position - base.points[q]).norm() <= 2.0 * eps)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let (contracted, parts_checked) = rayon::join(
        || contract_all(&g, &clusters),
        || {
            (0..base.len())
                .into_par_iter()
                .filter(|&q| parts[q].len() >= 2)
                .map(|q| check_part(&sk, &comp.config, &comp.partition, base, parts, q, eps))
                .collect::<Vec<_>>()
        },
    );
    let mut checks = Vec::new();
    for r in parts_checked {
        match r {
            Ok((c, d)) => {
                diagnostics.extend(d);
                checks.push(c);
            }
            Err(e) => diagnostics.push(e.to_string()),
        }
    }
    let exact = contracted.contains(base_code);
    let contraction_ok = exact || contracted.iter().any(|c| below(c, base_code));
    if contraction_ok && !exact {
        diagnostics.push(format!("contraction lies strictly below the degenerate base {base_code}"));
    }
    if !contraction_ok {
        diagnostics.push(format!(
            "no contraction of {} reaches {base_code} (reached {})",
            composed,
            contracted.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" ")
        ));
    }
    let expected_parts = (0..base.len()).filter(|&q| parts[q].len() >= 2).count();
    let parts_ok = checks.len() == expected_parts;
    Attempt {
        composed: Some(composed),
        contracted,
        contraction_ok: contraction_ok && parts_ok,
        exact,
        parts: checks,
        diagnostics,
    }
}

/// Whether `target` is reachable from `from` by contracting moves.
fn below(from: &CanonicalCode, target: &CanonicalCode) -> bool {
    let (Ok(g), Ok(t)) = (from.decode(), target.decode()) else {
        return false;
    };
    let limit = t.codim();
    let mut seen = BTreeSet::from([from.clone()]);
    let mut frontier = vec![g];
    while let Some(g) = frontier.pop() {
        for m in enumerate_moves(&g) {
            let Ok(h) = apply_contract(&g, &m) else { continue };
            let code = h.canonical_code();
            if &code == target {
                return true;
            }
            if h.codim() < limit && seen.insert(code) {
                frontier.push(h);
            }
        }
    }
    false
}

/// Every code reachable by merging each cluster into one root, all at once or
/// a pair at a time, across every admissible face.
fn contract_all(g: &GaussGraph, clusters: &[Vec<usize>]) -> Vec<CanonicalCode> {
    fn go(
        g: &GaussGraph,
        clusters: &[Vec<usize>],
        seen: &mut BTreeSet<String>,
        out: &mut BTreeSet<CanonicalCode>,
    ) {
        let Some(pos) = clusters.iter().position(|c| c.len() >= 2) else {
            out.insert(g.canonical_code());
            return;
        };
        if !seen.insert(format!("{}{clusters:?}", g.canonical_code())) {
            return;
        }
        let cluster = &clusters[pos];
        let mut choices = vec![cluster.clone()];
        if cluster.len() > 2 {
            for i in 0..cluster.len() {
                for j in i + 1..cluster.len() {
                    choices.push(vec![cluster[i], cluster[j]]);
                }
            }
        }
        let faces = g.faces().map_or(0, |t| t.faces.len());
        for roots in choices {
            for face in std::iter::once(None).chain((0..faces).map(Some)) {
                let d = MoveDescriptor::Case3 {
                    face,
                    roots: roots.clone(),
                };
                let Ok((h, map)) = apply_contract_traced(g, &d) else { continue };
                let moved: Vec<Vec<usize>> = clusters
                    .iter()
                    .map(|c| {
                        let set: BTreeSet<usize> = c.iter().map(|&v| map[v]).collect();
                        set.into_iter().collect()
                    })
                    .collect();
                go(&h, &moved, seen, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, clusters, &mut BTreeSet::new(), &mut out);
    out.into_iter().collect()
}

/// Forest of the composed skizze inside the disc around base point `q`,
/// compared with the part polynomial rescaled to carry the same phase.
fn check_part(
    sk: &Skizze,
    composed: &Configuration,
    partition: &WeakPartition,
    base: &Configuration,
    parts: &[Configuration],
    q: usize,
    eps: f64,
) -> Result<(PartCheck, Vec<String>)> {
    let (local, _, _) = normalize(&parts[q]);
    let k = local.len();
    let centre = base.points[q];
    // P(centre + εu) ≈ C·Q(u); with λ^k = 1/C, C·Q(λw) is monic
    let mut cst = Complex::new(eps, 0.0).powu(k as u32);
    for (a, z) in composed.points.iter().enumerate() {
        if partition.target(a) != q {
            cst *= centre - z;
        }
    }
    let lambda = Complex::from_polar(cst.norm().powf(-1.0 / k as f64), -cst.arg() / k as f64);
    let model = Polynomial::from_roots(&local.iter().map(|z| z / lambda).collect::<Vec<_>>())?;
    let expected = classify(&model)?.1;

    let mut diam: f64 = 0.0;
    for a in &local {
        for b in &local {
            diam = diam.max((a - b).norm());
        }
    }
    let rd = 2.0 * eps * diam;
    let inside = |z: Complex| (z - centre).norm() < rd;
    let mut diag = Vec::new();

    let ids: Vec<usize> = (0..sk.vertices.len()).filter(|&v| inside(sk.vertices[v].position)).collect();
    let local_id = |v: usize| ids.binary_search(&v).ok();
    let m = ids.len();
    let mut rot: Vec<Vec<Option<Port>>> = ids.iter().map(|&v| vec![None; sk.vertices[v].ports.len()]).collect();
    let mut crossings: Vec<(f64, crate::graph::EdgeColor, usize, usize)> = Vec::new();

    for arc in &sk.arcs {
        let end_in = |e: Endpoint| match e {
            Endpoint::Vertex { id, port } => local_id(id).map(|l| (l, port)),
            Endpoint::Leaf(_) => None,
        };
        let line = &arc.polyline;
        match (end_in(arc.start), end_in(arc.end)) {
            (Some((a, pa)), Some((b, pb))) => {
                if line.iter().any(|&z| !inside(z)) {
                    diag.push(format!("part {q}: an arc between inner vertices leaves the disc"));
                }
                rot[a][pa] = Some(Port { to: b, color: arc.color });
                rot[b][pb] = Some(Port { to: a, color: arc.color });
            }
            (Some((a, pa)), None) | (None, Some((a, pa))) => {
                let forward = end_in(arc.start).is_some();
                let pts: Vec<Complex> = if forward {
                    line.clone()
                } else {
                    line.iter().rev().copied().collect()
                };
                let Some(j) = pts.iter().position(|&z| !inside(z)) else {
                    diag.push(format!("part {q}: arc to the outside never leaves the disc"));
                    continue;
                };
                if pts[j..].iter().any(|&z| inside(z)) {
                    diag.push(format!("part {q}: arc re-enters the disc"));
                }
                let (z0, z1) = (pts[j - 1], pts[j]);
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if inside(z0 + (z1 - z0) * mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let cross = z0 + (z1 - z0) * hi;
                let w_angle = ((cross - centre).arg() - lambda.arg()).rem_euclid(2.0 * PI);
                crossings.push((w_angle, arc.color, a, pa));
            }
            (None, None) => {
                if line.iter().any(|&z| inside(z)) {
                    diag.push(format!("part {q}: an outer arc passes through the disc"));
                }
            }
        }
    }
    let fail = |diag: Vec<String>| {
        Ok((
            PartCheck {
                index: q,
                expected: expected.clone(),
                found: None,
                matches: false,
            },
            diag,
        ))
    };
    crossings.sort_by(|x, y| x.0.total_cmp(&y.0));
    let alternating = crossings
        .iter()
        .zip(crossings.iter().cycle().skip(1))
        .all(|(x, y)| x.1 != y.1);
    if crossings.len() != 4 * k || !alternating {
        diag.push(format!(
            "part {q}: {} boundary crossings, expected {} alternating",
            crossings.len(),
            4 * k
        ));
        return fail(diag);
    }
    if !diag.is_empty() {
        return fail(diag);
    }
    let slots = assign_slots(&crossings.iter().map(|c| (c.0, c.1)).collect::<Vec<_>>());
    let mut kinds: Vec<VertexKind> = ids
        .iter()
        .map(|&v| match sk.vertices[v].kind {
            SkVertexKind::Root { mult } => VertexKind::Root { mult },
            SkVertexKind::Crit { .. } => VertexKind::Crit,
        })
        .collect();
    kinds.extend((0..4 * k).map(|slot| VertexKind::Leaf { slot }));
    let mut full: Vec<Vec<Option<Port>>> = rot;
    full.extend((0..4 * k).map(|_| vec![None]));
    for (c, &slot) in crossings.iter().zip(&slots) {
        full[c.2][c.3] = Some(Port { to: m + slot, color: c.1 });
        full[m + slot][0] = Some(Port { to: c.2, color: c.1 });
    }
    let Some(rotation) = full.into_iter().map(|r| r.into_iter().collect::<Option<Vec<Port>>>()).collect::<Option<Vec<_>>>() else {
        diag.push(format!("part {q}: an inner port has no arc"));
        return fail(diag);
    };
    let found = GaussGraph::from_parts(k, kinds, rotation).and_then(|mut g| {
        g.compute_faces()?;
        Ok(g.canonical_code())
    });
    match found {
        Ok(code) => {
            let matches = code == expected;
            if !matches {
                diag.push(format!("part {q}: local forest {code} differs from {expected}"));
            }
            Ok((
                PartCheck {
                    index: q,
                    expected,
                    found: Some(code),
                    matches,
                },
                diag,
            ))
        }
        Err(e) => {
            diag.push(format!("part {q}: local forest is malformed: {e}"));
            fail(diag)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn text_round_trip() {
        let x: Configuration = "a=0:0, b=1:-2.5 c=0:1".parse().unwrap();
        assert_eq!(x.labels(), ["a", "b", "c"]);
        assert_eq!(x.point("b").unwrap(), c(1.0, -2.5));
        assert_eq!(x.to_string().parse::<Configuration>().unwrap(), x);
        assert!("a=0:0,a=1:0".parse::<Configuration>().is_err());
        assert!("a=0:0,b=0:0".parse::<Configuration>().is_err());
    }

    #[test]
    fn directions_and_ratios() {
        let x = Configuration::from_points(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(theta(&x, "1", "2").unwrap(), c(1.0, 0.0));
        assert_eq!(delta(&x, "1", "2", "3").unwrap(), 0.5);
        assert_eq!(delta(&x, "1", "1", "3").unwrap(), 0.0);
        let y = Configuration::from_points(&[c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(theta(&y, "1", "2").unwrap(), c(0.0, 1.0));
        assert!(matches!(delta(&x, "1", "2", "1"), Err(Error::DivisionDegenerate)));
    }

    #[test]
    fn composition_arithmetic() {
        let base = Configuration::from_points(&[c(0.0, 0.0), c(10.0, 0.0)]).unwrap();
        let part: Configuration = "a=-1:0,b=1:0".parse().unwrap();
        let single: Configuration = "z=0:0".parse().unwrap();
        let comp = compose(&base, &[part, single], 0.1).unwrap();
        assert_eq!(comp.config.points(), [c(-0.1, 0.0), c(0.1, 0.0), c(10.0, 0.0)]);
        assert_eq!(comp.partition.fiber(0), vec![0, 1]);
        assert!(matches!(
            compose(&base, &[comp.config.clone(), "q=0:0".parse().unwrap()], 2.0),
            Err(Error::ScaleTooLarge { .. })
        ));
    }

    #[test]
    fn doubling_then_forgetting() {
        let x = Configuration::from_points(&[c(0.0, 0.0), c(10.0, 0.0)]).unwrap();
        let d = doubling(&x, "1", c(1.0, 0.0), 0.01).unwrap();
        assert_eq!(d.points(), [c(0.0, 0.0), c(0.01, 0.0), c(10.0, 0.0)]);
        assert_eq!(d.labels()[1], "1'");
        assert_eq!(forgetting(&d, "1'").unwrap(), x);
        assert!(doubling(&x, "1", c(1.0, 0.0), 6.0).is_err());
    }
}

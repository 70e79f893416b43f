//! Verb implementations shared by the command line and the line service.
//! Every verb returns a [`Record`]; both surfaces print or ship it as is.

use skizze_core::deform::{CoeffPath, PathMode, StepOutcome, Timeline, WallEvent, WallOptions};
use skizze_core::frobenius::{canonical_coords, flat_metric};
use skizze_core::graph::{GaussGraph, VertexKind};
use skizze_core::operad::{self, Configuration};
use skizze_core::poly::{find_roots, format_complex};
use skizze_core::poset::{build_poset_with_cap, enumerate_generic, generic_estimate, Poset};
use skizze_core::tracer::{classify, trace, Endpoint, SkVertexKind, Skizze, TraceConfig};
use skizze_core::{Complex, Error, Polynomial, Result};

use crate::record::{Record, Value};

/// Largest degree traced or classified unless overridden.
pub const TRACE_CAP: usize = 8;
pub const POSET_CAP: usize = skizze_core::poset::DEFAULT_POSET_CAP;
pub const COMPOSE_CAP: usize = operad::DEFAULT_COMPOSITION_CAP;

pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded {
            n,
            cap,
            estimate: generic_estimate(n),
        });
    }
    Ok(())
}

pub fn parse_poly(text: &str) -> Result<Polynomial> {
    text.trim().parse()
}

pub fn roots(p: &Polynomial, tol: f64) -> Result<Record> {
    let rs = find_roots(p, tol)?;
    let items = rs
        .roots
        .iter()
        .map(|r| {
            Record::new()
                .scalar("at", format_complex(r.point))
                .scalar("mult", r.multiplicity)
                .into()
        })
        .collect();
    Ok(Record::new()
        .scalar("n", p.degree())
        .scalar("cluster_radius", rs.cluster_radius)
        .list("roots", items))
}

pub fn classify_poly(p: &Polynomial, cap: usize) -> Result<Record> {
    check_cap(p.degree(), cap)?;
    let (g, code) = classify(p)?;
    Ok(Record::new()
        .scalar("code", code)
        .scalar("n", g.n())
        .scalar("codim", g.codim())
        .scalar("generic", g.is_generic()))
}

pub fn graph_record(g: &GaussGraph) -> Record {
    let vertices = (0..g.vertex_count())
        .map(|v| {
            let r = Record::new().scalar("id", v);
            let r = match g.kind(v) {
                VertexKind::Root { mult } => r.scalar("kind", "root").scalar("mult", mult),
                VertexKind::Crit => r.scalar("kind", "crit"),
                VertexKind::Leaf { slot } => r.scalar("kind", "leaf").scalar("slot", slot),
            };
            let rot: Vec<String> = g
                .rotation(v)
                .iter()
                .map(|p| format!("{}{}", p.to, p.color.letter()))
                .collect();
            r.scalar("rotation", rot.join(",")).into()
        })
        .collect();
    Record::new()
        .scalar("n", g.n())
        .scalar("code", g.canonical_code())
        .scalar("codim", g.codim())
        .list("vertices", vertices)
}

fn endpoint(e: Endpoint) -> String {
    match e {
        Endpoint::Leaf(slot) => format!("leaf {slot}"),
        Endpoint::Vertex { id, port } => format!("vertex {id} port {port}"),
    }
}

pub fn skizze_record(s: &Skizze, g: &GaussGraph) -> Record {
    let vertices = s
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = Record::new().scalar("id", i).scalar("at", format_complex(v.position));
            let r = match v.kind {
                SkVertexKind::Root { mult } => r.scalar("kind", "root").scalar("mult", mult),
                SkVertexKind::Crit { mult, color } => {
                    r.scalar("kind", "crit").scalar("mult", mult).scalar("color", color.letter())
                }
            };
            r.into()
        })
        .collect();
    let leaves = s
        .leaves
        .iter()
        .map(|l| {
            Record::new()
                .scalar("slot", l.slot)
                .scalar("at", format_complex(l.point))
                .scalar("color", l.color.letter())
                .into()
        })
        .collect();
    let arcs = s
        .arcs
        .iter()
        .map(|a| {
            Record::new()
                .scalar("color", a.color.letter())
                .scalar("from", endpoint(a.start))
                .scalar("to", endpoint(a.end))
                .scalar("points", a.polyline.len())
                .into()
        })
        .collect();
    Record::new()
        .scalar("poly", &s.poly)
        .scalar("radius", s.radius)
        .list("vertices", vertices)
        .list("leaves", leaves)
        .list("arcs", arcs)
        .block("graph", graph_record(g))
}

pub fn trace_poly(p: &Polynomial, cap: usize) -> Result<Record> {
    check_cap(p.degree(), cap)?;
    let s = trace(p, &TraceConfig::default())?;
    let g = skizze_core::tracer::extract_graph(&s)?;
    Ok(skizze_record(&s, &g))
}

pub fn enumerate(n: usize, cap: usize) -> Result<Record> {
    check_cap(n, cap)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let codes = enumerate_generic(n);
    Ok(Record::new()
        .scalar("n", n)
        .scalar("count", codes.len())
        .list("codes", codes.into_iter().map(|c| Value::Scalar(c.0)).collect()))
}

pub fn poset_record(poset: &Poset) -> Record {
    let nodes = poset
        .nodes
        .iter()
        .map(|c| {
            Record::new()
                .scalar("code", c)
                .list("parents", neighbor_items(poset.parents(c)))
                .into()
        })
        .collect();
    Record::new()
        .scalar("n", poset.n)
        .scalar("count", poset.nodes.len())
        .scalar("maximal", &poset.maximal)
        .list("nodes", nodes)
}

fn neighbor_items(ns: Vec<(skizze_core::graph::CanonicalCode, Vec<skizze_core::poset::MoveKind>)>) -> Vec<Value> {
    ns.into_iter()
        .map(|(c, kinds)| {
            let kinds: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
            Record::new().scalar("code", c).scalar("kinds", kinds.join("+")).into()
        })
        .collect()
}

pub fn build_poset(n: usize, cap: usize) -> Result<Poset> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    build_poset_with_cap(n, cap)
}

pub fn neighbors(poset: &Poset, code: &skizze_core::graph::CanonicalCode) -> Result<Record> {
    if !poset.nodes.contains(code) {
        return Err(Error::InvalidArgument(format!("{code} is not a node of the n = {} poset", poset.n)));
    }
    Ok(Record::new()
        .scalar("code", code)
        .list("parents", neighbor_items(poset.parents(code)))
        .list("children", neighbor_items(poset.children(code))))
}

/// `P0..P1` with a mode and grid size.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub p0: Polynomial,
    pub p1: Polynomial,
    pub mode: PathMode,
    pub samples: usize,
}

impl PathSpec {
    pub fn parse(path: &str, mode: &str, samples: usize) -> Result<Self> {
        let (a, b) = path
            .split_once("..")
            .ok_or_else(|| Error::Parse(format!("path needs the form P0..P1, got {path:?}")))?;
        let mode = match mode {
            "coeff" => PathMode::CoefficientLinear,
            "root" => PathMode::RootLinear,
            m => return Err(Error::Parse(format!("mode must be coeff or root, got {m:?}"))),
        };
        if samples < 2 {
            return Err(Error::InvalidArgument("samples must be at least 2".into()));
        }
        Ok(PathSpec {
            p0: parse_poly(a)?,
            p1: parse_poly(b)?,
            mode,
            samples,
        })
    }

    /// Path file: a record with `path`, and optionally `mode` and `samples`.
    pub fn from_record(r: &Record) -> Result<Self> {
        let path = r.get_str("path").ok_or_else(|| Error::Parse("path file lacks 'path'".into()))?;
        let mode = r.get_str("mode").unwrap_or("coeff");
        let samples = match r.get_str("samples") {
            Some(s) => s.parse().map_err(|_| Error::Parse(format!("bad samples {s:?}")))?,
            None => skizze_core::deform::DEFAULT_SAMPLES,
        };
        Self::parse(path, mode, samples)
    }

    pub fn to_record(&self) -> Record {
        Record::new()
            .scalar("path", format!("{}..{}", self.p0, self.p1))
            .scalar("mode", if self.mode == PathMode::RootLinear { "root" } else { "coeff" })
            .scalar("samples", self.samples)
    }

    pub fn path(&self) -> Result<CoeffPath> {
        CoeffPath::new(&self.p0, &self.p1, self.mode)
    }
}

pub fn event_record(e: &WallEvent) -> Record {
    let idx: Vec<String> = e.indices.iter().map(usize::to_string).collect();
    let r = Record::new()
        .scalar("t", e.t)
        .scalar("kind", e.kind.as_str())
        .scalar("indices", idx.join(","));
    match &e.wall_code {
        Some(c) => r.scalar("wall", c),
        None => r,
    }
}

pub fn timeline_record(tl: &Timeline) -> Record {
    Record::new()
        .list("events", tl.events.iter().map(|e| event_record(e).into()).collect())
        .list(
            "segments",
            tl.segments
                .iter()
                .map(|s| Record::new().scalar("t0", s.t0).scalar("t1", s.t1).scalar("code", &s.code).into())
                .collect(),
        )
        .list("warnings", tl.warnings.iter().map(|w| Value::Scalar(w.clone())).collect())
}

pub fn deform(spec: &PathSpec, tol_t: f64, cap: usize) -> Result<Record> {
    check_cap(spec.p0.degree(), cap)?;
    let opts = WallOptions {
        tol_t,
        samples: spec.samples,
        ..WallOptions::default()
    };
    let tl = skizze_core::deform::stratum_timeline_with(&spec.path()?, &opts)?;
    Ok(timeline_record(&tl))
}

pub fn step_record(o: &StepOutcome) -> Record {
    Record::new()
        .scalar("t", o.t)
        .scalar("code", &o.code)
        .list("events", o.events.iter().map(|e| event_record(e).into()).collect())
}

pub fn parse_config(text: &str) -> Result<Configuration> {
    text.trim().parse()
}

pub fn compose(base: &Configuration, parts: &[Configuration], eps: f64, verify: bool, cap: usize) -> Result<Record> {
    let total: usize = parts.iter().map(Configuration::len).sum();
    check_cap(total, cap)?;
    let c = operad::compose(base, parts, eps)?;
    let r = Record::new().scalar("config", &c.config).scalar("eps", eps);
    if !verify {
        return Ok(r);
    }
    let rep = operad::verify_composition_with(base, parts, eps, cap)?;
    let parts = rep
        .parts
        .iter()
        .map(|p| {
            let r = Record::new()
                .scalar("index", p.index)
                .scalar("expected", &p.expected)
                .scalar("matches", p.matches);
            match &p.found {
                Some(f) => r.scalar("found", f),
                None => r,
            }
            .into()
        })
        .collect();
    let mut v = Record::new()
        .scalar("passed", rep.passed)
        .scalar("inconclusive", rep.inconclusive)
        .scalar("eps", rep.eps)
        .scalar("halvings", rep.halvings)
        .scalar("base_code", &rep.base_code);
    if let Some(c) = &rep.composed_code {
        v = v.scalar("composed_code", c);
    }
    v = v
        .scalar("contraction_matches", rep.contraction_matches)
        .scalar("contraction_exact", rep.contraction_exact)
        .list("parts", parts)
        .list("diagnostics", rep.diagnostics.iter().map(|d| Value::Scalar(d.clone())).collect());
    Ok(r.block("verify", v))
}

pub fn double(x: &Configuration, label: &str, dir: Complex, eps: f64) -> Result<Record> {
    let d = operad::doubling(x, label, dir / dir.norm(), eps)?;
    Ok(Record::new().scalar("config", d))
}

pub fn forget(x: &Configuration, label: &str) -> Result<Record> {
    let f = operad::forgetting(x, label)?;
    Ok(Record::new().scalar("config", f))
}

pub fn frobenius(p: &Polynomial) -> Result<Record> {
    let cc = canonical_coords(p)?;
    let m = flat_metric(p)?;
    let items = cc
        .rho
        .iter()
        .zip(&cc.u)
        .zip(&m.g)
        .map(|((r, u), g)| {
            Record::new()
                .scalar("rho", format_complex(*r))
                .scalar("u", format_complex(*u))
                .scalar("g", format_complex(*g))
                .into()
        })
        .collect();
    Ok(Record::new()
        .scalar("n", p.degree())
        .scalar("eta", format_complex(m.eta))
        .list("critical", items))
}

//! Deformation of the skizze along paths of monic polynomials: wall events,
//! stratum timelines and level-set front advection.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CanonicalCode, EdgeColor};
use crate::poly::{critical_data, find_roots, lex_cmp, Complex, Polynomial, DEFAULT_ROOT_TOL};
use crate::poset::Poset;
use crate::tracer::{axis_tolerance, classify, trace, TraceConfig};

pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_TOL_T: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    CoefficientLinear,
    RootLinear,
}

type CoeffFn = Arc<dyn Fn(f64) -> Vec<Complex> + Send + Sync>;

#[derive(Clone)]
enum PathKind {
    Linear { c0: Vec<Complex>, c1: Vec<Complex> },
    Roots { r0: Vec<Complex>, r1: Vec<Complex> },
    Parametric { f: CoeffFn, df: Option<CoeffFn> },
}

/// A path `t -> P(·, t)`, `t ∈ [0, 1]`, of monic polynomials of fixed degree.
#[derive(Clone)]
pub struct CoeffPath {
    degree: usize,
    kind: PathKind,
}

impl fmt::Debug for CoeffPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffPath({} -> {}, {:?})", self.at(0.0), self.at(1.0), self.mode())
    }
}

impl CoeffPath {
    pub fn new(p0: &Polynomial, p1: &Polynomial, mode: PathMode) -> Result<Self> {
        if p0.degree() != p1.degree() {
            return Err(Error::InvalidArgument(format!(
                "endpoint degrees differ: {} vs {}",
                p0.degree(),
                p1.degree()
            )));
        }
        let kind = match mode {
            PathMode::CoefficientLinear => PathKind::Linear {
                c0: p0.coeffs().to_vec(),
                c1: p1.coeffs().to_vec(),
            },
            PathMode::RootLinear => {
                // roots paired in lexicographic order
                let sorted = |p: &Polynomial| -> Result<Vec<Complex>> {
                    let mut r = find_roots(p, DEFAULT_ROOT_TOL)?.expanded();
                    r.sort_by(|a, b| lex_cmp(*a, *b, 0.0));
                    Ok(r)
                };
                PathKind::Roots {
                    r0: sorted(p0)?,
                    r1: sorted(p1)?,
                }
            }
        };
        Ok(CoeffPath {
            degree: p0.degree(),
            kind,
        })
    }

    /// Path given by ascending coefficient vectors `f(t)` (leading entry 1);
    /// `∂P/∂t` is taken by central differences.
    pub fn parametric(degree: usize, f: impl Fn(f64) -> Vec<Complex> + Send + Sync + 'static) -> Result<Self> {
        Self::parametric_inner(degree, Arc::new(f), None)
    }

    /// As [`CoeffPath::parametric`] with exact coefficient derivatives `df(t)`.
    pub fn parametric_with_derivative(
        degree: usize,
        f: impl Fn(f64) -> Vec<Complex> + Send + Sync + 'static,
        df: impl Fn(f64) -> Vec<Complex> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::parametric_inner(degree, Arc::new(f), Some(Arc::new(df)))
    }

    fn parametric_inner(degree: usize, f: CoeffFn, df: Option<CoeffFn>) -> Result<Self> {
        for t in [0.0, 0.5, 1.0] {
            let c = f(t);
            if c.len() != degree + 1 || c[degree] != Complex::new(1.0, 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "parametric path is not monic of degree {degree} at t = {t}"
                )));
            }
        }
        Ok(CoeffPath {
            degree,
            kind: PathKind::Parametric { f, df },
        })
    }

    /// Constant path at `p`.
    pub fn constant(p: &Polynomial) -> Self {
        CoeffPath {
            degree: p.degree(),
            kind: PathKind::Linear {
                c0: p.coeffs().to_vec(),
                c1: p.coeffs().to_vec(),
            },
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mode(&self) -> Option<PathMode> {
        match self.kind {
            PathKind::Linear { .. } => Some(PathMode::CoefficientLinear),
            PathKind::Roots { .. } => Some(PathMode::RootLinear),
            PathKind::Parametric { .. } => None,
        }
    }

    fn roots_at(r0: &[Complex], r1: &[Complex], t: f64) -> Vec<Complex> {
        r0.iter().zip(r1).map(|(a, b)| a * (1.0 - t) + b * t).collect()
    }

    pub fn at(&self, t: f64) -> Polynomial {
        let coeffs = match &self.kind {
            PathKind::Linear { c0, c1 } => c0.iter().zip(c1).map(|(a, b)| a * (1.0 - t) + b * t).collect(),
            PathKind::Roots { r0, r1 } => {
                return Polynomial::from_roots(&Self::roots_at(r0, r1, t)).expect("nonempty roots")
            }
            PathKind::Parametric { f, .. } => f(t),
        };
        Polynomial::from_ascending(coeffs).expect("path stays monic")
    }

    /// `∂P/∂t` at `(z, t)`.
    pub fn dt(&self, z: Complex, t: f64) -> Complex {
        let horner = |c: &[Complex]| c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a);
        match &self.kind {
            PathKind::Linear { c0, c1 } => {
                let d: Vec<Complex> = c0.iter().zip(c1).map(|(a, b)| b - a).collect();
                horner(&d)
            }
            PathKind::Roots { r0, r1 } => {
                let r = Self::roots_at(r0, r1, t);
                let mut total = Complex::new(0.0, 0.0);
                for i in 0..r.len() {
                    let mut prod = r1[i] - r0[i];
                    for (j, rj) in r.iter().enumerate() {
                        if j != i {
                            prod *= z - rj;
                        }
                    }
                    total -= prod;
                }
                total
            }
            PathKind::Parametric { f, df } => match df {
                Some(df) => horner(&df(t)),
                None => {
                    let h = 1e-6;
                    let (a, b) = (f(t + h), f(t - h));
                    let d: Vec<Complex> = a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect();
                    horner(&d)
                }
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallKind {
    /// `Im u_j = 0`: a critical point enters the red set.
    CriticalValueReal,
    /// `Re u_j = 0`: a critical point enters the blue set.
    CriticalValueImaginary,
    RootCollision,
    CriticalPointCollision,
}

impl WallKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WallKind::CriticalValueReal => "critical-value-real",
            WallKind::CriticalValueImaginary => "critical-value-imaginary",
            WallKind::RootCollision => "root-collision",
            WallKind::CriticalPointCollision => "critical-point-collision",
        }
    }

    /// Whether crossing the wall can change the Gauss-graph.
    pub fn changes_graph(self) -> bool {
        self != WallKind::CriticalPointCollision
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallEvent {
    pub t: f64,
    pub kind: WallKind,
    /// Indices of the participating critical points (continued from `t = 0`).
    pub indices: Vec<usize>,
    pub wall_code: Option<CanonicalCode>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WallReport {
    pub events: Vec<WallEvent>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallOptions {
    pub tol_t: f64,
    pub samples: usize,
    pub axis_eps: f64,
    /// Grid doublings tried when event counts disagree between grids.
    pub max_refinements: usize,
    /// Classify each wall (one trace per event).
    pub classify_walls: bool,
}

impl Default for WallOptions {
    fn default() -> Self {
        WallOptions {
            tol_t: DEFAULT_TOL_T,
            samples: DEFAULT_SAMPLES,
            axis_eps: TraceConfig::default().axis_eps,
            max_refinements: 3,
            classify_walls: true,
        }
    }
}

/// Newton on `P'` from `seeds`; falls back to a fresh solve matched to the seeds.
fn critical_points_near(p: &Polynomial, seeds: &[Complex]) -> Result<Vec<Complex>> {
    let scale = p.cauchy_bound();
    let mut out = Vec::with_capacity(seeds.len());
    let mut ok = true;
    for &s in seeds {
        let mut z = s;
        let mut converged = false;
        for _ in 0..40 {
            let (_, d1, d2) = p.eval_with_two_derivatives(z);
            if d2.norm() == 0.0 {
                break;
            }
            let step = d1 / d2;
            z -= step;
            if step.norm() <= 1e-14 * scale {
                converged = true;
                break;
            }
        }
        ok &= converged && (z - s).norm() < 0.5 * scale;
        out.push(z);
    }
    let sep = 1e-7 * scale;
    let distinct = out
        .iter()
        .enumerate()
        .all(|(i, a)| out[i + 1..].iter().all(|b| (a - b).norm() > sep));
    if ok && distinct {
        return Ok(out);
    }
    let fresh: Vec<Complex> = critical_data(p, DEFAULT_ROOT_TOL)?
        .points
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.point, c.multiplicity))
        .collect();
    let mut used = vec![false; fresh.len()];
    Ok(seeds
        .iter()
        .map(|s| {
            let (j, z) = fresh
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .min_by(|a, b| (a.1 - s).norm().total_cmp(&(b.1 - s).norm()))
                .map(|(j, z)| (j, *z))
                .expect("as many critical points as seeds");
            used[j] = true;
            z
        })
        .collect())
}

struct Samples {
    ts: Vec<f64>,
    rho: Vec<Vec<Complex>>,
    u: Vec<Vec<Complex>>,
    /// `|P|`-scale at each critical point, for rounding floors.
    mag: Vec<Vec<f64>>,
}

fn sample_path(path: &CoeffPath, samples: usize) -> Result<Samples> {
    let p0 = path.at(0.0);
    let mut seeds: Vec<Complex> = critical_data(&p0, DEFAULT_ROOT_TOL)?
        .points
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.point, c.multiplicity))
        .collect();
    seeds.sort_by(|a, b| lex_cmp(*a, *b, 0.0));
    let mut out = Samples {
        ts: Vec::new(),
        rho: Vec::new(),
        u: Vec::new(),
        mag: Vec::new(),
    };
    for k in 0..=samples {
        let t = k as f64 / samples as f64;
        let p = path.at(t);
        let rho = critical_points_near(&p, &seeds)?;
        out.u.push(rho.iter().map(|&r| p.eval(r)).collect());
        out.mag.push(rho.iter().map(|&r| p.magnitude_at(r)).collect());
        out.ts.push(t);
        seeds.clone_from(&rho);
        out.rho.push(rho);
    }
    Ok(out)
}

fn part(kind: WallKind, u: Complex) -> f64 {
    match kind {
        WallKind::CriticalValueImaginary => u.re,
        _ => u.im,
    }
}

/// Value of critical point `j` at `t`, continued from `seed`.
fn crit_value(path: &CoeffPath, t: f64, seeds: &[Complex], j: usize) -> Result<(Complex, Vec<Complex>)> {
    let p = path.at(t);
    let rho = critical_points_near(&p, seeds)?;
    Ok((p.eval(rho[j]), rho))
}

fn scan(path: &CoeffPath, opts: &WallOptions, samples: usize) -> Result<WallReport> {
    let s = sample_path(path, samples)?;
    let m = s.rho.first().map_or(0, Vec::len);
    let mut report = WallReport::default();
    let scale = 1.0 + path.at(0.0).coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let flat = |k: usize, j: usize, f: f64| {
        s.u[k][j].norm() <= 64.0 * f64::EPSILON * scale
            || f.abs() <= 0.1 * axis_tolerance(opts.axis_eps, s.u[k][j], s.mag[k][j])
    };

    for kind in [WallKind::CriticalValueImaginary, WallKind::CriticalValueReal] {
        let per_j: Vec<Result<(Vec<WallEvent>, Vec<String>)>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut events = Vec::new();
                let mut warnings = Vec::new();
                let f: Vec<f64> = s.u.iter().map(|u| part(kind, u[j])).collect();
                let mut k = 0;
                while k + 1 < f.len() {
                    if flat(k, j, f[k]) && flat(k + 1, j, f[k + 1]) {
                        let start = k;
                        while k + 1 < f.len() && flat(k + 1, j, f[k + 1]) {
                            k += 1;
                        }
                        warnings.push(format!(
                            "persistent degeneracy: {} of critical value {j} vanishes on t in [{}, {}]",
                            if kind == WallKind::CriticalValueImaginary { "Re" } else { "Im" },
                            s.ts[start],
                            s.ts[k]
                        ));
                        k += 1;
                        continue;
                    }
                    // strict crossings and entries into a zero; leaving a zero is not a new wall
                    let (a, b) = (!flat(k, j, f[k]), !flat(k + 1, j, f[k + 1]));
                    if a && (!b || (f[k] < 0.0) != (f[k + 1] < 0.0)) {
                        let t = bisect(path, &s.rho[k], j, kind, s.ts[k], s.ts[k + 1], opts)?;
                        events.push(WallEvent {
                            t,
                            kind,
                            indices: vec![j],
                            wall_code: None,
                        });
                    }
                    k += 1;
                }
                Ok((events, warnings))
            })
            .collect();
        for r in per_j {
            let (e, w) = r?;
            report.events.extend(e);
            report.warnings.extend(w);
        }
    }

    // a critical value through the origin is a root collision
    let close = 10.0 * opts.tol_t.max(1e-12);
    let mut merged: Vec<WallEvent> = Vec::new();
    for e in &report.events {
        let k = nearest_sample(&s, e.t);
        let (u, _) = crit_value(path, e.t, &s.rho[k], e.indices[0])?;
        if u.norm() > 1e-6 * scale {
            merged.push(e.clone());
            continue;
        }
        match merged
            .iter_mut()
            .find(|o| o.kind == WallKind::RootCollision && (o.t - e.t).abs() <= close)
        {
            Some(o) => {
                for &j in &e.indices {
                    if !o.indices.contains(&j) {
                        o.indices.push(j);
                    }
                }
                o.indices.sort_unstable();
            }
            None => merged.push(WallEvent {
                kind: WallKind::RootCollision,
                ..e.clone()
            }),
        }
    }

    // critical point collisions: minima of pairwise distances
    for a in 0..m {
        for b in a + 1..m {
            let d: Vec<f64> = s.rho.iter().map(|r| (r[a] - r[b]).norm()).collect();
            for k in 1..d.len().saturating_sub(1) {
                if d[k] <= d[k - 1] && d[k] < d[k + 1] {
                    let (t, dmin) = golden_min(path, &s.rho[k], a, b, s.ts[k - 1], s.ts[k + 1], opts.tol_t)?;
                    if dmin <= 1e-6 * scale {
                        merged.push(WallEvent {
                            t,
                            kind: WallKind::CriticalPointCollision,
                            indices: vec![a, b],
                            wall_code: None,
                        });
                    }
                }
            }
        }
    }
    merged.sort_by(|x, y| x.t.total_cmp(&y.t).then(x.kind.cmp(&y.kind)));
    report.events = merged;
    for (t, name) in [(0.0, "start"), (1.0, "end")] {
        let k = if t == 0.0 { 0 } else { s.u.len() - 1 };
        for (j, u) in s.u[k].iter().enumerate() {
            let tol = axis_tolerance(opts.axis_eps, *u, s.mag[k][j]);
            if u.re.abs() <= tol || u.im.abs() <= tol {
                report.warnings.push(format!("path {name} lies on a wall (critical value {j} = {u})"));
            }
        }
    }
    Ok(report)
}

fn nearest_sample(s: &Samples, t: f64) -> usize {
    let n = s.ts.len() - 1;
    ((t * n as f64).round() as usize).min(n)
}

fn bisect(
    path: &CoeffPath,
    seeds: &[Complex],
    j: usize,
    kind: WallKind,
    mut lo: f64,
    mut hi: f64,
    opts: &WallOptions,
) -> Result<f64> {
    let mut seeds = seeds.to_vec();
    let (u_lo, _) = crit_value(path, lo, &seeds, j)?;
    let neg_lo = part(kind, u_lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (u, rho) = crit_value(path, mid, &seeds, j)?;
        let f = part(kind, u);
        let small = f.abs() <= 0.1 * axis_tolerance(opts.axis_eps, u, path.at(mid).magnitude_at(rho[j]));
        if hi - lo <= opts.tol_t && small {
            return Ok(mid);
        }
        if f == 0.0 {
            return Ok(mid);
        }
        if (f < 0.0) == neg_lo {
            lo = mid;
            seeds = rho;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min(
    path: &CoeffPath,
    seeds: &[Complex],
    a: usize,
    b: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let dist = |t: f64| -> Result<f64> {
        let p = path.at(t);
        let rho = critical_points_near(&p, seeds)?;
        Ok((rho[a] - rho[b]).norm())
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1)?, dist(x2)?);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2)?;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((t, dist(t)?))
}

/// Polynomial on the wall at an event; colliding roots are merged exactly.
pub fn wall_polynomial(path: &CoeffPath, event: &WallEvent) -> Result<Polynomial> {
    let p = path.at(event.t);
    if event.kind != WallKind::RootCollision {
        return Ok(p);
    }
    let mut roots = find_roots(&p, DEFAULT_ROOT_TOL)?.expanded();
    let cd = critical_data(&p, DEFAULT_ROOT_TOL)?;
    let rho = cd
        .points
        .iter()
        .min_by(|x, y| x.value.norm().total_cmp(&y.value.norm()))
        .map(|c| c.point)
        .ok_or_else(|| Error::InvalidArgument("root collision without critical point".into()))?;
    roots.sort_by(|x, y| (x - rho).norm().total_cmp(&(y - rho).norm()));
    let reach = 3.0 * (roots[1] - rho).norm();
    let k = roots.iter().take_while(|r| (*r - rho).norm() <= reach).count().max(2);
    let mid = roots[..k].iter().sum::<Complex>() / k as f64;
    roots[..k].fill(mid);
    Polynomial::from_roots(&roots)
}

/// Wall events along `path`, each localized to `tol_t`.
pub fn track_walls(path: &CoeffPath, tol_t: f64) -> Result<WallReport> {
    track_walls_with(
        path,
        &WallOptions {
            tol_t,
            ..WallOptions::default()
        },
    )
}

pub fn track_walls_with(path: &CoeffPath, opts: &WallOptions) -> Result<WallReport> {
    let mut samples = opts.samples.max(2);
    let mut report = scan(path, opts, samples)?;
    let mut stable = opts.max_refinements == 0;
    for _ in 0..opts.max_refinements {
        let finer = scan(path, opts, 2 * samples)?;
        if finer.events.len() == report.events.len() {
            stable = true;
            break;
        }
        samples *= 2;
        report = finer;
    }
    if !stable {
        let t = report.events.first().map_or(0.5, |e| e.t);
        return Err(Error::UnresolvedCluster { t });
    }
    if opts.classify_walls {
        let codes: Vec<Result<CanonicalCode>> = report
            .events
            .par_iter()
            .map(|e| Ok(classify(&wall_polynomial(path, e)?)?.1))
            .collect();
        for (e, code) in report.events.iter_mut().zip(codes) {
            e.wall_code = Some(code?);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub code: CanonicalCode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    pub events: Vec<WallEvent>,
    pub segments: Vec<Segment>,
    pub warnings: Vec<String>,
}

impl Timeline {
    /// Checks `segment ≺ wall` for each graph-changing event; returns violations.
    pub fn order_violations(&self, poset: &Poset) -> Vec<String> {
        let mut out = Vec::new();
        for e in self.events.iter().filter(|e| e.kind.changes_graph()) {
            let Some(wall) = &e.wall_code else { continue };
            for s in &self.segments {
                let adjacent = (s.t1 - e.t).abs() < 1e-9 || (s.t0 - e.t).abs() < 1e-9;
                if adjacent && !poset.leq(&s.code, wall) {
                    out.push(format!("segment [{}, {}] is not below the wall at t = {}", s.t0, s.t1, e.t));
                }
            }
        }
        out
    }
}

/// Segments between graph-changing walls, classified at their midpoints.
pub fn stratum_timeline(path: &CoeffPath) -> Result<Timeline> {
    stratum_timeline_with(path, &WallOptions::default())
}

pub fn stratum_timeline_with(path: &CoeffPath, opts: &WallOptions) -> Result<Timeline> {
    let report = track_walls_with(path, opts)?;
    let mut cuts: Vec<f64> = vec![0.0];
    for e in report.events.iter().filter(|e| e.kind.changes_graph()) {
        if e.t - cuts.last().unwrap() > 10.0 * opts.tol_t {
            cuts.push(e.t);
        }
    }
    cuts.push(1.0);
    let segments = cuts
        .windows(2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|w| {
            let (_, code) = classify(&path.at(0.5 * (w[0] + w[1])))?;
            Ok(Segment {
                t0: w[0],
                t1: w[1],
                code,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Timeline {
        events: report.events,
        segments,
        warnings: report.warnings,
    })
}

/// Marker points on the `color` level set at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerFront {
    pub color: EdgeColor,
    pub t: f64,
    pub points: Vec<Complex>,
    /// Largest level residual before re-projection on the step into `t`.
    pub predictor_residual: f64,
}

fn level(color: EdgeColor, v: Complex) -> f64 {
    match color {
        EdgeColor::Red => v.im,
        EdgeColor::Blue => v.re,
    }
}

/// Normal velocity of the `color` front: `-Φ_t ∇Φ/|∇Φ|^2` in complex form.
pub fn front_velocity(path: &CoeffPath, color: EdgeColor, z: Complex, t: f64) -> Result<Complex> {
    let p = path.at(t);
    let (_, d) = p.eval_with_derivative(z);
    let threshold = 1e-8 * (1.0 + p.magnitude_at(z));
    if d.norm() < threshold {
        return Err(Error::AdvectionSingular { at: z, t });
    }
    let pt = path.dt(z, t);
    Ok(match color {
        EdgeColor::Blue => -pt.re * d.conj() / d.norm_sqr(),
        EdgeColor::Red => -pt.im * Complex::i() * d.conj() / d.norm_sqr(),
    })
}

fn reproject(p: &Polynomial, color: EdgeColor, mut z: Complex) -> Complex {
    for _ in 0..8 {
        let (v, d) = p.eval_with_derivative(z);
        let f = level(color, v);
        if f.abs() <= 1e-14 * (1.0 + p.magnitude_at(z)) || d.norm_sqr() == 0.0 {
            break;
        }
        z -= match color {
            EdgeColor::Blue => f * d.conj() / d.norm_sqr(),
            EdgeColor::Red => f * Complex::i() * d.conj() / d.norm_sqr(),
        };
    }
    z
}

fn rk4_step(path: &CoeffPath, color: EdgeColor, x: Complex, ta: f64, h: f64) -> Result<Complex> {
    let v = |z: Complex, t: f64| front_velocity(path, color, z, t);
    let k1 = v(x, ta)?;
    let k2 = v(x + k1 * (0.5 * h), ta + 0.5 * h)?;
    let k3 = v(x + k2 * (0.5 * h), ta + 0.5 * h)?;
    let k4 = v(x + k3 * h, ta + h)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// One grid interval for a single marker, substepping so that no substep moves
/// further than a quarter of the distance to the nearest critical point.
fn advect_marker(path: &CoeffPath, color: EdgeColor, mut x: Complex, ta: f64, tb: f64, crit: &[Complex]) -> Result<(Complex, f64)> {
    let mut t = ta;
    let mut h = tb - ta;
    let mut worst: f64 = 0.0;
    while t < tb {
        h = h.min(tb - t);
        if h < 1e-12 {
            return Err(Error::AdvectionSingular { at: x, t });
        }
        let pred = match rk4_step(path, color, x, t, h) {
            Ok(p) => p,
            Err(_) if h > 1e-9 => {
                h *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        let room = crit.iter().map(|c| (c - x).norm()).fold(f64::INFINITY, f64::min);
        if (pred - x).norm() > 0.25 * room {
            h *= 0.5;
            continue;
        }
        let tn = if tb - (t + h) < 1e-15 { tb } else { t + h };
        let pn = path.at(tn);
        worst = worst.max(level(color, pn.eval(pred)).abs() / (1.0 + pn.magnitude_at(pred)));
        x = reproject(&pn, color, pred);
        t = tn;
        h *= 2.0;
    }
    Ok((x, worst))
}

/// Advects `seeds` (on the `color` set at `times[0]`) through the time grid.
pub fn advect_front(path: &CoeffPath, color: EdgeColor, seeds: &[Complex], times: &[f64]) -> Result<Vec<MarkerFront>> {
    let Some(&t0) = times.first() else {
        return Ok(Vec::new());
    };
    let p0 = path.at(t0);
    let mut points: Vec<Complex> = seeds.iter().map(|&z| reproject(&p0, color, z)).collect();
    let mut fronts = vec![MarkerFront {
        color,
        t: t0,
        points: points.clone(),
        predictor_residual: 0.0,
    }];
    for w in times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let mut crit: Vec<Complex> = Vec::new();
        for t in [ta, tb] {
            crit.extend(critical_data(&path.at(t), DEFAULT_ROOT_TOL)?.points.iter().map(|c| c.point));
        }
        let stepped: Vec<Result<(Complex, f64)>> = points
            .par_iter()
            .map(|&x| advect_marker(path, color, x, ta, tb, &crit))
            .collect();
        let mut next = Vec::with_capacity(points.len());
        let mut worst: f64 = 0.0;
        for r in stepped {
            let (z, res) = r?;
            worst = worst.max(res);
            next.push(z);
        }
        points = next;
        fronts.push(MarkerFront {
            color,
            t: tb,
            points: points.clone(),
            predictor_residual: worst,
        });
    }
    Ok(fronts)
}

/// `|Φ_t + v·∇Φ|` at `(marker, t)` for the `color` front, `Φ = Re P` or `Im P`.
pub fn hj_residual(path: &CoeffPath, color: EdgeColor, marker: Complex, velocity: Complex, t: f64) -> f64 {
    let (_, d) = path.at(t).eval_with_derivative(marker);
    let pt = path.dt(marker, t);
    level(color, pt + d * velocity).abs()
}

/// Interior samples of the traced `color` arcs at `t`, about `per_arc` per arc.
pub fn seed_front(path: &CoeffPath, color: EdgeColor, t: f64, per_arc: usize) -> Result<Vec<Complex>> {
    let s = trace(&path.at(t), &TraceConfig::default())?;
    let mut out = Vec::new();
    for arc in s.arcs.iter().filter(|a| a.color == color) {
        let line = &arc.polyline;
        if line.len() < 3 {
            continue;
        }
        let stride = ((line.len() - 2) / per_arc.max(1)).max(1);
        out.extend(line[1..line.len() - 1].iter().step_by(stride).copied());
    }
    Ok(out)
}

/// Interactive stepping along a path.
#[derive(Clone, Debug)]
pub struct DeformSession {
    pub path: CoeffPath,
    pub t: f64,
    pub events: Vec<WallEvent>,
    pub code: CanonicalCode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub t: f64,
    pub code: CanonicalCode,
    /// Events in the half-open step interval.
    pub events: Vec<WallEvent>,
}

impl DeformSession {
    pub fn start(path: CoeffPath) -> Result<Self> {
        Self::start_with(path, &WallOptions::default())
    }

    pub fn start_with(path: CoeffPath, opts: &WallOptions) -> Result<Self> {
        let report = track_walls_with(&path, opts)?;
        let (_, code) = classify(&path.at(0.0))?;
        Ok(DeformSession {
            path,
            t: 0.0,
            events: report.events,
            code,
        })
    }

    /// Advances by `dt`, clamped at `t = 1`; fails once the path is used up.
    pub fn step(&mut self, dt: f64) -> Result<StepOutcome> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
        }
        if self.t >= 1.0 {
            return Err(Error::PathExhausted);
        }
        let t1 = (self.t + dt).min(1.0);
        let events = self
            .events
            .iter()
            .filter(|e| e.t > self.t && e.t <= t1)
            .cloned()
            .collect();
        let (_, code) = classify(&self.path.at(t1))?;
        self.t = t1;
        self.code = code.clone();
        Ok(StepOutcome { t: t1, code, events })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn rotating(theta0: f64, theta1: f64) -> CoeffPath {
        CoeffPath::parametric(2, move |t| {
            let th = theta0 + (theta1 - theta0) * t;
            vec![-Complex::from_polar(1.0, th), c(0.0, 0.0), c(1.0, 0.0)]
        })
        .unwrap()
    }

    #[test]
    fn rotating_constant_crosses_one_blue_wall() {
        let r = track_walls(&rotating(PI / 4.0, 3.0 * PI / 4.0), 1e-10).unwrap();
        assert_eq!(r.events.len(), 1, "{:?}", r.events);
        assert_eq!(r.events[0].kind, WallKind::CriticalValueImaginary);
        assert!((r.events[0].t - 0.5).abs() < 1e-8);
    }

    #[test]
    fn constant_path_has_no_events() {
        let p: Polynomial = "1:0,0.3:0.1,-1:2".parse().unwrap();
        let r = track_walls(&CoeffPath::constant(&p), 1e-10).unwrap();
        assert!(r.events.is_empty());
    }

    #[test]
    fn shrinking_constant_is_a_root_collision() {
        let path = CoeffPath::parametric(2, |t| {
            vec![-Complex::from_polar(1.0 - 2.0 * t, PI / 4.0), c(0.0, 0.0), c(1.0, 0.0)]
        })
        .unwrap();
        let r = track_walls(&path, 1e-10).unwrap();
        assert_eq!(r.events.len(), 1, "{:?}", r.events);
        assert_eq!(r.events[0].kind, WallKind::RootCollision);
        assert!((r.events[0].t - 0.5).abs() < 1e-8);
    }

    #[test]
    fn root_linear_time_derivative() {
        let p0 = Polynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.5)]).unwrap();
        let p1 = Polynomial::from_roots(&[c(2.0, 1.0), c(0.0, -1.0)]).unwrap();
        let path = CoeffPath::new(&p0, &p1, PathMode::RootLinear).unwrap();
        let z = c(0.3, -0.7);
        let h = 1e-6;
        let fd = (path.at(0.4 + h).eval(z) - path.at(0.4 - h).eval(z)) / (2.0 * h);
        assert!((fd - path.dt(z, 0.4)).norm() < 1e-8);
        assert!((path.at(0.0).eval(c(1.0, 0.0))).norm() < 1e-12);
    }

    #[test]
    fn session_exhausts() {
        let mut s = DeformSession::start(rotating(PI / 4.0, 3.0 * PI / 4.0)).unwrap();
        let a = s.step(0.6).unwrap();
        assert_eq!(a.events.len(), 1);
        let b = s.step(0.6).unwrap();
        assert_eq!(b.t, 1.0);
        assert!(matches!(s.step(0.1), Err(Error::PathExhausted)));
    }
}

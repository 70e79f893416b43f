//! Monic complex polynomials: construction, evaluation, root finding and
//! critical data.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Iteration cap for the simultaneous root iteration.
pub const MAX_ROOT_ITERATIONS: usize = 500;
/// Relative step size below which the root iteration is considered converged.
pub const ROOT_STEP_TOL: f64 = 1e-14;
/// Default residual tolerance for [`find_roots`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
/// Default clustering radius, relative to [`root_bound`].
pub const CLUSTER_RADIUS_FACTOR: f64 = 1e-6;

/// Monic polynomial `z^n + c_{n-1} z^{n-1} + ... + c_0`.
///
/// Coefficients are stored constant-first; the last entry is exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    /// Builds a monic polynomial from coefficients ordered constant-first.
    pub fn from_ascending(coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if *coeffs.last().unwrap() != Complex::new(1.0, 0.0) {
            return Err(Error::InvalidArgument(
                "leading coefficient must be exactly 1".into(),
            ));
        }
        Ok(Polynomial { coeffs })
    }

    /// Builds a monic polynomial from coefficients ordered leading-first.
    pub fn from_descending(coeffs: &[Complex]) -> Result<Self> {
        let mut asc = coeffs.to_vec();
        asc.reverse();
        Self::from_ascending(asc)
    }

    /// Monic polynomial with the given root multiset.
    pub fn from_roots(roots: &[Complex]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidArgument("empty root list".into()));
        }
        let mut coeffs = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            // multiply by (z - r)
            let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::from_ascending(coeffs)
    }

    /// `z^n + constant`.
    pub fn monomial_plus(n: usize, constant: Complex) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
        coeffs[0] += constant;
        coeffs[n] = Complex::new(1.0, 0.0);
        Self::from_ascending(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients constant-first.
    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex) -> Complex {
        horner(&self.coeffs, z)
    }

    /// `(P(z), P'(z))`.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        horner_with_derivative(&self.coeffs, z)
    }

    /// `(P(z), P'(z), P''(z))`.
    pub fn eval_with_two_derivatives(&self, z: Complex) -> (Complex, Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = p;
        let mut ddp = p;
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * z + dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, ddp * 2.0)
    }

    /// Coefficients (constant-first) of `P'`; not monic.
    pub fn derivative_coeffs(&self) -> Vec<Complex> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect()
    }

    /// `P'/n`, monic of degree `n - 1`; `None` for linear polynomials.
    pub fn monic_derivative(&self) -> Option<Polynomial> {
        let n = self.degree();
        if n < 2 {
            return None;
        }
        let mut d: Vec<Complex> = self
            .derivative_coeffs()
            .into_iter()
            .map(|c| c / n as f64)
            .collect();
        d[n - 1] = Complex::new(1.0, 0.0);
        Some(Polynomial { coeffs: d })
    }

    /// Coefficients (constant-first) of `P(z0 + w)` as a polynomial in `w`.
    pub fn taylor_at(&self, z0: Complex) -> Vec<Complex> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let hi = c[k + 1];
                c[k] += z0 * hi;
            }
        }
        c
    }

    /// `Σ |c_k| |z|^k`, the magnitude scale of Horner evaluation at `z`.
    pub fn magnitude_at(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Cauchy bound `1 + max_{i<n} |c_i|`.
    pub fn cauchy_bound(&self) -> f64 {
        cauchy_bound(&self.coeffs)
    }

    /// Divides by `(z - root)`; returns the monic quotient and the remainder.
    pub fn deflate(&self, root: Complex) -> Result<(Polynomial, Complex)> {
        let n = self.degree();
        if n < 2 {
            return Err(Error::InvalidArgument(
                "cannot deflate a linear polynomial".into(),
            ));
        }
        let mut q = vec![Complex::new(0.0, 0.0); n];
        let mut acc = Complex::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * root + self.coeffs[k + 1];
            q[k] = acc;
        }
        let rem = acc * root + self.coeffs[0];
        Ok((Polynomial { coeffs: q }, rem))
    }

    /// Product of two monic polynomials.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let n = out.len() - 1;
        out[n] = Complex::new(1.0, 0.0);
        Polynomial { coeffs: out }
    }
}

pub(crate) fn horner(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn horner_with_derivative(coeffs: &[Complex], z: Complex) -> (Complex, Complex) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = p;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn cauchy_bound(coeffs: &[Complex]) -> f64 {
    let n = coeffs.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let lead = coeffs[n].norm();
    1.0 + coeffs[..n]
        .iter()
        .map(|c| c.norm() / lead)
        .fold(0.0, f64::max)
}

fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Formats a complex number in the `re:im` text form.
pub fn format_complex(z: Complex) -> String {
    format!("{}:{}", fmt_real(z.re), fmt_real(z.im))
}

/// Parses a complex number written as `re:im`.
pub fn parse_complex(s: &str) -> Result<Complex> {
    let (re, im) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected re:im, got {s:?}")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad real part in {s:?}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad imaginary part in {s:?}")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::Parse(format!("non-finite value in {s:?}")));
    }
    Ok(Complex::new(re, im))
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Comma-separated `re:im` pairs, leading coefficient first; the leading
    /// pair must be `1:0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<Complex> = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<_>>()?;
        if parts.len() < 2 {
            return Err(Error::Parse("need at least two coefficients".into()));
        }
        if parts[0] != Complex::new(1.0, 0.0) {
            return Err(Error::Parse("leading coefficient must be 1:0".into()));
        }
        Polynomial::from_descending(&parts)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.coeffs.iter().rev().map(|&c| format_complex(c)).collect();
        f.write_str(&text.join(","))
    }
}

/// A root (or cluster of root approximations) with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub point: Complex,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Clustering radius used to merge approximations.
    pub cluster_radius: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Points repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.point, r.multiplicity))
            .collect()
    }
}

/// Radius `R` such that all roots of `P` and of `P'` lie strictly inside `|z| = R`.
///
/// `R = 1.5 · max(cauchy(P), cauchy(P'/n))`.
pub fn root_bound(p: &Polynomial) -> f64 {
    let dp = p.monic_derivative().map(|d| d.cauchy_bound()).unwrap_or(0.0);
    1.5 * p.cauchy_bound().max(dp)
}

/// Tuning for [`find_roots_with`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Residual tolerance relative to `1 + max |c_i|`.
    pub tol: f64,
    /// Clustering radius; defaults to `1e-6 · root_bound(P)`.
    pub cluster_radius: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: DEFAULT_ROOT_TOL,
            cluster_radius: None,
        }
    }
}

/// All roots of `P` with multiplicities.
pub fn find_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    find_roots_with(
        p,
        RootOptions {
            tol,
            cluster_radius: None,
        },
    )
}

pub fn find_roots_with(p: &Polynomial, opts: RootOptions) -> Result<RootSet> {
    let cluster_radius = opts
        .cluster_radius
        .unwrap_or(CLUSTER_RADIUS_FACTOR * root_bound(p));
    let approx = aberth(p)?;
    let mut roots = cluster(&approx, cluster_radius);
    if opts.cluster_radius.is_none() {
        roots = merge_multiple(p, roots);
    }
    let scale = 1.0 + p.coeffs[..p.degree()].iter().map(|c| c.norm()).fold(0.0, f64::max);
    for r in &roots {
        let res = p.eval(r.point).norm();
        let allowance = 64.0 * f64::EPSILON * p.magnitude_at(r.point);
        if res > opts.tol * scale + allowance {
            return Err(Error::NumericFailure {
                iterations: MAX_ROOT_ITERATIONS,
                best: approx,
            });
        }
    }
    Ok(RootSet {
        roots,
        cluster_radius,
    })
}

/// Simultaneous Aberth–Ehrlich iteration; returns `n` approximations.
pub fn aberth(p: &Polynomial) -> Result<Vec<Complex>> {
    let n = p.degree();
    if n == 1 {
        return Ok(vec![-p.coeffs[0]]);
    }
    let scale = p.cauchy_bound();
    let centre = -p.coeffs[n - 1] / n as f64;
    let radius = {
        // radius of the shifted polynomial, so the circle encloses the roots
        let shifted = Polynomial {
            coeffs: p.taylor_at(centre),
        };
        let r = shifted.cauchy_bound() - 1.0;
        r.max(scale * 1e-3).max(1e-3)
    };
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            centre + Complex::from_polar(radius, angle)
        })
        .collect();
    let step_tol = ROOT_STEP_TOL * scale;
    let mut frozen = vec![false; n];
    for _ in 0..MAX_ROOT_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(z[i]);
            if val == Complex::new(0.0, 0.0) {
                frozen[i] = true;
                continue;
            }
            if val.norm() <= 4.0 * f64::EPSILON * p.magnitude_at(z[i]) {
                frozen[i] = true;
                continue;
            }
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = if der.norm() == 0.0 {
                // nudge off a stationary point
                Complex::new(step_tol.max(1e-12) * 16.0, step_tol.max(1e-12) * 8.0)
            } else {
                let ratio = val / der;
                let denom = Complex::new(1.0, 0.0) - ratio * repulsion;
                if denom.norm() == 0.0 {
                    ratio
                } else {
                    ratio / denom
                }
            };
            z[i] -= step;
            max_step = max_step.max(step.norm());
            if step.norm() < step_tol {
                frozen[i] = true;
            }
        }
        if max_step < step_tol || frozen.iter().all(|&f| f) {
            return Ok(z);
        }
    }
    Err(Error::NumericFailure {
        iterations: MAX_ROOT_ITERATIONS,
        best: z,
    })
}

/// Single-linkage clustering of approximations; cluster centre is the mean.
fn cluster(points: &[Complex], radius: f64) -> Vec<Root> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut c = i;
        while label[c] != r {
            let next = label[c];
            label[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() <= radius {
                let a = find(&mut label, i);
                let b = find(&mut label, j);
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut roots: Vec<(usize, Root)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match roots.iter_mut().find(|(id, _)| *id == r) {
            Some((_, root)) => {
                root.point += points[i];
                root.multiplicity += 1;
            }
            None => roots.push((
                r,
                Root {
                    point: points[i],
                    multiplicity: 1,
                },
            )),
        }
    }
    let mut out: Vec<Root> = roots
        .into_iter()
        .map(|(_, mut r)| {
            r.point /= r.multiplicity as f64;
            r
        })
        .collect();
    out.sort_by(|a, b| lex_cmp(a.point, b.point, 0.0));
    out
}

/// Radius within which a `k`-fold root at `z` is determined in floating point,
/// `10·(16 eps·|P| / |a_k|)^(1/k)` with `a_k` the Taylor coefficient at `z`.
pub fn multiplicity_radius(p: &Polynomial, z: Complex, k: usize) -> f64 {
    let ak = p.taylor_at(z)[k].norm();
    if ak == 0.0 {
        return 0.0;
    }
    10.0 * (16.0 * f64::EPSILON * p.magnitude_at(z) / ak).powf(1.0 / k as f64)
}

/// Merges nearby clusters whose spread is within the accuracy limit of a
/// root of the combined multiplicity `k`, `~(eps·|P| / |a_k|)^(1/k)`.
fn merge_multiple(p: &Polynomial, mut roots: Vec<Root>) -> Vec<Root> {
    'outer: loop {
        for i in 0..roots.len() {
            let mut near: Vec<usize> = (0..roots.len()).filter(|&j| j != i).collect();
            near.sort_by(|&a, &b| {
                let da = (roots[a].point - roots[i].point).norm();
                let db = (roots[b].point - roots[i].point).norm();
                da.total_cmp(&db)
            });
            for g in 1..=near.len() {
                let group: Vec<usize> = std::iter::once(i).chain(near[..g].iter().copied()).collect();
                let k: usize = group.iter().map(|&v| roots[v].multiplicity).sum();
                let centre = group
                    .iter()
                    .map(|&v| roots[v].point * roots[v].multiplicity as f64)
                    .sum::<Complex>()
                    / k as f64;
                let spread = group
                    .iter()
                    .map(|&v| (roots[v].point - centre).norm())
                    .fold(0.0, f64::max);
                if spread <= multiplicity_radius(p, centre, k) {
                    let mut rest: Vec<Root> = (0..roots.len())
                        .filter(|v| !group.contains(v))
                        .map(|v| roots[v])
                        .collect();
                    rest.push(Root {
                        point: centre,
                        multiplicity: k,
                    });
                    rest.sort_by(|a, b| lex_cmp(a.point, b.point, 0.0));
                    roots = rest;
                    continue 'outer;
                }
            }
        }
        return roots;
    }
}

/// Lexicographic order by `(re, im)`; real parts within `tol` count as equal.
pub fn lex_cmp(a: Complex, b: Complex, tol: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() <= tol {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

/// A critical point `ρ` of `P` with value `P(ρ)` and its multiplicity as a root of `P'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub point: Complex,
    pub value: Complex,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CriticalData {
    pub points: Vec<CriticalPoint>,
}

impl CriticalData {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|c| c.multiplicity).sum()
    }
}

/// Critical points of `P` (roots of `P'`) and critical values. Empty for `n = 1`.
pub fn critical_data(p: &Polynomial, tol: f64) -> Result<CriticalData> {
    let Some(dp) = p.monic_derivative() else {
        return Ok(CriticalData::default());
    };
    let roots = find_roots_with(
        &dp,
        RootOptions {
            tol,
            cluster_radius: Some(CLUSTER_RADIUS_FACTOR * root_bound(p)),
        },
    )?;
    Ok(CriticalData {
        points: roots
            .roots
            .into_iter()
            .map(|r| CriticalPoint {
                point: r.point,
                value: p.eval(r.point),
                multiplicity: r.multiplicity,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn from_roots_difference_of_squares() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let p = Polynomial::from_roots(&[c(0.0, 0.0); 3]).unwrap();
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            Polynomial::from_roots(&[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn parse_and_print() {
        let p: Polynomial = "1:0,0:0,-1:0".parse().unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coeff(0), c(-1.0, 0.0));
        assert_eq!(p.to_string(), "1:0,0:0,-1:0");
        assert!("2:0,1:0".parse::<Polynomial>().is_err());
        assert!("1:0".parse::<Polynomial>().is_err());
        assert!("1:0,x:0".parse::<Polynomial>().is_err());
        let q: Polynomial = "1:0,0.5:-2.25".parse().unwrap();
        assert_eq!(q.to_string().parse::<Polynomial>().unwrap(), q);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let p: Polynomial = "1:0,0:0,-1:0".parse().unwrap();
        let rs = find_roots(&p, 1e-9).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert!((rs.roots[0].point - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((rs.roots[1].point - c(1.0, 0.0)).norm() < 1e-12);
        assert!(rs.roots.iter().all(|r| r.multiplicity == 1));

        let p: Polynomial = "1:0,0:0,0:0".parse().unwrap();
        let rs = find_roots(&p, 1e-9).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!(rs.roots[0].point.norm() < 1e-12);
    }

    #[test]
    fn high_multiplicity_clusters() {
        for n in 1..=8 {
            let p = Polynomial::monomial_plus(n, c(0.0, 0.0)).unwrap();
            let rs = find_roots(&p, 1e-9).unwrap();
            assert_eq!(rs.roots.len(), 1, "z^{n}");
            assert_eq!(rs.roots[0].multiplicity, n);
        }
        let p = Polynomial::from_roots(&[c(0.3, 0.1), c(0.3, 0.1), c(-2.0, 1.0)]).unwrap();
        let rs = find_roots(&p, 1e-9).unwrap();
        assert_eq!(rs.roots.len(), 2);
        let double = rs.roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!((double.point - c(0.3, 0.1)).norm() < 1e-7);
    }

    #[test]
    fn critical_data_examples() {
        let p: Polynomial = "1:0,0:0,-3:0,0:0".parse().unwrap();
        let cd = critical_data(&p, 1e-9).unwrap();
        assert_eq!(cd.points.len(), 2);
        assert!((cd.points[0].point - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((cd.points[0].value - c(2.0, 0.0)).norm() < 1e-12);
        assert!((cd.points[1].point - c(1.0, 0.0)).norm() < 1e-12);
        assert!((cd.points[1].value - c(-2.0, 0.0)).norm() < 1e-12);

        for n in 2..=6 {
            let p = Polynomial::monomial_plus(n, c(0.0, 0.0)).unwrap();
            let cd = critical_data(&p, 1e-9).unwrap();
            assert_eq!(cd.points.len(), 1);
            assert_eq!(cd.points[0].multiplicity, n - 1);
            assert!(cd.points[0].value.norm() < 1e-12);
        }

        let cc = c(0.7, -1.3);
        let p = Polynomial::monomial_plus(2, -cc).unwrap();
        let cd = critical_data(&p, 1e-9).unwrap();
        assert_eq!(cd.points.len(), 1);
        assert!(cd.points[0].point.norm() < 1e-14);
        assert!((cd.points[0].value + cc).norm() < 1e-14);

        let p: Polynomial = "1:0,3:0".parse().unwrap();
        assert!(critical_data(&p, 1e-9).unwrap().points.is_empty());
    }

    #[test]
    fn root_bound_examples() {
        let p: Polynomial = "1:0,0:0,-1:0".parse().unwrap();
        assert!(root_bound(&p) >= 2.0);
        let p: Polynomial = "1:0,0:0".parse().unwrap();
        assert_eq!(root_bound(&p), 1.5);
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Polynomial::from_roots(&[c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0), c(0.0, 0.4)]).unwrap();
        let z0 = c(0.3, -0.7);
        let t = p.taylor_at(z0);
        let (v, d1, d2) = p.eval_with_two_derivatives(z0);
        assert!((t[0] - v).norm() < 1e-12);
        assert!((t[1] - d1).norm() < 1e-12);
        assert!((t[2] - d2 / 2.0).norm() < 1e-12);
        assert_eq!(t[4], c(1.0, 0.0));
    }

    #[test]
    fn deflation() {
        let p = Polynomial::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(5.0, 0.0)]).unwrap();
        let (q, rem) = p.deflate(c(1.0, 0.0)).unwrap();
        assert!(rem.norm() < 1e-14);
        let expect = Polynomial::from_roots(&[c(0.0, 0.0), c(5.0, 0.0)]).unwrap();
        for k in 0..=2 {
            assert!((q.coeff(k) - expect.coeff(k)).norm() < 1e-14);
        }
    }
}

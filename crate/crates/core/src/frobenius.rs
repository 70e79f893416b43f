//! Semisimple Frobenius structure on the space of polynomials
//! `P(z) = z^{n+1} + a_1 z^{n-1} + ... + a_n`.
//!
//! Canonical coordinates are the critical values `u^i = P(ρ_i)`, the flat
//! metric is diagonal with `g_ii = 1/P''(ρ_i)` and the metric potential is
//! `η = a_1/(n+1)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::poly::{critical_data, lex_cmp, Complex, Polynomial, DEFAULT_ROOT_TOL};

/// Zero-sum tolerance on `Σρ`, relative to `max(1, max |ρ_i|)`.
pub const ZERO_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalCoordinates {
    /// Critical points, lexicographically ordered by `(re, im)`.
    pub rho: Vec<Complex>,
    /// Critical values `u^i = P(ρ_i)`; basis vector `e_i = ∂/∂u^i`.
    pub u: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricData {
    /// Diagonal entries `g_ii = 1/P''(ρ_i)`, in the order of [`CanonicalCoordinates`].
    pub g: Vec<Complex>,
    /// Metric potential `η = a_1/(n+1)`.
    pub eta: Complex,
}

/// Stratum profile for the cell decomposition: `k` lines carrying
/// `m_1..m_k` critical points (summing to `n - 1`) in `j_1..j_k` collision groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellProfile {
    pub n: usize,
    pub m: Vec<usize>,
    pub j: Vec<usize>,
}

impl CellProfile {
    pub fn k(&self) -> usize {
        self.m.len()
    }

    pub fn q(&self) -> usize {
        self.j.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("cell profile: {msg}")));
        if self.m.is_empty() {
            return bad("k must be positive");
        }
        if self.m.len() != self.j.len() {
            return bad("m and j must have the same length");
        }
        if self.m.contains(&0) {
            return bad("every m_i must be positive");
        }
        if self.n == 0 || self.m.iter().sum::<usize>() != self.n - 1 {
            return bad("m_1 + ... + m_k must equal n - 1");
        }
        if self.j.iter().zip(&self.m).any(|(&j, &m)| j == 0 || j > m) {
            return bad("need 1 <= j_i <= m_i");
        }
        Ok(())
    }
}

/// Dimension `q + k` of the cell attached to `profile`.
pub fn cell_dimension(profile: &CellProfile) -> Result<usize> {
    profile.validate()?;
    Ok(profile.q() + profile.k())
}

fn zero_sum_scale(rho: &[Complex]) -> f64 {
    rho.iter().map(|r| r.norm()).fold(1.0, f64::max)
}

/// Elementary symmetric polynomials `σ_0 = 1, σ_1, ..., σ_n`.
fn elementary_symmetric(rho: &[Complex]) -> Vec<Complex> {
    let mut sigma = vec![Complex::new(0.0, 0.0); rho.len() + 1];
    sigma[0] = Complex::new(1.0, 0.0);
    for (count, &r) in rho.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            let prev = sigma[k - 1];
            sigma[k] += prev * r;
        }
    }
    sigma
}

/// Reconstructs `P` of degree `n + 1` from its critical points `ρ_1..ρ_n`
/// (which must sum to zero) and its constant term, via
/// `a_i = (-1)^{i+1} (n+1)/(n-i) σ_{i+1}(ρ)` for `i < n`.
pub fn coeffs_from_crit(rho: &[Complex], constant: Complex) -> Result<Polynomial> {
    let n = rho.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one critical point".into()));
    }
    let sum: Complex = rho.iter().sum();
    if sum.norm() > ZERO_SUM_TOL * zero_sum_scale(rho) {
        return Err(Error::InvalidArgument(format!(
            "critical points must sum to zero (sum = {sum})"
        )));
    }
    let sigma = elementary_symmetric(rho);
    let big_n = (n + 1) as f64;
    // ascending coefficients of a degree n+1 polynomial
    let mut coeffs = vec![Complex::new(0.0, 0.0); n + 2];
    coeffs[n + 1] = Complex::new(1.0, 0.0);
    coeffs[0] = constant;
    for i in 1..n {
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - i] = sigma[i + 1] * (sign * big_n / (n - i) as f64);
    }
    Polynomial::from_ascending(coeffs)
}

fn check_normalized(p: &Polynomial) -> Result<()> {
    let deg = p.degree();
    if deg < 2 {
        return Err(Error::InvalidArgument("degree must be at least 2".into()));
    }
    let sub = p.coeff(deg - 1);
    if sub.norm() > ZERO_SUM_TOL * p.cauchy_bound() {
        return Err(Error::InvalidArgument(
            "the z^n coefficient must vanish (critical points sum to zero)".into(),
        ));
    }
    Ok(())
}

/// Canonical coordinates on the lexicographic sheet of the ordering cover.
pub fn canonical_coords(p: &Polynomial) -> Result<CanonicalCoordinates> {
    check_normalized(p)?;
    let cd = critical_data(p, DEFAULT_ROOT_TOL)?;
    if cd.points.iter().any(|c| c.multiplicity > 1) {
        return Err(Error::DegenerateLocus);
    }
    let scale = p.cauchy_bound();
    let mut rho: Vec<Complex> = cd.points.iter().map(|c| c.point).collect();
    rho.sort_by(|a, b| lex_cmp(*a, *b, 1e-9 * scale));
    let sum: Complex = rho.iter().sum();
    debug_assert!(sum.norm() < 1e-9 * scale.max(zero_sum_scale(&rho)));
    let u = rho.iter().map(|&r| p.eval(r)).collect();
    Ok(CanonicalCoordinates { rho, u })
}

/// Flat metric entries and metric potential.
pub fn flat_metric(p: &Polynomial) -> Result<MetricData> {
    let cc = match canonical_coords(p) {
        Err(Error::DegenerateLocus) => {
            return Err(Error::DegenerateMetric { index: 0 });
        }
        other => other?,
    };
    let scale = p.magnitude_at(Complex::new(1.0, 0.0));
    let mut g = Vec::with_capacity(cc.rho.len());
    for (index, &r) in cc.rho.iter().enumerate() {
        let (_, _, d2) = p.eval_with_two_derivatives(r);
        if d2.norm() <= 1e-12 * scale {
            return Err(Error::DegenerateMetric { index });
        }
        g.push(d2.inv());
    }
    Ok(MetricData {
        g,
        eta: metric_potential(p),
    })
}

/// `η = a_1/(n+1)` where `a_1` is the `z^{n-1}` coefficient of the degree `n+1` polynomial.
pub fn metric_potential(p: &Polynomial) -> Complex {
    let deg = p.degree();
    if deg < 2 {
        return Complex::new(0.0, 0.0);
    }
    p.coeff(deg - 2) / deg as f64
}

/// Newton continuation of critical points of `p` starting from `seeds`.
fn continue_critical_points(p: &Polynomial, seeds: &[Complex]) -> Result<Vec<Complex>> {
    let scale = p.cauchy_bound();
    seeds
        .iter()
        .map(|&seed| {
            let mut z = seed;
            for _ in 0..50 {
                let (_, d1, d2) = p.eval_with_two_derivatives(z);
                if d2.norm() == 0.0 {
                    return Err(Error::DegenerateMetric { index: 0 });
                }
                let step = d1 / d2;
                z -= step;
                if step.norm() <= 1e-15 * scale {
                    break;
                }
            }
            Ok(z)
        })
        .collect()
}

/// Finite-difference estimate of `∂η/∂u^i`, one entry per canonical coordinate.
///
/// The `a`-chart is perturbed by central differences with a
/// cube-root-of-epsilon step, critical points are continued by Newton
/// from the base point, and the chain rule `∂η/∂u = J^{-T} ∂η/∂a` is
/// solved with `J = ∂u/∂a`.
pub fn potential_gradient_fd(p: &Polynomial) -> Result<Vec<Complex>> {
    let cc = canonical_coords(p)?;
    let deg = p.degree();
    let n = deg - 1;
    let mut jac = DMatrix::<Complex>::zeros(n, n);
    for k in 1..=n {
        // a_k is the coefficient of z^{n-k}
        let idx = n - k;
        let a = p.coeff(idx);
        let h = f64::EPSILON.cbrt() * a.norm().max(1.0);
        let shifted = |delta: f64| -> Result<Vec<Complex>> {
            let mut c = p.coeffs().to_vec();
            c[idx] += delta;
            let q = Polynomial::from_ascending(c)?;
            let rho = continue_critical_points(&q, &cc.rho)?;
            Ok(rho.iter().map(|&r| q.eval(r)).collect())
        };
        let plus = shifted(h)?;
        let minus = shifted(-h)?;
        for i in 0..n {
            jac[(i, k - 1)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let mut e = DVector::<Complex>::zeros(n);
    e[0] = Complex::new(1.0, 0.0);
    let row = jac
        .transpose()
        .lu()
        .solve(&e)
        .ok_or(Error::DegenerateLocus)?;
    Ok(row.iter().map(|&x| x / deg as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn reconstruction_examples() {
        let p = coeffs_from_crit(&[c(1.0, 0.0), c(-1.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert_eq!(p.to_string(), "1:0,0:0,-3:0,0:0");

        let k = c(0.5, -2.0);
        let p = coeffs_from_crit(&[c(0.0, 0.0); 4], k).unwrap();
        assert_eq!(p, Polynomial::monomial_plus(5, k).unwrap());

        assert!(matches!(
            coeffs_from_crit(&[c(1.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn canonical_coordinate_examples() {
        let p: Polynomial = "1:0,0:0,-3:0,0:0".parse().unwrap();
        let cc = canonical_coords(&p).unwrap();
        assert!((cc.rho[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((cc.rho[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((cc.u[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((cc.u[1] - c(-2.0, 0.0)).norm() < 1e-12);

        let p: Polynomial = "1:0,0:0,0:0,0:0".parse().unwrap();
        assert!(matches!(canonical_coords(&p), Err(Error::DegenerateLocus)));

        let p: Polynomial = "1:0,0:0,3:0,0:0".parse().unwrap();
        let cc = canonical_coords(&p).unwrap();
        assert!((cc.rho[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((cc.rho[1] - c(0.0, 1.0)).norm() < 1e-12);
        for (r, u) in cc.rho.iter().zip(&cc.u) {
            assert!((p.eval(*r) - u).norm() < 1e-14);
        }
        assert!((cc.u[0] - c(0.0, -2.0)).norm() < 1e-12);

        let p: Polynomial = "1:0,1:0,0:0".parse().unwrap();
        assert!(matches!(canonical_coords(&p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn metric_examples() {
        let p: Polynomial = "1:0,0:0,-3:0,0:0".parse().unwrap();
        let m = flat_metric(&p).unwrap();
        assert!((m.g[0] - c(-1.0 / 6.0, 0.0)).norm() < 1e-12);
        assert!((m.g[1] - c(1.0 / 6.0, 0.0)).norm() < 1e-12);
        assert!((m.eta - c(-1.0, 0.0)).norm() < 1e-15);

        for n in 3..=6 {
            let p = Polynomial::monomial_plus(n, c(0.3, 0.1)).unwrap();
            assert!(matches!(flat_metric(&p), Err(Error::DegenerateMetric { .. })));
        }
    }

    #[test]
    fn cubic_potential_gradient() {
        let p: Polynomial = "1:0,0:0,-3:0,0.5:0.25".parse().unwrap();
        let grad = potential_gradient_fd(&p).unwrap();
        let m = flat_metric(&p).unwrap();
        for (a, b) in grad.iter().zip(&m.g) {
            assert!((a - b).norm() / b.norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn cell_dimension_examples() {
        for n in 2..=7 {
            let prof = CellProfile {
                n,
                m: vec![n - 1],
                j: vec![n - 1],
            };
            assert_eq!(cell_dimension(&prof).unwrap(), n);
        }
        let prof = CellProfile {
            n: 3,
            m: vec![1, 1],
            j: vec![1, 1],
        };
        assert_eq!(cell_dimension(&prof).unwrap(), 4);
        let prof = CellProfile {
            n: 4,
            m: vec![3],
            j: vec![1],
        };
        assert_eq!(cell_dimension(&prof).unwrap(), 2);

        let bad = CellProfile {
            n: 4,
            m: vec![2],
            j: vec![1],
        };
        assert!(cell_dimension(&bad).is_err());
        let bad = CellProfile {
            n: 4,
            m: vec![3],
            j: vec![4],
        };
        assert!(cell_dimension(&bad).is_err());
    }
}

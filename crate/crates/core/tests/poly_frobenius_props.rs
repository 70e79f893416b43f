use num_complex::Complex64 as C;
use proptest::prelude::*;
use skizze_core::frobenius::{canonical_coords, coeffs_from_crit, flat_metric, potential_gradient_fd};
use skizze_core::poly::{critical_data, find_roots, root_bound, Polynomial};

fn point() -> impl Strategy<Value = C> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C::new(a, b))
}

/// Points with pairwise distance at least 0.05, so multiplicities are 1.
fn separated(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec(point(), n).prop_filter("separated", |v| {
        v.iter()
            .enumerate()
            .all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() > 0.05))
    })
}

/// Multiset equality up to `tol`, greedy matching.
fn same_multiset(a: &[C], b: &[C], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|p, q| (p.1 - x).norm().total_cmp(&(q.1 - x).norm()));
        match best {
            Some((j, y)) if (y - x).norm() < tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

/// Ascending coefficients of `∏(z - r)`.
fn expand(roots: &[C]) -> Vec<C> {
    let mut c = vec![C::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn root_round_trip(roots in (1usize..=10).prop_flat_map(separated)) {
        let p = Polynomial::from_roots(&roots).unwrap();
        let found = find_roots(&p, 1e-9).unwrap();
        prop_assert_eq!(found.total_multiplicity(), roots.len());
        prop_assert!(same_multiset(&found.expanded(), &roots, 1e-7));
    }

    #[test]
    fn critical_multiplicities_sum_to_n_minus_1(roots in prop::collection::vec(point(), 2..=8)) {
        let p = Polynomial::from_roots(&roots).unwrap();
        let cd = critical_data(&p, 1e-9).unwrap();
        prop_assert_eq!(cd.total_multiplicity(), roots.len() - 1);
    }

    #[test]
    fn root_bound_contains_roots_and_critical_points(roots in prop::collection::vec(point(), 1..=8)) {
        let p = Polynomial::from_roots(&roots).unwrap();
        let r = root_bound(&p);
        for z in find_roots(&p, 1e-9).unwrap().expanded() {
            prop_assert!(z.norm() < r);
        }
        for c in critical_data(&p, 1e-9).unwrap().points {
            prop_assert!(c.point.norm() < r);
        }
    }

    #[test]
    fn reconstruction_matches_termwise_integration(
        raw in prop::collection::vec(point(), 1..=8),
        constant in point(),
    ) {
        let n = raw.len();
        let mean = raw.iter().sum::<C>() / n as f64;
        let rho: Vec<C> = raw.iter().map(|r| r - mean).collect();
        let p = coeffs_from_crit(&rho, constant).unwrap();
        // P' = (n+1) ∏(z - ρ_i), integrated term by term
        let d = expand(&rho);
        let mut oracle = vec![constant];
        for (k, dk) in d.iter().enumerate() {
            oracle.push(dk * (n as f64 + 1.0) / (k as f64 + 1.0));
        }
        let scale = oracle.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in p.coeffs().iter().zip(&oracle) {
            prop_assert!((a - b).norm() <= 1e-10 * scale, "{} vs {}", a, b);
        }
        prop_assert!(p.coeff(n).norm() <= 1e-12 * scale);
    }

    #[test]
    fn critical_data_inverts_reconstruction(raw in (1usize..=8).prop_flat_map(separated), constant in point()) {
        let n = raw.len();
        let mean = raw.iter().sum::<C>() / n as f64;
        let rho: Vec<C> = raw.iter().map(|r| r - mean).collect();
        let p = coeffs_from_crit(&rho, constant).unwrap();
        let cd = critical_data(&p, 1e-9).unwrap();
        let found: Vec<C> = cd.points.iter().flat_map(|c| std::iter::repeat_n(c.point, c.multiplicity)).collect();
        prop_assert!(same_multiset(&found, &rho, 1e-6));
        prop_assert!((p.eval(C::new(0.0, 0.0)) - constant).norm() < 1e-12);
    }

    #[test]
    fn potential_gradient_is_the_metric(raw in (2usize..=6).prop_flat_map(separated), constant in point()) {
        let n = raw.len();
        let mean = raw.iter().sum::<C>() / n as f64;
        let rho: Vec<C> = raw.iter().map(|r| r - mean).collect();
        let p = coeffs_from_crit(&rho, constant).unwrap();
        let Ok(cc) = canonical_coords(&p) else { return Ok(()) };
        let metric = flat_metric(&p).unwrap();
        let grad = potential_gradient_fd(&p).unwrap();
        prop_assert_eq!(cc.u.len(), grad.len());
        for (g, d) in metric.g.iter().zip(&grad) {
            prop_assert!((g - d).norm() <= 1e-5 * g.norm(), "{} vs {}", g, d);
        }
    }
}

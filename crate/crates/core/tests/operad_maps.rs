use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skizze_core::operad::{
    compose, compose_raw, delta, doubling, forget_root, forgetting, from_theta_delta, similar, theta,
    verify_composition, Configuration,
};
use skizze_core::poset::{apply_contract, build_poset, enumerate_moves};
use skizze_core::tracer::classify;
use skizze_core::{Complex, Polynomial};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn cfg(s: &str) -> Configuration {
    s.parse().unwrap()
}

fn random_config(rng: &mut ChaCha8Rng, n: usize, prefix: &str) -> Configuration {
    loop {
        let pts: Vec<Complex> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let x = Configuration::new(labels, pts).unwrap();
        if n < 2 || x.min_distance() > 0.15 {
            return x;
        }
    }
}

#[test]
fn two_point_part_at_origin() {
    let base = cfg("p=0:0,q=10:0");
    let parts = [cfg("a=-1:0,b=1:0"), cfg("c=0:0")];
    let r = verify_composition(&base, &parts, 0.1).unwrap();
    assert!(r.passed, "{:?}", r.diagnostics);
    assert!(r.contraction_exact);
    let degenerate = Polynomial::from_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(10.0, 0.0)]).unwrap();
    assert_eq!(r.base_code, classify(&degenerate).unwrap().1);
    assert!(r.parts.iter().all(|p| p.matches));
}

#[test]
fn singleton_fibers_pass_trivially() {
    let base = cfg("p=0:0,q=3:1,r=-1:2");
    let parts = [cfg("a=0:0"), cfg("b=0:0"), cfg("c=0:0")];
    let r = verify_composition(&base, &parts, 0.1).unwrap();
    assert!(r.passed);
    assert!(r.parts.is_empty());
    assert_eq!(r.composed_code.as_ref(), Some(&r.base_code));
}

#[test]
fn mixed_parts_land_in_the_poset() {
    let base = cfg("p=0:0,q=0:4");
    let parts = [cfg("a=-1:0.3,b=1:-0.2"), cfg("c=0:0")];
    let r = verify_composition(&base, &parts, 0.2).unwrap();
    assert!(r.passed, "{:?}", r.diagnostics);
    let poset = build_poset(3).unwrap();
    assert!(poset.nodes.contains(r.composed_code.as_ref().unwrap()));
}

#[test]
fn clustered_ratio_is_linear_in_scale() {
    let base = cfg("p=0:0,q=2:1");
    let parts = [cfg("a=-1:0.5,b=1:0"), cfg("c=0:0")];
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let x = compose(&base, &parts, eps).unwrap().config;
            delta(&x, "a", "b", "c").unwrap() / eps
        })
        .collect();
    // log-log slope across each decade
    for w in ratios.windows(2) {
        let slope = 1.0 + (w[0] / w[1]).log10();
        assert!((slope - 1.0).abs() < 1e-2, "{ratios:?}");
    }
}

#[test]
fn staged_composition_equals_single_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base = random_config(&mut rng, 2, "q");
    let mid = [random_config(&mut rng, 2, "m"), random_config(&mut rng, 1, "n")];
    let leaves = [
        random_config(&mut rng, 2, "a"),
        random_config(&mut rng, 1, "b"),
        random_config(&mut rng, 2, "c"),
    ];
    let (e1, e2) = (0.01, 0.0005);
    let first = compose_raw(&base, &mid, e1).unwrap().config;
    let two = compose_raw(&first, &leaves, e2).unwrap().config;
    // inner stage at relative scale e2/e1, then e1
    let inner0 = compose_raw(&mid[0], &leaves[..2], e2 / e1).unwrap().config;
    let inner1 = compose_raw(&mid[1], &leaves[2..], e2 / e1).unwrap().config;
    let one = compose_raw(&base, &[inner0, inner1], e1).unwrap().config;
    assert_eq!(one.labels(), two.labels());
    for (a, b) in one.points().iter().zip(two.points()) {
        assert!((a - b).norm() <= 1e-15 * (1.0 + a.norm()));
    }
}

#[test]
fn forgetting_deflates() {
    let x = cfg("a=0:0,b=1:0,c=5:0");
    let y = forgetting(&x, "b").unwrap();
    assert_eq!(y, cfg("a=0:0,c=5:0"));
    let q = forget_root(&x.polynomial().unwrap(), c(1.0, 0.0)).unwrap();
    let expect = y.polynomial().unwrap();
    for (u, v) in q.coeffs().iter().zip(expect.coeffs()) {
        assert!((u - v).norm() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let x = random_config(&mut rng, 4, "x");
        let p = x.polynomial().unwrap();
        let root = x.points()[2];
        let q = forget_root(&p, root).unwrap();
        let back = q.mul(&Polynomial::from_roots(&[root]).unwrap());
        let scale = 1.0 + p.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (u, v) in back.coeffs().iter().zip(p.coeffs()) {
            assert!((u - v).norm() < 1e-12 * scale);
        }
    }
    assert!(forgetting(&cfg("a=0:0"), "a").is_err());
}

#[test]
fn forget_then_reinsert() {
    let x = cfg("a=0:0,b=1:1,c=5:0");
    let y = forgetting(&x, "b").unwrap();
    let d = doubling(&y, "a", Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4), 2f64.sqrt()).unwrap();
    let back = d.relabel(|l| if l == "a'" { "b".into() } else { l.into() }).unwrap();
    assert_eq!(back.labels(), x.labels());
    for (u, v) in back.points().iter().zip(x.points()) {
        assert!((u - v).norm() < 1e-12);
    }
}

#[test]
fn doubling_is_one_expanding_move() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 6 {
        let n = rng.gen_range(1..=2);
        let x = random_config(&mut rng, n, "x");
        let v = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let d = doubling(&x, "x0", v, 1e-3).unwrap();
        let (g_after, _) = classify(&d.polynomial().unwrap()).unwrap();
        // the contracted side has the doubled point as a double root
        let mut pts = x.points().to_vec();
        pts.insert(1, pts[0]);
        let (_, code_double) = classify(&Polynomial::from_roots(&pts).unwrap()).unwrap();
        let reached = enumerate_moves(&g_after)
            .iter()
            .filter_map(|m| apply_contract(&g_after, m).ok())
            .any(|h| h.canonical_code() == code_double);
        assert!(reached, "{} does not contract to {}", g_after.canonical_code(), code_double);
        checked += 1;
    }
}

#[test]
fn random_compositions_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let q = rng.gen_range(1..=2);
        let base = random_config(&mut rng, q, "p");
        let mut parts = Vec::new();
        let mut total = 0;
        for i in 0..q {
            let k = rng.gen_range(1..=(4 - total - (q - 1 - i)).min(3));
            total += k;
            parts.push(random_config(&mut rng, k, &format!("s{i}_")));
        }
        let eps = if q > 1 { base.min_distance() / 8.0 } else { 0.1 };
        let r = verify_composition(&base, &parts, eps).unwrap();
        assert!(r.passed, "{base} {parts:?}: {:?}", r.diagnostics);
    }
}

#[test]
fn composition_cap() {
    let base = cfg("p=0:0");
    let part = cfg("a=0:0,b=1:0,c=2:0,d=3:0,e=4:0");
    assert!(verify_composition(&base, &[part], 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_antisymmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_config(&mut rng, 3, "x");
        let ab = theta(&x, "x0", "x1").unwrap();
        let ba = theta(&x, "x1", "x0").unwrap();
        prop_assert!((ab + ba).norm() < 1e-15);
        prop_assert!((ab.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_from_directions_and_ratios(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_config(&mut rng, n, "x");
        let y = from_theta_delta(x.labels(), |a, b| theta(&x, a, b), |a, b, c| delta(&x, a, b, c)).unwrap();
        prop_assert!(similar(&x, &y, 1e-9));
    }

    #[test]
    fn relabeling_commutes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_config(&mut rng, 2, "p");
        let parts = [random_config(&mut rng, 2, "a"), random_config(&mut rng, 1, "b")];
        let eps = base.min_distance() / 10.0;
        let rename = |l: &str| format!("r_{l}");
        let left = compose(&base, &parts, eps).unwrap().config.relabel(rename).unwrap();
        let renamed: Vec<Configuration> = parts.iter().map(|p| p.relabel(rename).unwrap()).collect();
        let right = compose(&base, &renamed, eps).unwrap().config;
        prop_assert_eq!(&left, &right);

        let x = &parts[0];
        let d1 = doubling(x, "a0", c(0.0, 1.0), 0.01).unwrap().relabel(rename).unwrap();
        let d2 = doubling(&x.relabel(rename).unwrap(), "r_a0", c(0.0, 1.0), 0.01).unwrap();
        prop_assert_eq!(d1.points(), d2.points());
        let f1 = forgetting(x, "a1").unwrap().relabel(rename).unwrap();
        let f2 = forgetting(&x.relabel(rename).unwrap(), "r_a1").unwrap();
        prop_assert_eq!(f1, f2);
    }

    #[test]
    fn doubling_inverse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_config(&mut rng, 3, "x");
        let v = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let d = doubling(&x, "x1", v, 0.01).unwrap();
        prop_assert_eq!(forgetting(&d, "x1'").unwrap(), x);
    }
}

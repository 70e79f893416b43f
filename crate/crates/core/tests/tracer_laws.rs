use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skizze_core::graph::{EdgeColor, VertexKind};
use skizze_core::poly::Polynomial;
use skizze_core::tracer::{extract_graph, trace, TraceConfig};

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Polynomial {
    let roots: Vec<C> = (0..n)
        .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    Polynomial::from_roots(&roots).unwrap()
}

#[test]
fn random_polynomials_obey_graph_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let n = 1 + case % 5;
        let p = random_poly(&mut rng, n);
        let s = trace(&p, &TraceConfig::default()).unwrap_or_else(|e| panic!("{p}: {e}"));
        let g = extract_graph(&s).unwrap_or_else(|e| panic!("{p}: {e}"));
        assert_eq!(g.leaves().count(), 4 * n);
        for (v, slot) in g.leaves() {
            assert_eq!(g.rotation(v)[0].color, EdgeColor::of_slot(slot));
        }
        let mass: usize = g
            .roots()
            .map(|(v, _)| g.valency(v))
            .sum();
        assert_eq!(mass, 4 * n);
        assert!(g.is_forest());
        assert!(g.validate().is_valid());
        assert!(g.kinds().iter().any(|k| matches!(k, VertexKind::Root { .. })));
    }
}

#[test]
fn interior_samples_lie_on_the_level_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        let p = random_poly(&mut rng, n);
        let s = trace(&p, &TraceConfig::default()).unwrap();
        for arc in &s.arcs {
            for z in &arc.polyline[1..arc.polyline.len() - 1] {
                let v = p.eval(*z);
                let f = match arc.color {
                    EdgeColor::Red => v.im,
                    EdgeColor::Blue => v.re,
                };
                assert!(f.abs() <= 1e-10 * (1.0 + p.magnitude_at(*z)), "{p} at {z}: {f}");
            }
        }
    }
}

/// Distance from `z` to the polyline, with the length of the nearest chord.
fn dist_to_polyline(z: C, line: &[C]) -> (f64, f64) {
    line.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let t = if d.norm_sqr() == 0.0 {
                0.0
            } else {
                (((z - w[0]) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
            };
            ((w[0] + d * t - z).norm(), d.norm())
        })
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

#[test]
fn reversed_arcs_retrace_the_same_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=4 {
        let p = random_poly(&mut rng, n);
        let s = trace(&p, &TraceConfig::default()).unwrap();
        for i in 0..s.arcs.len() {
            let arc = &s.arcs[i];
            let back = s.retrace_reversed(i).unwrap();
            assert_eq!(back.end, arc.start);
            for z in &back.polyline {
                // both traces sample the same curve; chords deviate by their sagitta only
                let (d, chord) = dist_to_polyline(*z, &arc.polyline);
                assert!(d <= 0.1 * chord + 1e-9 * s.radius, "arc {i} of {p}: {d:e} from chord {chord:e}");
                let v = p.eval(*z);
                let f = match arc.color {
                    EdgeColor::Red => v.im,
                    EdgeColor::Blue => v.re,
                };
                assert!(f.abs() <= 1e-10 * (1.0 + p.magnitude_at(*z)));
            }
        }
    }
}

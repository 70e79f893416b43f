use std::time::Instant;

use num_complex::Complex64 as C;
use skizze_core::poly::Polynomial;
use skizze_core::poset::{build_poset, enumerate_moves, maximal_element, MoveKind};
use skizze_core::tracer::classify;

fn z2_minus(c: C) -> Polynomial {
    Polynomial::from_ascending(vec![-c, C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap()
}

#[test]
fn n2_closure() {
    let p = build_poset(2).unwrap();
    assert_eq!(p.nodes.len(), 9);
    assert_eq!(p.maximal, maximal_element(2));
    assert_eq!(p.minimal_nodes().len(), 4);
    let mut realized = std::collections::BTreeSet::new();
    for c in [
        C::new(1.0, 0.0),
        C::new(-1.0, 0.0),
        C::new(0.0, 1.0),
        C::new(0.0, -1.0),
        C::new(1.0, 1.0),
        C::new(-1.0, 1.0),
        C::new(-1.0, -1.0),
        C::new(1.0, -1.0),
        C::new(0.0, 0.0),
    ] {
        let (_, code) = classify(&z2_minus(c)).unwrap();
        assert!(p.nodes.contains(&code), "{c}: {code}");
        realized.insert(code);
    }
    assert_eq!(realized, p.nodes);
}

#[test]
fn wall_graph_moves() {
    let (g, _) = classify(&z2_minus(C::new(1.0, 0.0))).unwrap();
    let moves = enumerate_moves(&g);
    assert!(moves.iter().all(|m| m.kind() != MoveKind::Case2));
    assert!(moves.iter().any(|m| m.kind() == MoveKind::Case3));
}

#[test]
fn n3_unique_top() {
    let t = Instant::now();
    let p = build_poset(3).unwrap();
    assert!(t.elapsed().as_secs() < 60);
    assert_eq!(p.maximal_nodes(), vec![maximal_element(3)]);
}

#[test]
fn n4_unique_top() {
    let p = build_poset(4).unwrap();
    assert_eq!(p.maximal_nodes(), vec![maximal_element(4)]);
}

#[test]
fn cap_is_enforced() {
    let err = build_poset(5).unwrap_err();
    assert!(err.is_refusal());
    assert!(err.to_string().contains("1764"));
}

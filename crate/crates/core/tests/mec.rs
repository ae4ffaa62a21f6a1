mod common;

use common::random_mag;
use dcfci_core::ancestral::{mag_to_pag, pag_to_mag, pag_to_mag_with_priority};
use dcfci_core::fixtures::*;
use dcfci_core::graph::{GraphError, Mark, MixedGraph};
use dcfci_core::mec::*;
use dcfci_core::msep::m_separated_mag;
use dcfci_core::vars::{CiKey, VarSet};
use proptest::prelude::*;

#[test]
fn minimal_separator_examples() {
    let g = true_pag();
    assert_eq!(
        minimal_separators(&g, X, Y, 2).unwrap(),
        vec![VarSet::from_slice(&[A, B])]
    );
    assert_eq!(minimal_separators(&g, Y, X, 1).unwrap(), vec![]);
    assert_eq!(
        minimal_separators(&g, B, X, 2).unwrap(),
        vec![VarSet::EMPTY]
    );
    assert_eq!(
        minimal_separators(&MixedGraph::new(2), 0, 1, 0).unwrap(),
        vec![VarSet::EMPTY]
    );
    assert_eq!(
        minimal_separators(&g, A, Y, 2),
        Err(GraphError::Adjacent(A, Y))
    );
}

#[test]
fn example_triples() {
    let t = triples_with_order(&true_pag());
    let find = |a, b, c| t.iter().find(|w| w.triple == Triple::new(a, b, c)).copied();
    let bax = find(B, A, X).unwrap();
    assert_eq!((bax.order, bax.kind), (0, TripleKind::Collider));
    let xay = find(X, A, Y).unwrap();
    assert_eq!((xay.order, xay.kind), (0, TripleKind::NonCollider));
    // A -> B <- Y is shielded by A -> Y; q = X licenses it through the
    // collider <X, A, B> and the non-collider <X, A, Y>, both centred on A
    let aby = find(A, B, Y).unwrap();
    assert_eq!((aby.order, aby.kind), (1, TripleKind::NonCollider));
    assert!(find(B, A, Y).is_none());
    // <A, Y, B> is a shielded collider without a discriminating path
    assert!(find(A, Y, B).is_none());
}

#[test]
fn chain_has_one_order_zero_non_collider() {
    let mut g = MixedGraph::new(3);
    g.set_edge(0, 1, Mark::Circle, Mark::Circle);
    g.set_edge(1, 2, Mark::Circle, Mark::Circle);
    let t = triples_with_order(&g);
    assert_eq!(t.len(), 1);
    assert_eq!(
        (t[0].triple, t[0].order, t[0].kind),
        (Triple::new(0, 1, 2), 0, TripleKind::NonCollider)
    );
}

#[test]
fn correspondence_examples() {
    let g = true_pag();
    assert_eq!(
        corresponds(&g, &Triple::new(X, A, B)).unwrap(),
        vec![(B, X)]
    );
    // discriminating path <X, A, B, Y> in the true MAG: A is a collider
    // between X and B and a parent of Y
    let m = true_mag();
    assert_eq!(
        corresponds(&m, &Triple::new(A, B, Y)).unwrap(),
        vec![(X, Y)]
    );
    // shielded without a discriminating path
    assert_eq!(corresponds(&g, &Triple::new(A, Y, B)).unwrap(), vec![]);
    assert!(corresponds(&g, &Triple::new(X, Y, B)).is_err());
}

#[test]
fn signature_examples() {
    let s = mec_signature(&MixedGraph::new(3));
    assert!(s.skeleton.is_empty() && s.colliders.is_empty());
    assert_ne!(mec_signature(&true_pag()), mec_signature(&fci_pag()));
    assert_eq!(mec_signature(&true_pag()), mec_signature(&true_mag()));
    let m2 = pag_to_mag_with_priority(&true_pag(), &[A, B, X, Y]).unwrap();
    let m3 = pag_to_mag_with_priority(&true_pag(), &[Y, X, B, A]).unwrap();
    assert_eq!(mec_signature(&m2), mec_signature(&m3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn minimal_separators_are_distinct_and_minimal(seed in any::<u64>(), p in 2usize..=5) {
        let m = random_mag(p, seed);
        for x in 0..p {
            for y in x + 1..p {
                if m.adjacent(x, y) { continue; }
                let seps = minimal_separators(&m, x, y, p - 2).unwrap();
                prop_assert!(!seps.is_empty());
                prop_assert!(seps.windows(2).all(|w| w[0] < w[1]));
                for s in &seps {
                    let q = CiKey { x, y, z: *s };
                    prop_assert!(m_separated_mag(&m, &q).unwrap());
                    for v in s.iter() {
                        let q = CiKey { x, y, z: s.without(v) };
                        prop_assert!(!m_separated_mag(&m, &q).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn triples_are_class_invariants(seed in any::<u64>(), p in 2usize..=6) {
        let m = random_mag(p, seed);
        let pag = mag_to_pag(&m).unwrap();
        let rev: Vec<usize> = (0..p).rev().collect();
        let m1 = pag_to_mag(&pag).unwrap();
        let m2 = pag_to_mag_with_priority(&pag, &rev).unwrap();
        prop_assert_eq!(triples_with_order(&m), triples_with_order(&m1));
        prop_assert_eq!(triples_with_order(&m1), triples_with_order(&m2));
        prop_assert_eq!(mec_signature(&m), mec_signature(&pag));
        let t = triples_with_order(&m);
        prop_assert!(t.iter().all(|w| w.order <= p));
        prop_assert_eq!(t, triples_with_order(&m));
    }

    #[test]
    fn ordered_triples_decide_separator_membership(seed in any::<u64>(), p in 3usize..=5) {
        let m = random_mag(p, seed);
        for t in triples_with_order(&m) {
            for (x, y) in corresponds(&m, &t.triple).unwrap() {
                let seps = minimal_separators(&m, x, y, p - 2).unwrap();
                let inside = seps.iter().all(|s| s.contains(t.triple.b));
                let outside = seps.iter().all(|s| !s.contains(t.triple.b));
                match t.kind {
                    TripleKind::NonCollider => prop_assert!(inside, "{:?} {:?} {:?}", m, t, seps),
                    TripleKind::Collider => prop_assert!(outside, "{:?} {:?} {:?}", m, t, seps),
                }
            }
        }
    }

    #[test]
    fn separator_members_are_ordered_non_colliders(seed in any::<u64>(), p in 3usize..=5) {
        let m = random_mag(p, seed);
        let triples = triples_with_order(&m);
        let all: Vec<((usize, usize), Vec<VarSet>)> = (0..p)
            .flat_map(|x| (x + 1..p).map(move |y| (x, y)))
            .filter(|&(x, y)| !m.adjacent(x, y))
            .map(|(x, y)| ((x, y), minimal_separators(&m, x, y, p - 2).unwrap()))
            .collect();
        for (_, seps) in &all {
            for s in seps {
                for z in s.iter() {
                    // some ordered non-collider centred on z corresponds to a
                    // pair whose minimal separator holds z
                    let ok = triples
                        .iter()
                        .filter(|t| t.triple.b == z && t.kind == TripleKind::NonCollider)
                        .flat_map(|t| corresponds(&m, &t.triple).unwrap())
                        .any(|pair| {
                            all.iter().any(|(q, ss)| *q == pair && ss.iter().any(|s2| s2.contains(z)))
                        });
                    prop_assert!(ok, "{:?} member {}", m, z);
                }
            }
        }
    }
}

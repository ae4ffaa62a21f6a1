mod common;

use common::{inducing_by_paths, random_admg, random_mag};
use dcfci_core::ancestral::*;
use dcfci_core::fixtures::*;
use dcfci_core::graph::{GraphError, Mark, MixedGraph};
use proptest::prelude::*;

#[test]
fn ancestral_examples() {
    assert!(is_ancestral(&true_mag()).unwrap());

    let mut cyc = MixedGraph::new(2);
    cyc.add_directed(0, 1);
    // a 2-cycle cannot be stored on one pair; use a 3-cycle instead
    let mut cyc3 = MixedGraph::new(3);
    cyc3.add_directed(0, 1);
    cyc3.add_directed(1, 2);
    cyc3.add_directed(2, 0);
    assert!(is_ancestral(&cyc).unwrap());
    assert!(!is_ancestral(&cyc3).unwrap());

    let mut almost = MixedGraph::new(3);
    almost.add_bidirected(0, 1);
    almost.add_directed(0, 2);
    almost.add_directed(2, 1);
    assert!(!is_ancestral(&almost).unwrap());

    assert!(matches!(
        is_ancestral(&true_pag()),
        Err(GraphError::ClassMismatch(..))
    ));
}

#[test]
fn maximal_examples() {
    assert!(is_maximal(&MixedGraph::complete(5, Mark::Arrow)));
    assert!(is_maximal(&true_mag()));
    let mut g = MixedGraph::new(3);
    g.add_bidirected(0, 1);
    g.add_bidirected(1, 2);
    assert!(is_maximal(&g));
    // make the middle vertex an ancestor of an endpoint: inducing path
    let mut h = MixedGraph::new(4);
    h.add_bidirected(0, 1);
    h.add_bidirected(1, 2);
    h.add_directed(1, 3);
    h.add_directed(3, 2);
    assert!(!is_maximal(&h));
    assert!(inducing_by_paths(&h, 0, 2));
}

#[test]
fn example_class_round_trip() {
    assert_eq!(mag_to_pag(&true_mag()).unwrap(), true_pag());
    let m = pag_to_mag(&true_pag()).unwrap();
    assert!(m.is_directed(A, Y) && m.is_directed(B, Y));
    assert_eq!(mag_to_pag(&m).unwrap(), true_pag());
    assert_eq!(pag_to_mag(&true_mag()).unwrap(), true_mag());
}

#[test]
fn validity_examples() {
    assert!(is_valid_pag(&true_pag()));
    assert!(!is_valid_pag(&bccd_pag()));
    let mut two = MixedGraph::new(2);
    two.set_edge(0, 1, Mark::Circle, Mark::Circle);
    assert!(is_valid_pag(&two));
    assert!(is_valid_pag(&MixedGraph::new(3)));
}

#[test]
fn cfci_marks_alone_describe_another_class() {
    // The ambiguity annotation on <B, A, X> has no mark representation; read
    // as plain marks the graph is the PAG of X -> A -> B <- Y.
    let g = cfci_pag();
    assert!(is_valid_pag(&g));
    let mut m = MixedGraph::new(4);
    m.add_directed(X, A);
    m.add_directed(A, B);
    m.add_directed(Y, B);
    assert_eq!(mag_to_pag(&m).unwrap(), g);
    assert_ne!(g, true_pag());
}

#[test]
fn complete_mag_gives_all_circle_pag() {
    let mut m = MixedGraph::new(4);
    for u in 0..4 {
        for v in u + 1..4 {
            m.add_directed(u, v);
        }
    }
    assert_eq!(
        mag_to_pag(&m).unwrap(),
        MixedGraph::complete(4, Mark::Circle)
    );
}

#[test]
fn non_chordal_circle_component_is_rejected() {
    let mut g = MixedGraph::new(4);
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        g.set_edge(u, v, Mark::Circle, Mark::Circle);
    }
    assert_eq!(pag_to_mag(&g), Err(GraphError::NotChordal));
    assert!(!is_valid_pag(&g));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn maximality_matches_inducing_path_enumeration(seed in any::<u64>(), p in 2usize..=5) {
        let g = random_admg(p, 0.35, 0.3, seed);
        for x in 0..p {
            for y in x + 1..p {
                if !g.adjacent(x, y) {
                    prop_assert_eq!(has_inducing_path(&g, x, y), inducing_by_paths(&g, x, y));
                }
            }
        }
    }

    #[test]
    fn projected_mags_are_ancestral_and_maximal(seed in any::<u64>(), p in 2usize..=7) {
        let m = random_mag(p, seed);
        prop_assert!(is_ancestral(&m).unwrap());
        prop_assert!(is_maximal(&m));
    }

    #[test]
    fn pags_of_random_mags_are_valid(seed in any::<u64>(), p in 2usize..=6) {
        let m = random_mag(p, seed);
        let g = mag_to_pag(&m).unwrap();
        prop_assert_eq!(g.skeleton_pairs().collect::<Vec<_>>(), m.skeleton_pairs().collect::<Vec<_>>());
        prop_assert!(is_valid_pag(&g));
        let back = pag_to_mag(&g).unwrap();
        prop_assert_eq!(mag_to_pag(&back).unwrap(), g.clone());
        let rev: Vec<usize> = (0..p).rev().collect();
        let other = pag_to_mag_with_priority(&g, &rev).unwrap();
        prop_assert_eq!(mag_to_pag(&other).unwrap(), g);
    }
}

#[test]
fn check_pag_names_the_failing_stage() {
    assert_eq!(check_pag(&true_pag()), Ok(()));
    assert!(check_pag(&bccd_pag()).is_err());
    assert_eq!(check_pag(&bccd_pag()).is_ok(), is_valid_pag(&bccd_pag()));

    // a lone arrowhead is not implied by anything: the PAG of any MAG is o-o
    let mut g = MixedGraph::new(2);
    g.set_edge(0, 1, Mark::Circle, Mark::Arrow);
    assert_eq!(check_pag(&g), Err(PagDefect::RoundTrip));

    // a directed cycle admits no MAG
    let mut g = MixedGraph::new(3);
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    g.add_directed(2, 0);
    assert!(matches!(
        check_pag(&g),
        Err(PagDefect::Marks(_) | PagDefect::NoMag(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn check_pag_accepts_pags_of_mags(seed in any::<u64>(), p in 2usize..=6) {
        let m = random_mag(p, seed);
        let pag = mag_to_pag(&m).unwrap();
        prop_assert_eq!(check_pag(&pag), Ok(()));
    }
}

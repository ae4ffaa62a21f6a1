mod common;

use common::{random_mag, KeyedSource};
use dcfci_core::ancestral::{
    is_ancestral, is_maximal, mag_to_pag, pag_to_mag, pag_to_mag_with_priority,
};
use dcfci_core::bayes::{BffConfig, HypKind, Hypothesis};
use dcfci_core::exec::Sequential;
use dcfci_core::fixtures::*;
use dcfci_core::graph::{Mark, MixedGraph};
use dcfci_core::mec::{mec_signature, MinSeps};
use dcfci_core::msep::m_separated_pag;
use dcfci_core::scoring::*;
use proptest::prelude::*;

fn close(b: ScoreBounds, lower: f64, upper: f64, tol: f64) -> bool {
    (b.lower - lower).abs() <= tol && (b.upper - upper).abs() <= tol
}

fn dep(x: usize, y: usize, z: &[usize]) -> Hypothesis {
    Hypothesis {
        key: key(x, y, z),
        kind: HypKind::Dependence,
    }
}

fn indep(x: usize, y: usize, z: &[usize]) -> Hypothesis {
    Hypothesis {
        key: key(x, y, z),
        kind: HypKind::Independence,
    }
}

#[test]
fn pairwise_counts() {
    assert_eq!(pairwise_count(4, 2), 24);
    assert_eq!(pairwise_count(5, 3), 80);
    assert_eq!(pairwise_count(10, 8), 11_520);
    assert_eq!(pairwise_count(20, 18), 49_807_360);
    assert_eq!(pairwise_count(1, 0), 0);
    assert_eq!(pairwise_count(4, 0), 6);
    assert_eq!(all_pairwise_hypotheses(&true_pag(), 2).unwrap().len(), 24);
    assert_eq!(
        all_pairwise_hypotheses(&MixedGraph::complete(5, Mark::Circle), 3)
            .unwrap()
            .len(),
        80
    );
    let hs = all_pairwise_hypotheses(&MixedGraph::new(2), 0).unwrap();
    assert_eq!(hs.iter().collect::<Vec<_>>(), vec![indep(0, 1, &[])]);
}

#[test]
fn frechet_examples() {
    assert!(close(frechet_bounds(&[0.388, 0.802]), 0.190, 0.388, 1e-12));
    assert!(close(frechet_bounds(&[0.612, 0.198]), 0.0, 0.198, 1e-12));
    assert_eq!(
        frechet_bounds(&[1.0, 1.0, 1.0]),
        ScoreBounds {
            lower: 1.0,
            upper: 1.0
        }
    );
    assert_eq!(
        frechet_bounds(&[]),
        ScoreBounds {
            lower: 1.0,
            upper: 1.0
        }
    );
}

#[test]
fn straightforward_scores_on_the_example() {
    let src = table_source(&BffConfig::default());
    let cases = [
        (true_pag(), 0.612),
        (fci_pag(), 0.0136),
        (cfci_pag(), 0.0366),
        (dcd_pag(), 0.0366),
        (bccd_adjusted_pag(), 0.1848),
    ];
    for (g, upper) in cases {
        let s = straightforward_score(&g, &src, 2).unwrap();
        assert!(close(s, 0.0, upper, 1e-3), "{g:?}: {s:?}");
    }
}

#[test]
fn skeleton_hypothesis_examples() {
    let g = true_pag();
    let hs = skeleton_hypotheses(&g, &MinSeps::compute(&g, 2).unwrap(), 2).unwrap();
    assert_eq!(hs.get(&key(X, Y, &[A, B])), Some(HypKind::Independence));
    assert_eq!(hs.get(&key(X, Y, &[A])), Some(HypKind::Dependence));
    assert_eq!(hs.get(&key(X, Y, &[B])), Some(HypKind::Dependence));
    // B and X are separated by the empty set: no one-smaller subsets
    assert_eq!(hs.get(&key(B, X, &[])), Some(HypKind::Independence));
    assert_eq!(hs.get(&key(B, X, &[A])), None);
    // 4 adjacent pairs with 4 sets each, 2 minimal separators, 2 reductions
    assert_eq!(hs.len(), 4 * 4 + 2 + 2);

    let c = MixedGraph::complete(5, Mark::Circle);
    let hs = skeleton_hypotheses(&c, &MinSeps::compute(&c, 0).unwrap(), 0).unwrap();
    assert_eq!(hs.len(), 10);
    assert!(hs
        .iter()
        .all(|h| h.kind == HypKind::Dependence && h.key.z.is_empty()));
}

#[test]
fn stale_separator_map_is_rejected() {
    let g = true_pag();
    let mut h = g.clone();
    h.set_edge(X, Y, Mark::Circle, Mark::Circle);
    let seps = MinSeps::compute(&g, 2).unwrap();
    assert!(skeleton_hypotheses(&h, &seps, 2).is_err());
}

#[test]
fn collider_hypothesis_examples() {
    let g = true_pag();
    let hs = collider_hypotheses(&g, &MinSeps::compute(&g, 2).unwrap()).unwrap();
    assert_eq!(hs.get(&key(B, X, &[A])), Some(HypKind::Dependence));
    assert!(hs.iter().all(|h| h.kind == HypKind::Dependence));

    let f = fci_pag();
    let hs = collider_hypotheses(&f, &MinSeps::compute(&f, 2).unwrap()).unwrap();
    assert_eq!(
        hs.iter().collect::<Vec<_>>(),
        vec![dep(A, Y, &[B]), dep(B, X, &[A])]
    );

    let mut chain = MixedGraph::new(3);
    chain.set_edge(0, 1, Mark::Circle, Mark::Circle);
    chain.set_edge(1, 2, Mark::Circle, Mark::Circle);
    assert!(
        collider_hypotheses(&chain, &MinSeps::compute(&chain, 1).unwrap())
            .unwrap()
            .is_empty()
    );
}

#[test]
fn hypothesis_set_rejects_both_kinds() {
    let mut hs = HypothesisSet::new();
    hs.insert(dep(0, 1, &[2])).unwrap();
    hs.insert(dep(0, 1, &[2])).unwrap();
    assert_eq!(
        hs.insert(indep(0, 1, &[2])),
        Err(ScoreError::Conflict(key(0, 1, &[2])))
    );
}

#[test]
fn comparable_scores_on_the_example() {
    let src = table_source(&BffConfig::default());
    let s = comparable_scores(&[fci_pag(), cfci_pag()], 2, &src, &Sequential).unwrap();
    assert!(
        (s[0].bounds.lower - 0.486).abs() <= 1e-3 && (s[0].bounds.upper - 0.671).abs() <= 1e-3,
        "{s:?}"
    );
    assert!(close(s[1].bounds, 0.0, 0.185, 1e-3), "{s:?}");
    assert_eq!(s[0].n_diff, s[1].n_diff);
}

#[test]
fn indistinguishable_candidates_score_one() {
    let src = table_source(&BffConfig::default());
    let one = comparable_scores(&[true_pag()], 2, &src, &Sequential).unwrap();
    assert_eq!(
        (one[0].bounds, one[0].n_diff),
        (
            ScoreBounds {
                lower: 1.0,
                upper: 1.0
            },
            0
        )
    );
    let two = comparable_scores(&[true_pag(), true_pag()], 2, &src, &Sequential).unwrap();
    assert!(two.iter().all(|s| s.bounds
        == ScoreBounds {
            lower: 1.0,
            upper: 1.0
        }));
    assert_eq!(
        comparable_scores(&[], 2, &src, &Sequential),
        Err(ScoreError::Empty)
    );
}

#[test]
fn ranking() {
    let b = |lower, upper| ScoreBounds { lower, upper };
    let g1 = true_pag();
    let g2 = fci_pag();
    let scored = vec![
        (b(0.0, 0.3), g1.clone()),
        (b(0.1, 0.9), g1.clone()),
        (b(0.5, 0.9), g2.clone()),
    ];
    assert_eq!(rank_candidates(&scored), vec![2, 1, 0]);
    // equal bounds fall back to the graph order
    let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
    let scored = vec![(b(0.2, 0.4), hi), (b(0.2, 0.4), lo)];
    assert_eq!(rank_candidates(&scored), vec![1, 0]);
}

/// A MAG one edge away from `m`, if removing some edge leaves a MAG.
fn drop_one_edge(m: &MixedGraph, pick: usize) -> Option<MixedGraph> {
    let edges: Vec<_> = m.edges().collect();
    if edges.is_empty() {
        return None;
    }
    let (u, v, _, _) = edges[pick % edges.len()];
    let mut h = m.clone();
    h.remove_edge(u, v);
    (is_ancestral(&h).ok()? && is_maximal(&h)).then_some(h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn completions_score_identically(seed in any::<u64>(), p in 3usize..=6) {
        let m = random_mag(p, seed);
        let pag = mag_to_pag(&m).unwrap();
        let rev: Vec<usize> = (0..p).rev().collect();
        let m1 = pag_to_mag(&pag).unwrap();
        let m2 = pag_to_mag_with_priority(&pag, &rev).unwrap();
        let src = KeyedSource(seed);
        for r in 0..=p - 2 {
            let h = relevant_hypotheses(&m, r).unwrap();
            prop_assert_eq!(&h, &relevant_hypotheses(&m1, r).unwrap());
            prop_assert_eq!(&h, &relevant_hypotheses(&m2, r).unwrap());
            prop_assert_eq!(&h, &relevant_hypotheses(&pag, r).unwrap());
        }
        let s = straightforward_score(&m1, &src, p - 2).unwrap();
        prop_assert_eq!(s, straightforward_score(&m2, &src, p - 2).unwrap());
        let c = comparable_scores(&[m1.clone(), m2.clone(), m.clone()], p - 2, &src, &Sequential).unwrap();
        let one = ScoreBounds { lower: 1.0, upper: 1.0 };
        prop_assert!(c.iter().all(|x| x.bounds == one));
    }

    #[test]
    fn different_classes_disagree_on_a_relevant_hypothesis(seed in any::<u64>(), other in any::<u64>(), pick in 0usize..10) {
        let m1 = random_mag(5, seed);
        let m2 = if pick % 2 == 0 { random_mag(5, other) } else { match drop_one_edge(&m1, pick) { Some(h) => h, None => random_mag(5, other) } };
        prop_assume!(mec_signature(&m1) != mec_signature(&m2));
        let (p1, p2) = (mag_to_pag(&m1).unwrap(), mag_to_pag(&m2).unwrap());
        let contradicted = |a: &MixedGraph, b: &MixedGraph| {
            relevant_hypotheses(a, 3).unwrap().iter().any(|h| {
                let sep = m_separated_pag(b, &h.key).unwrap();
                sep != (h.kind == HypKind::Independence)
            })
        };
        prop_assert!(contradicted(&p1, &p2) || contradicted(&p2, &p1));
        prop_assert_ne!(relevant_hypotheses(&p1, 3).unwrap(), relevant_hypotheses(&p2, 3).unwrap());
    }

    #[test]
    fn comparable_scores_ignore_candidate_order(seed in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let c = [mag_to_pag(&random_mag(4, seed)).unwrap(), mag_to_pag(&random_mag(4, s2)).unwrap(), mag_to_pag(&random_mag(4, s3)).unwrap()];
        let src = KeyedSource(seed ^ s2);
        let fwd = comparable_scores(&c, 2, &src, &Sequential).unwrap();
        let rev = comparable_scores(&[c[2].clone(), c[1].clone(), c[0].clone()], 2, &src, &Sequential).unwrap();
        prop_assert_eq!(fwd[0], rev[2]);
        prop_assert_eq!(fwd[1], rev[1]);
        prop_assert_eq!(fwd[2], rev[0]);
    }

    #[test]
    fn frechet_closed_form(probs in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let b = frechet_bounds(&probs);
        let sum: f64 = probs.iter().sum();
        let min = probs.iter().copied().fold(1.0, f64::min);
        prop_assert!((b.upper - min).abs() < 1e-15);
        prop_assert!((b.lower - (sum - (probs.len() as f64 - 1.0)).max(0.0)).abs() < 1e-12);
        let product: f64 = probs.iter().product();
        prop_assert!(b.lower <= product + 1e-12 && product <= b.upper + 1e-12);
        prop_assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0);
    }
}

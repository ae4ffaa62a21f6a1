mod common;

use std::time::Instant;

use common::random_mag;
use dcfci_core::ancestral::{is_valid_pag, mag_to_pag};
use dcfci_core::bayes::BffConfig;
use dcfci_core::citest::{CiError, CiOutcome, CiSource, MagSource};
use dcfci_core::exec::Sequential;
use dcfci_core::fci::Sepsets;
use dcfci_core::fixtures::*;
use dcfci_core::graph::{Mark, MixedGraph};
use dcfci_core::mec::mec_signature;
use dcfci_core::scoring::ScoreBounds;
use dcfci_core::search::*;
use dcfci_core::vars::{CiKey, VarSet};
use proptest::prelude::*;

fn example_cfg() -> DcfciConfig {
    DcfciConfig {
        alpha: 0.01,
        k: 1,
        r_max: Some(2),
        ..Default::default()
    }
}

fn near(b: ScoreBounds, lower: f64, upper: f64, tol: f64) -> bool {
    (b.lower - lower).abs() <= tol && (b.upper - upper).abs() <= tol
}

fn candidate(graph: MixedGraph, sepsets: Sepsets) -> CandidatePag {
    CandidatePag {
        graph,
        sepsets,
        score: ScoreBounds {
            lower: 1.0,
            upper: 1.0,
        },
        n_diff: 0,
        r: 0,
    }
}

/// Every query gets the same outcome.
struct Flat(f64);

impl CiSource for Flat {
    fn outcome(&self, _: &CiKey) -> Result<CiOutcome, CiError> {
        Ok(CiOutcome {
            p_value: self.0,
            p_indep: self.0,
        })
    }
}

#[test]
fn worked_example_end_to_end() {
    let src = table_source(&BffConfig::default());
    let start = Instant::now();
    let out = dcfci(4, &src, &example_cfg(), &Sequential).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);

    assert_eq!(out.candidates.len(), 1);
    assert_eq!(out.candidates[0].graph, true_pag());
    assert!(near(out.candidates[0].score, 0.683, 0.683, 1e-3));

    let h0 = &out.history[0];
    assert_eq!((h0.generated, h0.invalid, h0.retained), (2, 0, 1));
    // the candidate without B - X ranks first
    assert_eq!(h0.ranked[0].graph, candidate_r0());
    assert_eq!(h0.ranked[1].graph, MixedGraph::complete(4, Mark::Circle));
    assert!(near(h0.ranked[0].score, 0.671, 0.671, 1e-3));
    assert!(near(h0.ranked[1].score, 0.328, 0.328, 1e-3));

    let h1 = &out.history[1];
    assert_eq!((h1.generated, h1.invalid, h1.retained), (4, 1, 1));
    let g1: Vec<_> = h1.ranked.iter().map(|c| c.graph.clone()).collect();
    assert_eq!(
        g1,
        vec![candidate_r0(), candidate_cut_xy(), candidate_cut_ay()]
    );
    assert!(near(h1.ranked[0].score, 0.413, 0.611, 2e-3));
    assert!(near(h1.ranked[1].score, 0.190, 0.388, 1e-3));
    assert!(near(h1.ranked[2].score, 0.0, 0.198, 1e-3));

    let h2 = &out.history[2];
    assert_eq!(h2.ranked[0].graph, true_pag());
    assert_eq!(
        out.candidates[0].sepsets.get(X, Y),
        Some(VarSet::from_slice(&[A, B]))
    );
    assert_eq!(out.candidates[0].sepsets.get(B, X), Some(VarSet::EMPTY));
}

#[test]
fn potential_separators_of_the_example() {
    let src = table_source(&BffConfig::default());
    let cfg = example_cfg();
    let root = candidate(MixedGraph::complete(4, Mark::Circle), Sepsets::new());
    let pm = potential_min_seps(&root, &src, 0, &cfg);
    assert_eq!(
        pm.into_iter().collect::<Vec<_>>(),
        vec![((B, X), vec![VarSet::EMPTY])]
    );

    let mut seps = Sepsets::new();
    seps.insert(B, X, VarSet::EMPTY);
    let c = candidate(candidate_r0(), seps);
    let pm = potential_min_seps(&c, &src, 1, &cfg);
    assert_eq!(
        pm.into_iter().collect::<Vec<_>>(),
        vec![
            ((A, Y), vec![VarSet::singleton(X)]),
            ((X, Y), vec![VarSet::singleton(A)])
        ]
    );
    // a looser p-value gate admits more
    let loose = DcfciConfig { alpha: 0.05, ..cfg };
    let tight = DcfciConfig { alpha: 0.5, ..cfg };
    assert_eq!(potential_min_seps(&c, &src, 1, &loose).len(), 1);
    assert!(potential_min_seps(&c, &src, 1, &tight).len() <= 1);
}

#[test]
fn expansion_of_the_example() {
    let src = table_source(&BffConfig::default());
    let mut seps = Sepsets::new();
    seps.insert(B, X, VarSet::EMPTY);
    let c = candidate(candidate_r0(), seps);
    let pm = potential_min_seps(&c, &src, 1, &example_cfg());
    let e = expand_candidates(&c, &pm, &src, &example_cfg());
    assert_eq!((e.generated, e.invalid), (4, 1));
    let graphs: Vec<_> = e.candidates.iter().map(|(g, _)| g.clone()).collect();
    assert_eq!(
        graphs,
        vec![candidate_r0(), candidate_cut_ay(), candidate_cut_xy()]
    );
    for (g, s) in &e.candidates {
        assert!(is_valid_pag(g));
        assert!(s.iter().all(|((x, y), _)| !g.adjacent(x, y)));
    }

    // over the cap with nothing certain: the most probable separators stay
    let capped = DcfciConfig {
        n_r_cap: 1,
        ..example_cfg()
    };
    let e = expand_candidates(&c, &pm, &src, &capped);
    assert_eq!(e.generated, 2);
    assert_eq!(e.candidates[1].0, candidate_cut_xy());

    // over the cap with a confident separator: it is applied outright
    let forced = DcfciConfig {
        n_r_cap: 1,
        certainty_threshold: 0.3,
        ..example_cfg()
    };
    let e = expand_candidates(&c, &pm, &src, &forced);
    let graphs: Vec<_> = e.candidates.iter().map(|(g, _)| g.clone()).collect();
    assert_eq!((e.generated, e.invalid), (2, 1));
    assert_eq!(graphs, vec![candidate_cut_xy()]);
}

#[test]
fn independent_pair_loses_its_edge() {
    let out = dcfci(
        2,
        &MagSource(&MixedGraph::new(2)),
        &DcfciConfig::default(),
        &Sequential,
    )
    .unwrap();
    assert_eq!(out.candidates.len(), 1);
    assert_eq!(out.candidates[0].graph, MixedGraph::new(2));
    let mut d = MixedGraph::new(2);
    d.add_directed(0, 1);
    let out = dcfci(2, &MagSource(&d), &DcfciConfig::default(), &Sequential).unwrap();
    assert_eq!(
        out.candidates[0].graph,
        MixedGraph::complete(2, Mark::Circle)
    );
}

#[test]
fn configuration_is_checked() {
    let src = Flat(0.5);
    let bad = |cfg: DcfciConfig, p| {
        matches!(
            dcfci(p, &src, &cfg, &Sequential),
            Err(SearchError::Config(_))
        )
    };
    assert!(bad(
        DcfciConfig {
            alpha: 0.0,
            ..Default::default()
        },
        4
    ));
    assert!(bad(
        DcfciConfig {
            alpha: 1.0,
            ..Default::default()
        },
        4
    ));
    assert!(bad(
        DcfciConfig {
            k: 0,
            ..Default::default()
        },
        4
    ));
    assert!(bad(
        DcfciConfig {
            r_max: Some(3),
            ..Default::default()
        },
        4
    ));
    assert!(bad(DcfciConfig::default(), 1));
}

#[test]
fn tie_modes_widen_the_beam() {
    let src = Flat(0.5);
    let run = |ties| {
        let cfg = DcfciConfig {
            ties,
            r_max: Some(0),
            ..Default::default()
        };
        dcfci(3, &src, &cfg, &Sequential).unwrap()
    };
    let strict = run(TieMode::Strict);
    let equal = run(TieMode::EqualUpper);
    let overlap = run(TieMode::Overlap);
    assert_eq!(strict.candidates.len(), 1);
    let ranked = &equal.history[0].ranked;
    let top = ranked[0].score.upper;
    assert_eq!(
        equal.candidates.len(),
        ranked.iter().filter(|c| c.score.upper == top).count()
    );
    assert!(equal.candidates.len() > 1);
    assert!(overlap.candidates.len() >= equal.candidates.len());
    let floor = overlap
        .candidates
        .iter()
        .map(|c| c.score.lower)
        .fold(1.0, f64::min);
    assert!(overlap.candidates.iter().all(|c| c.score.upper >= floor));
    assert_eq!(strict.candidates[0].graph, equal.candidates[0].graph);

    let capped = DcfciConfig {
        ties: TieMode::Overlap,
        r_max: Some(0),
        max_retained: 2,
        ..Default::default()
    };
    assert_eq!(
        dcfci(3, &src, &capped, &Sequential)
            .unwrap()
            .candidates
            .len(),
        2
    );
    let wide = DcfciConfig { k: 3, ..capped };
    assert_eq!(
        dcfci(3, &src, &wide, &Sequential).unwrap().candidates.len(),
        3
    );
}

#[test]
fn weak_faithfulness_of_the_example() {
    let src = table_source(&BffConfig::default());
    assert!(weak_faithfulness_holds(&true_mag(), &src, 2));
    assert!(weak_faithfulness_holds(
        &true_mag(),
        &MagSource(&true_mag()),
        2
    ));
    // a source that believes everything is independent
    assert!(!weak_faithfulness_holds(&true_mag(), &Flat(0.9), 2));
}

#[test]
fn true_r_pags_of_the_example() {
    let (g0, s0) = true_r_pag(&true_mag(), 0).unwrap();
    assert_eq!(g0, candidate_r0());
    assert_eq!(s0.len(), 1);
    let (g1, _) = true_r_pag(&true_mag(), 1).unwrap();
    assert_eq!(g1, candidate_r0());
    assert_eq!(true_r_pag(&true_mag(), 2).unwrap().0, true_pag());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_search_finds_the_true_pag(seed in any::<u64>(), p in 2usize..=5) {
        let m = random_mag(p, seed);
        let out = dcfci(p, &MagSource(&m), &DcfciConfig::default(), &Sequential).unwrap();
        prop_assert_eq!(out.candidates.len(), 1);
        let g = &out.candidates[0].graph;
        prop_assert_eq!(mec_signature(g), mec_signature(&m));
        prop_assert_eq!(g, &mag_to_pag(&m).unwrap());
    }

    #[test]
    fn oracle_search_is_anytime(seed in any::<u64>(), p in 3usize..=5) {
        let m = random_mag(p, seed);
        let out = dcfci(p, &MagSource(&m), &DcfciConfig::default(), &Sequential).unwrap();
        for h in &out.history {
            let (want, _) = true_r_pag(&m, h.r).unwrap();
            prop_assert_eq!(&h.ranked[0].graph, &want, "level {}", h.r);
            prop_assert!(h.ranked.iter().all(|c| is_valid_pag(&c.graph)));
        }
    }
}

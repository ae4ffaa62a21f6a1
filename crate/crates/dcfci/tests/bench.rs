use dcfci::bench::*;
use dcfci_core::exec::Sequential;
use dcfci_core::search::TieMode;

/// Exact two-sided binomial(n, 1/2) p-value from integer counts.
fn binom_p(w: usize, l: usize) -> f64 {
    let n = w + l;
    let k = w.min(l);
    let mut c: u128 = 1;
    let mut sum: u128 = 0;
    for i in 0..=k {
        if i > 0 {
            c = c * (n - i + 1) as u128 / i as u128;
        }
        sum += c;
    }
    (2.0 * sum as f64 / 2f64.powi(n as i32)).min(1.0)
}

#[test]
fn sign_test_small_counts() {
    for (w, l) in [
        (0, 1),
        (1, 0),
        (3, 0),
        (1, 9),
        (9, 1),
        (5, 5),
        (2, 12),
        (0, 20),
        (7, 3),
        (30, 40),
    ] {
        let mut a = vec![0.0; w];
        a.extend(vec![2.0; l]);
        a.extend(vec![4.0; 3]);
        let mut b = vec![1.0; w + l];
        b.extend(vec![4.0; 3]);
        let (wi, lo, p) = sign_test(&a, &b);
        assert_eq!((wi, lo), (w, l));
        let want = binom_p(w, l);
        assert!(
            (p - want).abs() < 1e-12 * want.max(1e-300),
            "{w}/{l}: {p} vs {want}"
        );
    }
    assert!((sign_test(&[0.0; 10], &[1.0; 10]).2 - 2.0 / 1024.0).abs() < 1e-15);
}

#[test]
fn sign_test_identical_inputs() {
    let a = [1.0, 2.0, 3.0];
    assert_eq!(sign_test(&a, &a), (0, 0, 1.0));
    assert_eq!(sign_test(&[], &[]), (0, 0, 1.0));
}

#[test]
fn sign_test_large_counts_stay_finite() {
    let (_, _, p) = sign_test(&vec![0.0; 2000], &vec![1.0; 2000]);
    assert!((0.0..1e-300).contains(&p));
    let a: Vec<f64> = (0..2000).map(|i| (i % 2) as f64 * 2.0).collect();
    let (_, _, p) = sign_test(&a, &vec![1.0; 2000]);
    assert_eq!(p, 1.0);
}

#[test]
fn summaries() {
    let s = summarize(&[3.0, 1.0, 2.0, 4.0]).unwrap();
    assert_eq!((s.min, s.max, s.mean), (1.0, 4.0, 2.5));
    assert_eq!((s.q1, s.median, s.q3), (1.75, 2.5, 3.25));
    assert!(summarize(&[]).is_none());
    let one = summarize(&[5.0]).unwrap();
    assert_eq!(
        (one.min, one.q1, one.median, one.q3, one.max),
        (5.0, 5.0, 5.0, 5.0, 5.0)
    );
}

#[test]
fn scenario_defaults_and_parsing() {
    let d = Scenario::default();
    assert_eq!((d.replicates, d.p, d.n, d.k, d.seed), (30, 5, 10_000, 1, 0));
    assert_eq!(d.data, DataKind::Gaussian);
    assert_eq!(
        (d.edge_density, d.bidirected_fraction, d.alpha),
        (0.5, 0.3, 0.05)
    );
    assert_eq!(d.r_max, None);
    assert_eq!(d.ties, TieMode::Strict);
    assert_eq!(Scenario::parse("").unwrap(), d);

    let s = Scenario::parse("p=4\nn=500\ndata=mixed\nrmax=1\nties=overlap\nseed=9\n# c\n").unwrap();
    assert_eq!((s.p, s.n, s.r_max, s.seed), (4, 500, Some(1), 9));
    assert_eq!((s.data, s.ties), (DataKind::Mixed, TieMode::Overlap));
    assert_eq!(Scenario::parse(&s.to_text()).unwrap(), s);

    for bad in [
        "p=1",
        "p=x",
        "alpha=1",
        "k=0",
        "rmax=4",
        "density=2",
        "data=poisson",
        "ties=loose",
        "colour=red",
        "n=1",
    ] {
        assert!(Scenario::parse(bad).is_err(), "{bad}");
    }
    assert_eq!(parse_ties("equal-upper"), Some(TieMode::EqualUpper));
    assert_eq!(ties_name(TieMode::EqualUpper), "equal-upper");
}

#[test]
fn zero_replicates_give_a_header_only_csv() {
    let s = Scenario {
        replicates: 0,
        ..Default::default()
    };
    let r = run_benchmark(&s, &Sequential);
    assert!(r.is_empty());
    assert_eq!(
        results_csv(&r, false),
        "seed,n,algo,valid,recovered,shd,fdr,for,seconds\n"
    );
    assert!(!summary_text(&s, &r).is_empty());
}

#[test]
fn small_benchmark_rows() {
    let s = Scenario {
        replicates: 3,
        p: 4,
        n: 2000,
        seed: 77,
        ..Default::default()
    };
    let r = run_benchmark(&s, &Sequential);
    assert_eq!(r.len(), 3);
    let csv = results_csv(&r, false);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 9);
        assert!(f[2] == "fci" || f[2] == "dcfci");
        assert_eq!(f[8], "NA");
    }
    // replicate i uses the derived seed
    assert_eq!(
        simulate_replicate(&s, 1).seed,
        dcfci::sim::split_seed(77, 1)
    );
    assert_eq!(results_csv(&run_benchmark(&s, &Sequential), false), csv);
    assert!(results_csv(&r, true)
        .lines()
        .skip(1)
        .all(|l| !l.ends_with(",NA")));
}

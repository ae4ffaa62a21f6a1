//! Benchmark harness: simulate, run the FCI baseline and dcFCI on the same
//! data, score both against the truth.

use std::fmt::Write as _;
use std::time::Instant;

use dcfci_core::ancestral::is_valid_pag;
use dcfci_core::bayes::BffConfig;
use dcfci_core::citest::{AlphaOracle, Dataset};
use dcfci_core::exec::Executor;
use dcfci_core::fci::{fci, ConflictPolicy};
use dcfci_core::graph::MixedGraph;
use dcfci_core::metrics::{fdr, for_rate, shd};
use dcfci_core::search::{dcfci, DcfciConfig, TieMode};

use crate::cache::CachedDataSource;
use crate::io::{parse_key_values, InputError};
use crate::sim::{
    random_ground_truth, random_kinds, random_sem, sample_gaussian, sample_mixed, split_seed,
    GroundTruth,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Gaussian,
    Mixed,
}

/// One simulation scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub replicates: usize,
    pub p: usize,
    pub n: usize,
    pub data: DataKind,
    pub edge_density: f64,
    pub bidirected_fraction: f64,
    pub alpha: f64,
    pub k: usize,
    pub r_max: Option<usize>,
    pub ties: TieMode,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            replicates: 30,
            p: 5,
            n: 10_000,
            data: DataKind::Gaussian,
            edge_density: 0.5,
            bidirected_fraction: 0.3,
            alpha: 0.05,
            k: 1,
            r_max: None,
            ties: TieMode::Strict,
            seed: 0,
        }
    }
}

pub fn parse_ties(s: &str) -> Option<TieMode> {
    match s {
        "strict" => Some(TieMode::Strict),
        "equal-upper" => Some(TieMode::EqualUpper),
        "overlap" => Some(TieMode::Overlap),
        _ => None,
    }
}

pub fn ties_name(t: TieMode) -> &'static str {
    match t {
        TieMode::Strict => "strict",
        TieMode::EqualUpper => "equal-upper",
        TieMode::Overlap => "overlap",
    }
}

impl Scenario {
    /// Reads `key=value` lines; unset keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, InputError> {
        const CTX: &str = "scenario";
        let mut s = Scenario::default();
        for (key, (line, value)) in parse_key_values(CTX, text)? {
            let bad = || InputError::Syntax {
                context: CTX.into(),
                line,
                msg: format!("bad value '{value}' for {key}"),
            };
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
            let int = |v: &str| v.parse::<usize>().map_err(|_| bad());
            match key.as_str() {
                "replicates" => s.replicates = int(&value)?,
                "p" => s.p = int(&value)?,
                "n" => s.n = int(&value)?,
                "data" => {
                    s.data = match value.as_str() {
                        "gaussian" => DataKind::Gaussian,
                        "mixed" => DataKind::Mixed,
                        _ => return Err(bad()),
                    }
                }
                "density" => s.edge_density = num(&value)?,
                "bidirected" => s.bidirected_fraction = num(&value)?,
                "alpha" => s.alpha = num(&value)?,
                "k" => s.k = int(&value)?,
                "rmax" => s.r_max = Some(int(&value)?),
                "ties" => s.ties = parse_ties(&value).ok_or_else(bad)?,
                "seed" => s.seed = value.parse().map_err(|_| bad())?,
                _ => {
                    return Err(InputError::Syntax {
                        context: CTX.into(),
                        line,
                        msg: format!("unknown key {key}"),
                    })
                }
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let fail = |msg: &str| {
            Err(InputError::Invalid {
                context: "scenario".into(),
                msg: msg.into(),
            })
        };
        if self.p < 2 || self.p > 64 {
            return fail("p must lie in 2..=64");
        }
        if self.n < 2 {
            return fail("n must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.edge_density)
            || !(0.0..=1.0).contains(&self.bidirected_fraction)
        {
            return fail("density and bidirected must lie in [0, 1]");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must lie in (0, 1)");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if self.r_max.is_some_and(|r| r + 2 > self.p) {
            return fail("rmax exceeds p - 2");
        }
        Ok(())
    }

    pub fn dcfci_config(&self) -> DcfciConfig {
        DcfciConfig {
            alpha: self.alpha,
            k: self.k,
            r_max: self.r_max,
            ties: self.ties,
            ..Default::default()
        }
    }

    /// Canonical `key=value` echo.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "replicates={}", self.replicates);
        let _ = writeln!(out, "p={}", self.p);
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(
            out,
            "data={}",
            if self.data == DataKind::Gaussian {
                "gaussian"
            } else {
                "mixed"
            }
        );
        let _ = writeln!(out, "density={}", self.edge_density);
        let _ = writeln!(out, "bidirected={}", self.bidirected_fraction);
        let _ = writeln!(out, "alpha={}", self.alpha);
        let _ = writeln!(out, "k={}", self.k);
        if let Some(r) = self.r_max {
            let _ = writeln!(out, "rmax={r}");
        }
        let _ = writeln!(out, "ties={}", ties_name(self.ties));
        let _ = writeln!(out, "seed={}", self.seed);
        out
    }
}

/// Ground truth and data of one replicate.
pub struct Replicate {
    pub index: usize,
    pub seed: u64,
    pub truth: GroundTruth,
    pub data: Dataset,
}

pub fn simulate_replicate(s: &Scenario, index: usize) -> Replicate {
    let seed = split_seed(s.seed, index as u64);
    let truth = random_ground_truth(s.p, s.edge_density, s.bidirected_fraction, seed);
    let spec = random_sem(&truth, seed);
    let data = match s.data {
        DataKind::Gaussian => sample_gaussian(&truth, &spec, s.n, seed),
        DataKind::Mixed => sample_mixed(&truth, &spec, &random_kinds(s.p, seed), s.n, seed),
    };
    Replicate {
        index,
        seed,
        truth,
        data,
    }
}

/// One results row.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub seed: u64,
    pub n: usize,
    pub algo: &'static str,
    pub valid: bool,
    pub recovered: bool,
    /// `None` when the run failed.
    pub metrics: Option<(usize, f64, f64)>,
    pub seconds: f64,
}

/// What dcFCI's final ranking says about the truth under each tie reading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Recovery {
    /// The top candidate is the truth.
    pub sole: bool,
    /// The truth shares the top upper bound.
    pub equal_upper: bool,
    /// The truth's upper bound reaches the top candidate's lower bound.
    pub overlap: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateResult {
    pub fci: ResultRow,
    pub dcfci: ResultRow,
    pub recovery: Recovery,
}

fn row(
    seed: u64,
    n: usize,
    algo: &'static str,
    g: Option<&MixedGraph>,
    all_valid: bool,
    truth: &MixedGraph,
    secs: f64,
) -> ResultRow {
    match g {
        Some(g) => ResultRow {
            seed,
            n,
            algo,
            valid: all_valid,
            recovered: g == truth,
            metrics: Some((
                shd(g, truth).expect("same vertex set"),
                fdr(g, truth).expect("same vertex set"),
                for_rate(g, truth).expect("same vertex set"),
            )),
            seconds: secs,
        },
        None => ResultRow {
            seed,
            n,
            algo,
            valid: false,
            recovered: false,
            metrics: None,
            seconds: secs,
        },
    }
}

/// Runs both algorithms on one replicate. Failures become rows without
/// metrics.
pub fn run_replicate<E: Executor>(s: &Scenario, rep: &Replicate, exec: &E) -> ReplicateResult {
    let source = CachedDataSource::new(&rep.data, BffConfig::default());
    let truth = &rep.truth.pag;
    let p = s.p;
    let r_max = s.r_max.unwrap_or(p - 2);

    let start = Instant::now();
    let oracle = AlphaOracle {
        source: &source,
        alpha: s.alpha,
    };
    let base = fci(&oracle, p, r_max, ConflictPolicy::KeepExisting);
    let fci_secs = start.elapsed().as_secs_f64();
    if let Err(e) = &base {
        log::warn!("replicate {}: FCI failed: {e}", rep.index);
    }
    let base = base.ok();
    let fci_row = row(
        rep.seed,
        s.n,
        "fci",
        base.as_ref(),
        base.as_ref().is_some_and(is_valid_pag),
        truth,
        fci_secs,
    );

    let start = Instant::now();
    let out = dcfci(p, &source, &s.dcfci_config(), exec);
    let dc_secs = start.elapsed().as_secs_f64();
    let (dc_row, recovery) = match out {
        Ok(out) => {
            let top = &out.candidates[0].graph;
            let valid = out.candidates.iter().all(|c| is_valid_pag(&c.graph));
            let ranked = &out.history.last().expect("at least one level").ranked;
            let best = ranked[0].score;
            let rec = Recovery {
                sole: top == truth,
                equal_upper: ranked
                    .iter()
                    .any(|c| c.score.upper == best.upper && &c.graph == truth),
                overlap: ranked
                    .iter()
                    .any(|c| c.score.upper >= best.lower && &c.graph == truth),
            };
            (
                row(rep.seed, s.n, "dcfci", Some(top), valid, truth, dc_secs),
                rec,
            )
        }
        Err(e) => {
            log::warn!("replicate {}: dcFCI failed: {e}", rep.index);
            (
                row(rep.seed, s.n, "dcfci", None, false, truth, dc_secs),
                Recovery::default(),
            )
        }
    };
    ReplicateResult {
        fci: fci_row,
        dcfci: dc_row,
        recovery,
    }
}

/// All replicates, in replicate order.
pub fn run_benchmark<E: Executor>(s: &Scenario, exec: &E) -> Vec<ReplicateResult> {
    let idx: Vec<usize> = (0..s.replicates).collect();
    exec.map(&idx, |&i| run_replicate(s, &simulate_replicate(s, i), exec))
}

/// Results CSV. Wall times are written only when `timing` is set, so that
/// default output is reproducible byte for byte.
pub fn results_csv(results: &[ReplicateResult], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "seed",
        "n",
        "algo",
        "valid",
        "recovered",
        "shd",
        "fdr",
        "for",
        "seconds",
    ])
    .expect("writing to memory");
    for r in results {
        for row in [&r.fci, &r.dcfci] {
            let (shd, fdr, fo) = match row.metrics {
                Some((s, f, o)) => (s.to_string(), format!("{f:.6}"), format!("{o:.6}")),
                None => ("NA".into(), "NA".into(), "NA".into()),
            };
            let secs = if timing {
                format!("{:.6}", row.seconds)
            } else {
                "NA".into()
            };
            w.write_record([
                row.seed.to_string(),
                row.n.to_string(),
                row.algo.to_string(),
                row.valid.to_string(),
                row.recovered.to_string(),
                shd,
                fdr,
                fo,
                secs,
            ])
            .expect("writing to memory");
        }
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// Min, first quartile, median, mean, third quartile, max.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Summary {
        min: v[0],
        q1: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        q3: quantile(&v, 0.75),
        max: v[v.len() - 1],
    })
}

/// Exact two-sided sign test on paired differences; zero differences are
/// dropped. Returns `(wins, losses, p)` where a win is `a < b`.
pub fn sign_test(a: &[f64], b: &[f64]) -> (usize, usize, f64) {
    let wins = a.iter().zip(b).filter(|(x, y)| x < y).count();
    let losses = a.iter().zip(b).filter(|(x, y)| x > y).count();
    let n = wins + losses;
    if n == 0 {
        return (wins, losses, 1.0);
    }
    let k = wins.min(losses);
    // P(X <= k) for X ~ Bin(n, 1/2), summed in log space
    let ln_half_n = -(n as f64) * std::f64::consts::LN_2;
    let mut ln_c = 0.0f64;
    let mut tail = 0.0;
    for i in 0..=k {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        tail += (ln_c + ln_half_n).exp();
    }
    (wins, losses, (2.0 * tail).min(1.0))
}

fn metric_column(rows: &[&ResultRow], pick: impl Fn(&(usize, f64, f64)) -> f64) -> Vec<f64> {
    rows.iter()
        .filter_map(|r| r.metrics.as_ref().map(&pick))
        .collect()
}

fn pct(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * k as f64 / n as f64
    }
}

/// Aggregate report: per-algorithm rates and metric summaries, dcFCI
/// recovery under each tie reading, and a sign test on paired SHD.
pub fn summary_text(s: &Scenario, results: &[ReplicateResult]) -> String {
    let mut out = String::new();
    let n = results.len();
    let _ = writeln!(out, "replicates {n}");
    for algo in ["fci", "dcfci"] {
        let rows: Vec<&ResultRow> = results
            .iter()
            .map(|r| if algo == "fci" { &r.fci } else { &r.dcfci })
            .collect();
        let failed = rows.iter().filter(|r| r.metrics.is_none()).count();
        let valid = rows.iter().filter(|r| r.valid).count();
        let rec = rows.iter().filter(|r| r.recovered).count();
        let _ = writeln!(
            out,
            "{algo}: failed {failed} valid {:.1}% recovered {:.1}%",
            pct(valid, n),
            pct(rec, n)
        );
        for (name, col) in [
            ("shd", metric_column(&rows, |m| m.0 as f64)),
            ("fdr", metric_column(&rows, |m| m.1)),
            ("for", metric_column(&rows, |m| m.2)),
        ] {
            if let Some(q) = summarize(&col) {
                let _ = writeln!(
                    out,
                    "  {name} min {:.3} q1 {:.3} median {:.3} mean {:.3} q3 {:.3} max {:.3}",
                    q.min, q.q1, q.median, q.mean, q.q3, q.max
                );
            }
        }
    }
    let count = |f: fn(&Recovery) -> bool| results.iter().filter(|r| f(&r.recovery)).count();
    let _ = writeln!(
        out,
        "dcfci recovery: sole {:.1}% equal-upper {:.1}% overlap {:.1}%",
        pct(count(|r| r.sole), n),
        pct(count(|r| r.equal_upper), n),
        pct(count(|r| r.overlap), n)
    );
    let paired: Vec<(f64, f64)> = results
        .iter()
        .filter_map(|r| Some((r.dcfci.metrics?.0 as f64, r.fci.metrics?.0 as f64)))
        .collect();
    let (a, b): (Vec<f64>, Vec<f64>) = paired.into_iter().unzip();
    let (w, l, p) = sign_test(&a, &b);
    let _ = writeln!(
        out,
        "sign test on shd (dcfci lower = win): wins {w} losses {l} p {p:.4}"
    );
    let _ = write!(
        out,
        "{}",
        s.to_text()
            .lines()
            .map(|l| format!("# {l}\n"))
            .collect::<String>()
    );
    out
}

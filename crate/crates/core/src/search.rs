//! The dcFCI search: a top-k beam over candidate r-PAGs, grown one
//! separator size at a time and ranked by comparable scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::ancestral::is_valid_pag;
use crate::citest::CiSource;
use crate::exec::Executor;
use crate::fci::{orient, possible_d_sep, ConflictPolicy, Sepsets};
use crate::graph::{Mark, MixedGraph};
use crate::msep::{m_separated, m_separated_mag};
use crate::scoring::{comparable_scores, rank_cmp, relevant_hypotheses, ScoreBounds, ScoreError};
use crate::vars::{CiKey, VarSet};

/// Which candidates survive beyond the top `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieMode {
    /// Exactly the top `k`.
    Strict,
    /// Also anything sharing the `k`-th upper bound.
    EqualUpper,
    /// Also anything whose upper bound reaches the lowest lower bound among
    /// the top `k`.
    Overlap,
}

/// Where candidate separators for an adjacent pair are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plausible {
    /// Possible-d-sep of either endpoint in the current candidate.
    PossibleDSep,
    /// Adjacencies of either endpoint.
    Adjacent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcfciConfig {
    pub alpha: f64,
    pub k: usize,
    /// Largest separator size; `None` means `p - 2`.
    pub r_max: Option<usize>,
    /// Discovered separators per candidate and level above which confident
    /// ones are applied outright.
    pub n_r_cap: usize,
    pub certainty_threshold: f64,
    pub ties: TieMode,
    pub plausible: Plausible,
    /// Hard ceiling on the retained list, whatever the tie mode.
    pub max_retained: usize,
}

impl Default for DcfciConfig {
    fn default() -> Self {
        DcfciConfig {
            alpha: 0.05,
            k: 1,
            r_max: None,
            n_r_cap: 12,
            certainty_threshold: 0.95,
            ties: TieMode::Strict,
            plausible: Plausible::PossibleDSep,
            max_retained: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("scoring failed: {0}")]
    Score(#[from] ScoreError),
}

/// An r-PAG with the separators it was built from and its score.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePag {
    pub graph: MixedGraph,
    pub sepsets: Sepsets,
    pub score: ScoreBounds,
    /// Size of the hypothesis set the score was taken over.
    pub n_diff: usize,
    pub r: usize,
}

/// What happened at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub r: usize,
    /// Raw expansions before validity filtering.
    pub generated: usize,
    /// Expansions dropped as invalid.
    pub invalid: usize,
    /// Every distinct candidate with its score, in ranking order.
    pub ranked: Vec<CandidatePag>,
    /// Length of the prefix of `ranked` that was retained.
    pub retained: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DcfciOutput {
    pub candidates: Vec<CandidatePag>,
    pub history: Vec<IterationRecord>,
}

/// Separators of size `r` worth trying for each adjacent pair: the p-value
/// exceeds `alpha` or independence is more probable than not. The p-value
/// gate is checked first. Failed queries are skipped.
pub fn potential_min_seps<S: CiSource + ?Sized>(
    c: &CandidatePag,
    source: &S,
    r: usize,
    cfg: &DcfciConfig,
) -> BTreeMap<(usize, usize), Vec<VarSet>> {
    let g = &c.graph;
    let p = g.n_vertices();
    let region: Vec<VarSet> = (0..p)
        .map(|v| match cfg.plausible {
            Plausible::PossibleDSep => possible_d_sep(g, v),
            Plausible::Adjacent => g.neighbors(v),
        })
        .collect();
    let mut out = BTreeMap::new();
    for (x, y) in g.skeleton_pairs() {
        let cand = region[x].union(region[y]).without(x).without(y);
        let mut found = Vec::new();
        for z in cand.subsets_of_size(r) {
            let key = CiKey { x, y, z };
            match source.outcome(&key) {
                Ok(o) if o.p_value > cfg.alpha || o.p_indep > 0.5 => found.push(z),
                Ok(_) => {}
                Err(e) => log::warn!("skipping {key:?}: {e}"),
            }
        }
        if !found.is_empty() {
            out.insert((x, y), found);
        }
    }
    out
}

/// Result of expanding one candidate.
#[derive(Clone, Debug, Default)]
pub struct Expansion {
    pub candidates: Vec<(MixedGraph, Sepsets)>,
    pub generated: usize,
    pub invalid: usize,
}

/// Every way of applying at most one discovered separator per pair: cut the
/// chosen edges, orient from scratch with the accumulated separators, and
/// keep the result only if it is a valid PAG in which every recorded
/// separator is a minimal m-separator of its pair.
pub fn expand_candidates<S: CiSource + ?Sized>(
    c: &CandidatePag,
    potmins: &BTreeMap<(usize, usize), Vec<VarSet>>,
    source: &S,
    cfg: &DcfciConfig,
) -> Expansion {
    let mut entries: Vec<((usize, usize), VarSet, f64)> = Vec::new();
    for (&(x, y), sets) in potmins {
        for &z in sets {
            let pi = source
                .outcome(&CiKey { x, y, z })
                .map_or(0.0, |o| o.p_indep);
            entries.push(((x, y), z, pi));
        }
    }

    let mut forced: BTreeMap<(usize, usize), VarSet> = BTreeMap::new();
    if entries.len() > cfg.n_r_cap {
        for &(pair, z, pi) in &entries {
            if pi >= cfg.certainty_threshold {
                forced.entry(pair).or_insert(z);
            }
        }
        entries.retain(|(pair, _, _)| !forced.contains_key(pair));
        if entries.len() > cfg.n_r_cap {
            let mut by_prob: Vec<usize> = (0..entries.len()).collect();
            by_prob.sort_by(|&a, &b| entries[b].2.total_cmp(&entries[a].2).then(a.cmp(&b)));
            let keep: BTreeSet<usize> = by_prob.into_iter().take(cfg.n_r_cap).collect();
            let mut i = 0;
            entries.retain(|_| {
                i += 1;
                keep.contains(&(i - 1))
            });
        }
    }

    let mut groups: Vec<((usize, usize), Vec<VarSet>)> = Vec::new();
    for (pair, z, _) in entries {
        match groups.last_mut() {
            Some((p, v)) if *p == pair => v.push(z),
            _ => groups.push((pair, alloc::vec![z])),
        }
    }

    let mut out = Expansion::default();
    // mixed-radix counter, digit 0 means "leave the pair alone"
    let mut digits = alloc::vec![0usize; groups.len()];
    loop {
        let mut choice: Vec<((usize, usize), VarSet)> =
            forced.iter().map(|(&k, &v)| (k, v)).collect();
        for (d, (pair, sets)) in digits.iter().zip(&groups) {
            if *d > 0 {
                choice.push((*pair, sets[*d - 1]));
            }
        }
        out.generated += 1;
        if choice.is_empty() {
            out.candidates.push((c.graph.clone(), c.sepsets.clone()));
        } else {
            match build(c, &choice) {
                Some(cand) => out.candidates.push(cand),
                None => out.invalid += 1,
            }
        }

        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            if digits[i] <= groups[i].1.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn build(c: &CandidatePag, choice: &[((usize, usize), VarSet)]) -> Option<(MixedGraph, Sepsets)> {
    let mut skel = c.graph.circle_skeleton();
    let mut seps = c.sepsets.clone();
    for &((x, y), z) in choice {
        skel.remove_edge(x, y);
        seps.insert(x, y, z);
    }
    let g = orient(&skel, &seps, ConflictPolicy::Error).ok()?;
    if !is_valid_pag(&g) {
        return None;
    }
    let exact = seps.iter().all(|((x, y), z)| {
        let sep = |s: VarSet| m_separated(&g, &CiKey { x, y, z: s }).unwrap_or(false);
        sep(z) && (0..z.len()).all(|k| z.subsets_of_size(k).all(|s| !sep(s)))
    });
    exact.then_some((g, seps))
}

/// Runs the search over `p` variables.
pub fn dcfci<S, E>(
    p: usize,
    source: &S,
    cfg: &DcfciConfig,
    exec: &E,
) -> Result<DcfciOutput, SearchError>
where
    S: CiSource + ?Sized,
    E: Executor,
{
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(SearchError::Config("alpha must lie in (0, 1)"));
    }
    if cfg.k == 0 {
        return Err(SearchError::Config("k must be at least 1"));
    }
    if p < 2 {
        return Err(SearchError::Config("need at least two variables"));
    }
    let top = p - 2;
    let r_max = cfg.r_max.unwrap_or(top);
    if r_max > top {
        return Err(SearchError::Config("r_max exceeds p - 2"));
    }

    let mut retained = alloc::vec![CandidatePag {
        graph: MixedGraph::complete(p, Mark::Circle),
        sepsets: Sepsets::new(),
        score: ScoreBounds {
            lower: 1.0,
            upper: 1.0
        },
        n_diff: 0,
        r: 0,
    }];
    let mut history = Vec::new();

    for r in 0..=r_max {
        let expansions = exec.map(&retained, |c| {
            let pm = potential_min_seps(c, source, r, cfg);
            expand_candidates(c, &pm, source, cfg)
        });
        let mut generated = 0;
        let mut invalid = 0;
        let mut seen = BTreeSet::new();
        let mut pool: Vec<(MixedGraph, Sepsets)> = Vec::new();
        for e in expansions {
            generated += e.generated;
            invalid += e.invalid;
            for (g, s) in e.candidates {
                if seen.insert(g.clone()) {
                    pool.push((g, s));
                }
            }
        }

        let graphs: Vec<MixedGraph> = pool.iter().map(|(g, _)| g.clone()).collect();
        let scores = comparable_scores(&graphs, r, source, exec)?;
        let mut ranked: Vec<CandidatePag> = pool
            .into_iter()
            .zip(scores)
            .map(|((graph, sepsets), s)| CandidatePag {
                graph,
                sepsets,
                score: s.bounds,
                n_diff: s.n_diff,
                r,
            })
            .collect();
        ranked.sort_by(|a, b| rank_cmp((&a.score, &a.graph), (&b.score, &b.graph)));

        let keep = retained_len(&ranked, cfg);
        retained = ranked[..keep].to_vec();
        history.push(IterationRecord {
            r,
            generated,
            invalid,
            ranked,
            retained: keep,
        });
    }
    Ok(DcfciOutput {
        candidates: retained,
        history,
    })
}

fn retained_len(ranked: &[CandidatePag], cfg: &DcfciConfig) -> usize {
    let k = cfg.k.min(ranked.len());
    if k == 0 {
        return 0;
    }
    let extra = match cfg.ties {
        TieMode::Strict => 0,
        TieMode::EqualUpper => {
            let u = ranked[k - 1].score.upper;
            ranked[k..]
                .iter()
                .take_while(|c| c.score.upper == u)
                .count()
        }
        TieMode::Overlap => {
            let floor = ranked[..k]
                .iter()
                .map(|c| c.score.lower)
                .fold(f64::INFINITY, f64::min);
            ranked[k..]
                .iter()
                .take_while(|c| c.score.upper >= floor)
                .count()
        }
    };
    (k + extra)
        .min(cfg.max_retained.max(cfg.k))
        .min(ranked.len())
}

/// The r-PAG an oracle would reach: pairs of the true MAG with a minimal
/// separator of size at most `r` are cut (recording the first one) and the
/// rest oriented. `None` if the result cannot be oriented.
pub fn true_r_pag(mag: &MixedGraph, r: usize) -> Option<(MixedGraph, Sepsets)> {
    let p = mag.n_vertices();
    let mut skel = MixedGraph::complete(p, Mark::Circle);
    let mut seps = Sepsets::new();
    for x in 0..p {
        for y in x + 1..p {
            if mag.adjacent(x, y) {
                continue;
            }
            let rest = mag.vertices().without(x).without(y);
            let first = rest
                .subsets_up_to(r)
                .find(|&z| m_separated_mag(mag, &CiKey { x, y, z }).unwrap_or(false));
            if let Some(z) = first {
                skel.remove_edge(x, y);
                seps.insert(x, y, z);
            }
        }
    }
    let g = orient(&skel, &seps, ConflictPolicy::Error).ok()?;
    Some((g, seps))
}

/// Whether every skeleton and collider hypothesis of every true r-PAG up to
/// `r_max` has posterior at least 1/2 under `source`.
pub fn weak_faithfulness_holds<S: CiSource + ?Sized>(
    mag: &MixedGraph,
    source: &S,
    r_max: usize,
) -> bool {
    (0..=r_max).all(|r| {
        let Some((g, _)) = true_r_pag(mag, r) else {
            return false;
        };
        let Ok(hs) = relevant_hypotheses(&g, r) else {
            return false;
        };
        let ok = hs.iter().all(|h| {
            source
                .outcome(&h.key)
                .is_ok_and(|o| h.probability(o.p_indep) >= 0.5)
        });
        ok
    })
}

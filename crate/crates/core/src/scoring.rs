//! Hypothesis sets and the data-PAG compatibility scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bayes::{HypKind, Hypothesis};
use crate::citest::{CiError, CiSource};
use crate::exec::Executor;
use crate::graph::{GraphError, MixedGraph};
use crate::mec::{corresponds, triples_with_order, MinSeps, TripleKind};
use crate::msep::m_separated_pag;
use crate::vars::{binomial, CiKey, VarSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("hypothesis {0:?} asserted both ways")]
    Conflict(CiKey),
    #[error("CI query {key:?} failed: {source}")]
    Ci { key: CiKey, source: CiError },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no candidates to score")]
    Empty,
}

/// Deduplicated hypotheses, at most one kind per key, iterated in key order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HypothesisSet(BTreeMap<CiKey, HypKind>);

impl HypothesisSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: Hypothesis) -> Result<(), ScoreError> {
        match self.0.insert(h.key, h.kind) {
            Some(prev) if prev != h.kind => Err(ScoreError::Conflict(h.key)),
            _ => Ok(()),
        }
    }

    pub fn extend(&mut self, other: &HypothesisSet) -> Result<(), ScoreError> {
        other.iter().try_for_each(|h| self.insert(h))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &CiKey) -> Option<HypKind> {
        self.0.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Hypothesis> + '_ {
        self.0.iter().map(|(&key, &kind)| Hypothesis { key, kind })
    }

    pub fn keys(&self) -> impl Iterator<Item = &CiKey> + '_ {
        self.0.keys()
    }
}

/// Fréchet bounds on the probability of a conjunction of events.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `max(0, Σp - (T - 1))` and `min p`; the empty conjunction is certain.
pub fn frechet_bounds(probs: &[f64]) -> ScoreBounds {
    if probs.is_empty() {
        return ScoreBounds {
            lower: 1.0,
            upper: 1.0,
        };
    }
    let t = probs.len() as f64;
    let sum: f64 = probs.iter().sum();
    let upper = probs.iter().copied().fold(1.0, f64::min).clamp(0.0, 1.0);
    let lower = (sum - (t - 1.0)).clamp(0.0, upper);
    ScoreBounds { lower, upper }
}

/// Number of pairwise CI statements with conditioning sets of size at most
/// `r_max` over `p` variables.
pub fn pairwise_count(p: u64, r_max: u64) -> u128 {
    if p < 2 {
        return 0;
    }
    let rest = p - 2;
    binomial(p, 2)
        * (0..=r_max.min(rest))
            .map(|r| binomial(rest, r))
            .sum::<u128>()
}

fn kind_in(g: &MixedGraph, key: &CiKey) -> Result<HypKind, GraphError> {
    Ok(if m_separated_pag(g, key)? {
        HypKind::Independence
    } else {
        HypKind::Dependence
    })
}

/// Every pairwise statement with `|Z| <= r_max`, each with the kind the
/// graph implies.
pub fn all_pairwise_hypotheses(g: &MixedGraph, r_max: usize) -> Result<HypothesisSet, ScoreError> {
    let p = g.n_vertices();
    let mut set = HypothesisSet::new();
    for x in 0..p {
        for y in x + 1..p {
            let rest = g.vertices().without(x).without(y);
            for z in rest.subsets_up_to(r_max) {
                let key = CiKey { x, y, z };
                set.insert(Hypothesis {
                    key,
                    kind: kind_in(g, &key)?,
                })?;
            }
        }
    }
    Ok(set)
}

fn probability<S: CiSource + ?Sized>(source: &S, h: &Hypothesis) -> Result<f64, ScoreError> {
    let out = source.outcome(&h.key).map_err(|e| ScoreError::Ci {
        key: h.key,
        source: e,
    })?;
    Ok(h.probability(out.p_indep))
}

/// Bounds on the joint posterior of every pairwise statement the graph
/// implies with `|Z| <= r_max`.
pub fn straightforward_score<S: CiSource + ?Sized>(
    g: &MixedGraph,
    source: &S,
    r_max: usize,
) -> Result<ScoreBounds, ScoreError> {
    let hs = all_pairwise_hypotheses(g, r_max)?;
    let probs = hs
        .iter()
        .map(|h| probability(source, &h))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(frechet_bounds(&probs))
}

/// Skeleton hypotheses at level `r`: dependence of every adjacent pair given
/// every set of size at most `r`; independence at each minimal separator;
/// dependence once any single member of a nonempty minimal separator is
/// dropped.
pub fn skeleton_hypotheses(
    g: &MixedGraph,
    minseps: &MinSeps,
    r: usize,
) -> Result<HypothesisSet, ScoreError> {
    let mut set = HypothesisSet::new();
    for (x, y) in g.skeleton_pairs() {
        let rest = g.vertices().without(x).without(y);
        for z in rest.subsets_up_to(r) {
            set.insert(Hypothesis {
                key: CiKey { x, y, z },
                kind: HypKind::Dependence,
            })?;
        }
    }
    for ((x, y), seps) in minseps.iter() {
        if g.adjacent(x, y) {
            return Err(GraphError::Adjacent(x, y).into());
        }
        for &s in seps {
            set.insert(Hypothesis {
                key: CiKey { x, y, z: s },
                kind: HypKind::Independence,
            })?;
            for v in s {
                set.insert(Hypothesis {
                    key: CiKey {
                        x,
                        y,
                        z: s.without(v),
                    },
                    kind: HypKind::Dependence,
                })?;
            }
        }
    }
    Ok(set)
}

/// Collider hypotheses: for each collider with order `<a, b, c>`
/// corresponding to `(x, y)`, dependence of `x` and `y` given each minimal
/// separator of the pair plus `b`.
pub fn collider_hypotheses(g: &MixedGraph, minseps: &MinSeps) -> Result<HypothesisSet, ScoreError> {
    let mut set = HypothesisSet::new();
    for t in triples_with_order(g) {
        if t.kind != TripleKind::Collider {
            continue;
        }
        for (x, y) in corresponds(g, &t.triple)? {
            for &s in minseps.get(x, y) {
                let key = CiKey::new(x, y, s.with(t.triple.b))
                    .ok_or(GraphError::BadQuery("collider inside pair"))?;
                set.insert(Hypothesis {
                    key,
                    kind: HypKind::Dependence,
                })?;
            }
        }
    }
    Ok(set)
}

/// Union of the skeleton and collider hypotheses at level `r`.
pub fn relevant_hypotheses(g: &MixedGraph, r: usize) -> Result<HypothesisSet, ScoreError> {
    let minseps = MinSeps::compute(g, r)?;
    let mut set = skeleton_hypotheses(g, &minseps, r)?;
    set.extend(&collider_hypotheses(g, &minseps)?)?;
    Ok(set)
}

/// A candidate's comparable score and the size of the hypothesis set that
/// set it apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparableScore {
    pub bounds: ScoreBounds,
    pub n_diff: usize,
}

/// Scores candidates against each other: every relation relevant to any
/// candidate is judged under every candidate, relations on which all
/// candidates agree are dropped, and each candidate is scored on the rest.
pub fn comparable_scores<S, E>(
    candidates: &[MixedGraph],
    r: usize,
    source: &S,
    exec: &E,
) -> Result<Vec<ComparableScore>, ScoreError>
where
    S: CiSource + ?Sized,
    E: Executor,
{
    if candidates.is_empty() {
        return Err(ScoreError::Empty);
    }
    let sets = exec.map(candidates, |g| relevant_hypotheses(g, r));
    let mut keys = BTreeSet::new();
    for s in sets {
        keys.extend(s?.keys().copied());
    }
    let keys: Vec<CiKey> = keys.into_iter().collect();

    let kinds = exec.map(candidates, |g| {
        keys.iter()
            .map(|k| kind_in(g, k))
            .collect::<Result<Vec<_>, _>>()
    });
    let kinds = kinds.into_iter().collect::<Result<Vec<_>, _>>()?;

    let diff: Vec<usize> = (0..keys.len())
        .filter(|&j| kinds.iter().any(|ks| ks[j] != kinds[0][j]))
        .collect();
    let diff_keys: Vec<CiKey> = diff.iter().map(|&j| keys[j]).collect();
    let p_indep = exec.map(&diff_keys, |k| {
        source
            .outcome(k)
            .map(|o| o.p_indep)
            .map_err(|e| ScoreError::Ci { key: *k, source: e })
    });
    let p_indep = p_indep.into_iter().collect::<Result<Vec<_>, _>>()?;

    Ok(kinds
        .iter()
        .map(|ks| {
            let probs: Vec<f64> = diff
                .iter()
                .zip(&p_indep)
                .map(|(&j, &pi)| {
                    Hypothesis {
                        key: keys[j],
                        kind: ks[j],
                    }
                    .probability(pi)
                })
                .collect();
            ComparableScore {
                bounds: frechet_bounds(&probs),
                n_diff: probs.len(),
            }
        })
        .collect())
}

/// Ranking order: upper bound descending, then lower bound descending, then
/// the canonical graph order.
pub fn rank_cmp(a: (&ScoreBounds, &MixedGraph), b: (&ScoreBounds, &MixedGraph)) -> Ordering {
    b.0.upper
        .total_cmp(&a.0.upper)
        .then_with(|| b.0.lower.total_cmp(&a.0.lower))
        .then_with(|| a.1.cmp(b.1))
}

/// Indices of `scored` in ranking order.
pub fn rank_candidates(scored: &[(ScoreBounds, MixedGraph)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scored.len()).collect();
    idx.sort_by(|&i, &j| rank_cmp((&scored[i].0, &scored[i].1), (&scored[j].0, &scored[j].1)));
    idx
}

/// Shorthand for a canonical key; panics on a malformed one.
pub fn key(x: usize, y: usize, z: &[usize]) -> CiKey {
    CiKey::new(x, y, VarSet::from_slice(z)).expect("well-formed key")
}

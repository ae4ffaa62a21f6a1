//! Markov-equivalence machinery: minimal separators, triples with order and
//! the pairs a triple corresponds to.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::fci::{discriminating_endpoints, ordered};
use crate::graph::{GraphError, MixedGraph};
use crate::msep::{m_separated, pag_status_is};
use crate::vars::{CiKey, VarSet};

/// `<a, b, c>` with middle vertex `b`, stored with `a < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triple {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        let (a, c) = ordered(a, c);
        Triple { a, b, c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TripleKind {
    Collider,
    NonCollider,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleWithOrder {
    pub triple: Triple,
    pub order: usize,
    pub kind: TripleKind,
}

/// All minimal separators of the non-adjacent pair `(x, y)` with at most
/// `max_size` members, in canonical order. Candidates are visited by size, so
/// a separating set is minimal exactly when it contains no earlier find.
pub fn minimal_separators(
    g: &MixedGraph,
    x: usize,
    y: usize,
    max_size: usize,
) -> Result<Vec<VarSet>, GraphError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if x == y {
        return Err(GraphError::BadQuery("endpoints must differ"));
    }
    if g.adjacent(x, y) {
        return Err(GraphError::Adjacent(x, y));
    }
    let (x, y) = ordered(x, y);
    let rest = g.vertices().without(x).without(y);
    let mut found: Vec<VarSet> = Vec::new();
    for z in rest.subsets_up_to(max_size) {
        if found.iter().any(|f| f.is_subset(z)) {
            continue;
        }
        if m_separated(g, &CiKey { x, y, z })? {
            found.push(z);
        }
    }
    Ok(found)
}

/// Minimal separators for every non-adjacent pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinSeps(BTreeMap<(usize, usize), Vec<VarSet>>);

impl MinSeps {
    pub fn compute(g: &MixedGraph, max_size: usize) -> Result<Self, GraphError> {
        let p = g.n_vertices();
        let mut m = BTreeMap::new();
        for x in 0..p {
            for y in x + 1..p {
                if !g.adjacent(x, y) {
                    m.insert((x, y), minimal_separators(g, x, y, max_size)?);
                }
            }
        }
        Ok(MinSeps(m))
    }

    pub fn get(&self, a: usize, b: usize) -> &[VarSet] {
        self.0.get(&ordered(a, b)).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[VarSet])> + '_ {
        self.0.iter().map(|(&k, v)| (k, v.as_slice()))
    }
}

fn kind_of(g: &MixedGraph, a: usize, b: usize, c: usize) -> Option<TripleKind> {
    pag_status_is(g, a, b, c).map(|col| {
        if col {
            TripleKind::Collider
        } else {
            TripleKind::NonCollider
        }
    })
}

/// Colliders and non-colliders with order. Order 0 holds the unshielded
/// triples; a shielded `<a, b, c>` gets order `i` when some `q` has
/// `<q, a, b>` a collider and `<q, a, c>` a non-collider, both of order below
/// `i`. Only triples of definite status are classified.
pub fn triples_with_order(g: &MixedGraph) -> Vec<TripleWithOrder> {
    let p = g.n_vertices();
    let mut assigned: BTreeMap<Triple, (usize, TripleKind)> = BTreeMap::new();
    let mut shielded: Vec<(Triple, TripleKind)> = Vec::new();
    for b in 0..p {
        let nb = g.neighbors(b);
        for a in nb {
            for c in nb {
                if c <= a {
                    continue;
                }
                let Some(kind) = kind_of(g, a, b, c) else {
                    continue;
                };
                let t = Triple { a, b, c };
                if g.adjacent(a, c) {
                    shielded.push((t, kind));
                } else {
                    assigned.insert(t, (0, kind));
                }
            }
        }
    }

    let mut order = 0;
    loop {
        order += 1;
        let has = |t: Triple, k: TripleKind, assigned: &BTreeMap<Triple, (usize, TripleKind)>| {
            assigned
                .get(&t)
                .is_some_and(|&(o, kk)| o < order && kk == k)
        };
        let mut fresh = Vec::new();
        for &(t, kind) in &shielded {
            if assigned.contains_key(&t) {
                continue;
            }
            let licensed = [(t.a, t.c), (t.c, t.a)].iter().any(|&(a, c)| {
                g.neighbors(a).iter().any(|q| {
                    q != t.b
                        && q != c
                        && has(Triple::new(q, a, t.b), TripleKind::Collider, &assigned)
                        && has(Triple::new(q, a, c), TripleKind::NonCollider, &assigned)
                })
            });
            if licensed {
                fresh.push((t, kind));
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (t, kind) in fresh {
            assigned.insert(t, (order, kind));
        }
    }
    assigned
        .into_iter()
        .map(|(triple, (order, kind))| TripleWithOrder {
            triple,
            order,
            kind,
        })
        .collect()
}

/// Non-adjacent pairs a triple corresponds to: its endpoints when
/// unshielded, else the endpoints of every discriminating path ending in the
/// triple (in either direction).
pub fn corresponds(g: &MixedGraph, t: &Triple) -> Result<Vec<(usize, usize)>, GraphError> {
    for v in [t.a, t.b, t.c] {
        g.check_vertex(v)?;
    }
    if t.a == t.c || !g.adjacent(t.a, t.b) || !g.adjacent(t.b, t.c) {
        return Err(GraphError::BadQuery("not a triple of the graph"));
    }
    if !g.adjacent(t.a, t.c) {
        return Ok(alloc::vec![ordered(t.a, t.c)]);
    }
    let mut out: Vec<(usize, usize)> = [(t.a, t.c), (t.c, t.a)]
        .iter()
        .flat_map(|&(a, c)| {
            discriminating_endpoints(g, a, t.b, c)
                .into_iter()
                .map(move |(_, d)| ordered(d, c))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Skeleton plus colliders with order; equal signatures mean Markov
/// equivalent graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MecSignature {
    pub skeleton: BTreeSet<(usize, usize)>,
    pub colliders: BTreeSet<TripleWithOrder>,
}

pub fn mec_signature(g: &MixedGraph) -> MecSignature {
    MecSignature {
        skeleton: g.skeleton_pairs().collect(),
        colliders: triples_with_order(g)
            .into_iter()
            .filter(|t| t.kind == TripleKind::Collider)
            .collect(),
    }
}

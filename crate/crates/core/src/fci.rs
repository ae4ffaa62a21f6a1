//! FCI: adjacency search with a possible-d-sep stage, and orientation with
//! the arrowhead and tail rules R0-R4, R8-R10. R5-R7 only fire under
//! selection bias and are not implemented.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::citest::CiError;
use crate::graph::{GraphError, Mark, MixedGraph};
use crate::msep::m_separated_mag;
use crate::vars::{CiKey, VarSet};

/// Answers "is `x` independent of `y` given `z`?".
pub trait IndependenceOracle {
    fn independent(&self, key: &CiKey) -> Result<bool, CiError>;
}

/// Perfect oracle reading m-separation off a MAG.
pub struct MagOracle<'a>(pub &'a MixedGraph);

impl IndependenceOracle for MagOracle<'_> {
    fn independent(&self, key: &CiKey) -> Result<bool, CiError> {
        Ok(m_separated_mag(self.0, key)?)
    }
}

/// One recorded separator per removed edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sepsets(BTreeMap<(usize, usize), VarSet>);

impl Sepsets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: usize, b: usize, s: VarSet) {
        self.0.insert(ordered(a, b), s);
    }

    pub fn get(&self, a: usize, b: usize) -> Option<VarSet> {
        self.0.get(&ordered(a, b)).copied()
    }

    pub fn contains_pair(&self, a: usize, b: usize) -> bool {
        self.0.contains_key(&ordered(a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), VarSet)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// What to do when a rule wants to overwrite a non-circle mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictPolicy {
    /// Fail with [`FciError::Conflict`].
    Error,
    /// Keep the existing mark and carry on. Sample-based FCI runs this way,
    /// since inconsistent test outcomes routinely demand both marks.
    KeepExisting,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FciError {
    #[error("conflicting orientation at vertex {at} on edge {from} *-* {at}")]
    Conflict { from: usize, at: usize },
    #[error("no separator recorded for non-adjacent pair ({0}, {1})")]
    MissingSepset(usize, usize),
    #[error(transparent)]
    Ci(#[from] CiError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// PC-style adjacency search followed by the possible-d-sep stage. Within a
/// level, candidate sets come from the adjacencies at the start of that
/// level, pairs and subsets are visited in lexicographic order.
pub fn fci_skeleton<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    p: usize,
    r_max: usize,
) -> Result<(MixedGraph, Sepsets), FciError> {
    let mut g = MixedGraph::complete(p, Mark::Circle);
    let mut seps = Sepsets::new();
    for level in 0..=r_max {
        let snapshot: Vec<VarSet> = (0..p).map(|v| g.neighbors(v)).collect();
        let mut more = false;
        for x in 0..p {
            for y in x + 1..p {
                if !g.adjacent(x, y) {
                    continue;
                }
                let pair = VarSet::singleton(x).with(y);
                'sides: for side in [x, y] {
                    let cand = snapshot[side].minus(pair);
                    if cand.len() < level {
                        continue;
                    }
                    more = true;
                    for z in cand.subsets_of_size(level) {
                        if oracle.independent(&CiKey { x, y, z })? {
                            g.remove_edge(x, y);
                            seps.insert(x, y, z);
                            break 'sides;
                        }
                    }
                }
            }
        }
        if !more {
            break;
        }
    }

    let oriented = orient_r0(&g, &seps, ConflictPolicy::KeepExisting)?;
    let pds: Vec<VarSet> = (0..p).map(|v| possible_d_sep(&oriented, v)).collect();
    for x in 0..p {
        for y in x + 1..p {
            if !g.adjacent(x, y) {
                continue;
            }
            let pair = VarSet::singleton(x).with(y);
            'found: for side in [x, y] {
                let cand = pds[side].minus(pair);
                for z in cand.subsets_up_to(r_max) {
                    if oracle.independent(&CiKey { x, y, z })? {
                        g.remove_edge(x, y);
                        seps.insert(x, y, z);
                        break 'found;
                    }
                }
            }
        }
    }
    Ok((g.circle_skeleton(), seps))
}

/// Vertices `v` reachable from `x` along a path on which every interior
/// vertex is a collider or sits in a triangle with its path neighbors.
pub fn possible_d_sep(g: &MixedGraph, x: usize) -> VarSet {
    let p = g.n_vertices();
    let mut out = VarSet::EMPTY;
    let mut seen = vec![false; p * p];
    let mut stack = Vec::new();
    for w in g.neighbors(x) {
        seen[x * p + w] = true;
        out.insert(w);
        stack.push((x, w));
    }
    while let Some((u, v)) = stack.pop() {
        for w in g.neighbors(v) {
            if w == u || w == x || seen[v * p + w] {
                continue;
            }
            let collider = g.mark(u, v) == Some(Mark::Arrow) && g.mark(w, v) == Some(Mark::Arrow);
            if collider || g.adjacent(u, w) {
                seen[v * p + w] = true;
                out.insert(w);
                stack.push((v, w));
            }
        }
    }
    out
}

/// Full FCI against an oracle.
pub fn fci<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    p: usize,
    r_max: usize,
    policy: ConflictPolicy,
) -> Result<MixedGraph, FciError> {
    let (skel, seps) = fci_skeleton(oracle, p, r_max)?;
    orient(&skel, &seps, policy)
}

/// Orients a skeleton from scratch: every mark is reset to a circle, R0
/// places colliders from the separators, then the remaining rules run to a
/// fixed point. Only circles are ever overwritten.
pub fn orient(
    skeleton: &MixedGraph,
    seps: &Sepsets,
    policy: ConflictPolicy,
) -> Result<MixedGraph, FciError> {
    let g = orient_r0(skeleton, seps, policy)?;
    let mut o = Orienter { g, seps, policy };
    loop {
        while o.r1()? | o.r2()? | o.r3()? | o.r4()? {}
        if !(o.r8()? | o.r9()? | o.r10()?) {
            break;
        }
    }
    Ok(o.g)
}

fn orient_r0(
    skeleton: &MixedGraph,
    seps: &Sepsets,
    policy: ConflictPolicy,
) -> Result<MixedGraph, FciError> {
    let mut o = Orienter {
        g: skeleton.circle_skeleton(),
        seps,
        policy,
    };
    let p = o.g.n_vertices();
    for b in 0..p {
        let nb = o.g.neighbors(b);
        for a in nb {
            for c in nb {
                if c <= a || o.g.adjacent(a, c) {
                    continue;
                }
                let sep = seps.get(a, c).ok_or(FciError::MissingSepset(a, c))?;
                if !sep.contains(b) {
                    o.put(a, b, Mark::Arrow)?;
                    o.put(c, b, Mark::Arrow)?;
                }
            }
        }
    }
    Ok(o.g)
}

struct Orienter<'a> {
    g: MixedGraph,
    seps: &'a Sepsets,
    policy: ConflictPolicy,
}

impl Orienter<'_> {
    /// Sets the mark at `v` on `u *-* v`; reports whether anything changed.
    fn put(&mut self, u: usize, v: usize, m: Mark) -> Result<bool, FciError> {
        match self.g.mark(u, v) {
            Some(cur) if cur == m => Ok(false),
            Some(Mark::Circle) => {
                self.g.set_mark(u, v, m);
                Ok(true)
            }
            Some(_) => match self.policy {
                ConflictPolicy::Error => Err(FciError::Conflict { from: u, at: v }),
                ConflictPolicy::KeepExisting => Ok(false),
            },
            None => unreachable!("orienting a missing edge"),
        }
    }

    fn is(&self, u: usize, v: usize, m: Mark) -> bool {
        self.g.mark(u, v) == Some(m)
    }

    fn p(&self) -> usize {
        self.g.n_vertices()
    }

    /// a *-> b o-* c, a and c non-adjacent: b -> c.
    fn r1(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for b in 0..self.p() {
            for a in self.g.neighbors(b) {
                if !self.is(a, b, Mark::Arrow) {
                    continue;
                }
                for c in self.g.neighbors(b) {
                    if c == a || self.g.adjacent(a, c) || !self.is(c, b, Mark::Circle) {
                        continue;
                    }
                    changed |= self.put(c, b, Mark::Tail)?;
                    changed |= self.put(b, c, Mark::Arrow)?;
                }
            }
        }
        Ok(changed)
    }

    /// a -> b *-> c or a *-> b -> c, with a *-o c: a *-> c.
    fn r2(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for a in 0..self.p() {
            for c in self.g.neighbors(a) {
                if !self.is(a, c, Mark::Circle) {
                    continue;
                }
                let common = self.g.neighbors(a).intersection(self.g.neighbors(c));
                let hit = common.iter().any(|b| {
                    (self.g.is_directed(a, b) && self.is(b, c, Mark::Arrow))
                        || (self.is(a, b, Mark::Arrow) && self.g.is_directed(b, c))
                });
                if hit {
                    changed |= self.put(a, c, Mark::Arrow)?;
                }
            }
        }
        Ok(changed)
    }

    /// a *-> b <-* c, a *-o d o-* c, a and c non-adjacent, d *-o b: d *-> b.
    fn r3(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for b in 0..self.p() {
            for d in self.g.neighbors(b) {
                if !self.is(d, b, Mark::Circle) {
                    continue;
                }
                let common = self.g.neighbors(b).intersection(self.g.neighbors(d));
                let hit = common.iter().any(|a| {
                    self.is(a, b, Mark::Arrow)
                        && self.is(a, d, Mark::Circle)
                        && common.iter().any(|c| {
                            c > a
                                && !self.g.adjacent(a, c)
                                && self.is(c, b, Mark::Arrow)
                                && self.is(c, d, Mark::Circle)
                        })
                });
                if hit {
                    changed |= self.put(d, b, Mark::Arrow)?;
                }
            }
        }
        Ok(changed)
    }

    /// Discriminating path `<d, .., a, b, c>` with `b o-* c`: the separator of
    /// `(d, c)` decides between `b -> c` and `a <-> b <-> c`.
    fn r4(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for b in 0..self.p() {
            for c in self.g.neighbors(b) {
                if !self.is(c, b, Mark::Circle) {
                    continue;
                }
                let mut best: Option<(usize, usize, usize)> = None;
                for a in self.g.neighbors(b).intersection(self.g.neighbors(c)) {
                    if let Some((len, d)) = shortest_discriminating(&self.g, a, b, c) {
                        if best.is_none_or(|(bl, bd, _)| (len, d) < (bl, bd)) {
                            best = Some((len, d, a));
                        }
                    }
                }
                let Some((_, d, a)) = best else { continue };
                let sep = self.seps.get(d, c).ok_or(FciError::MissingSepset(d, c))?;
                if sep.contains(b) {
                    changed |= self.put(c, b, Mark::Tail)?;
                    changed |= self.put(b, c, Mark::Arrow)?;
                } else {
                    changed |= self.put(a, b, Mark::Arrow)?;
                    changed |= self.put(c, b, Mark::Arrow)?;
                    changed |= self.put(b, c, Mark::Arrow)?;
                }
            }
        }
        Ok(changed)
    }

    /// a o-> c with a -> b -> c or a -o b -> c: a -> c.
    fn r8(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for a in 0..self.p() {
            for c in self.g.neighbors(a) {
                if !(self.is(c, a, Mark::Circle) && self.is(a, c, Mark::Arrow)) {
                    continue;
                }
                let common = self.g.neighbors(a).intersection(self.g.neighbors(c));
                let hit = common.iter().any(|b| {
                    self.g.is_directed(b, c)
                        && self.is(b, a, Mark::Tail)
                        && (self.is(a, b, Mark::Arrow) || self.is(a, b, Mark::Circle))
                });
                if hit {
                    changed |= self.put(c, a, Mark::Tail)?;
                }
            }
        }
        Ok(changed)
    }

    /// a o-> c with an uncovered potentially directed path <a, b, .., c>,
    /// b and c non-adjacent: a -> c.
    fn r9(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for a in 0..self.p() {
            for c in self.g.neighbors(a) {
                if !(self.is(c, a, Mark::Circle) && self.is(a, c, Mark::Arrow)) {
                    continue;
                }
                let hit = self.g.neighbors(a).iter().any(|b| {
                    b != c
                        && !self.g.adjacent(b, c)
                        && pd_edge(&self.g, a, b)
                        && !uncovered_pd_targets(&self.g, a, b, VarSet::singleton(c), VarSet::EMPTY)
                            .is_empty()
                });
                if hit {
                    changed |= self.put(c, a, Mark::Tail)?;
                }
            }
        }
        Ok(changed)
    }

    /// a o-> c, b -> c <- d, uncovered potentially directed paths from a to
    /// b and from a to d whose first vertices differ and are non-adjacent:
    /// a -> c.
    fn r10(&mut self) -> Result<bool, FciError> {
        let mut changed = false;
        for a in 0..self.p() {
            for c in self.g.neighbors(a) {
                if !(self.is(c, a, Mark::Circle) && self.is(a, c, Mark::Arrow)) {
                    continue;
                }
                let pa: VarSet = self.g.parents(c).without(a);
                if pa.len() < 2 {
                    continue;
                }
                // first vertex -> parents of c reachable through it
                let firsts: Vec<(usize, VarSet)> = self
                    .g
                    .neighbors(a)
                    .iter()
                    .filter(|&m| m != c && pd_edge(&self.g, a, m))
                    .map(|m| {
                        let mut t = uncovered_pd_targets(&self.g, a, m, pa, VarSet::singleton(c));
                        if pa.contains(m) {
                            t.insert(m);
                        }
                        (m, t)
                    })
                    .filter(|(_, t)| !t.is_empty())
                    .collect();
                let hit = firsts.iter().any(|&(m, tm)| {
                    firsts.iter().any(|&(w, tw)| {
                        m < w
                            && !self.g.adjacent(m, w)
                            && tm.iter().any(|b| tw.iter().any(|d| b != d))
                    })
                });
                if hit {
                    changed |= self.put(c, a, Mark::Tail)?;
                }
            }
        }
        Ok(changed)
    }
}

/// The edge `u *-* v` could be oriented `u -> v`: no arrowhead at `u`, no
/// tail at `v`.
fn pd_edge(g: &MixedGraph, u: usize, v: usize) -> bool {
    g.mark(v, u) != Some(Mark::Arrow) && g.mark(u, v) != Some(Mark::Tail)
}

/// Members of `targets` reachable by an uncovered potentially directed path
/// that starts `start -> first`, continues past `first` and never visits
/// `avoid`. A target equal to `first` is not reported.
fn uncovered_pd_targets(
    g: &MixedGraph,
    start: usize,
    first: usize,
    targets: VarSet,
    avoid: VarSet,
) -> VarSet {
    fn go(
        g: &MixedGraph,
        prev: usize,
        cur: usize,
        visited: VarSet,
        targets: VarSet,
        avoid: VarSet,
        acc: &mut VarSet,
    ) {
        for w in g.neighbors(cur) {
            if visited.contains(w)
                || avoid.contains(w)
                || g.adjacent(prev, w)
                || !pd_edge(g, cur, w)
            {
                continue;
            }
            if targets.contains(w) {
                acc.insert(w);
            }
            if !targets.minus(*acc).is_empty() {
                go(g, cur, w, visited.with(w), targets, avoid, acc);
            }
        }
    }
    let mut acc = VarSet::EMPTY;
    go(
        g,
        start,
        first,
        VarSet::singleton(start).with(first),
        targets,
        avoid,
        &mut acc,
    );
    acc
}

/// Endpoints of every discriminating path `<d, .., a, b, c>` for `b`, with
/// the number of vertices on the path.
pub fn discriminating_endpoints(
    g: &MixedGraph,
    a: usize,
    b: usize,
    c: usize,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if !(g.mark(b, a) == Some(Mark::Arrow) && g.is_directed(a, c) && g.adjacent(b, c)) {
        return out;
    }
    // `cur` is a collider on the path so far and a parent of `c`.
    fn go(
        g: &MixedGraph,
        cur: usize,
        c: usize,
        visited: VarSet,
        len: usize,
        out: &mut Vec<(usize, usize)>,
    ) {
        for w in g.neighbors(cur) {
            if visited.contains(w) || w == c || g.mark(w, cur) != Some(Mark::Arrow) {
                continue;
            }
            if !g.adjacent(w, c) {
                out.push((len + 1, w));
            } else if g.is_directed(w, c) && g.mark(cur, w) == Some(Mark::Arrow) {
                go(g, w, c, visited.with(w), len + 1, out);
            }
        }
    }
    go(g, a, c, VarSet::from_slice(&[a, b, c]), 3, &mut out);
    out
}

fn shortest_discriminating(g: &MixedGraph, a: usize, b: usize, c: usize) -> Option<(usize, usize)> {
    discriminating_endpoints(g, a, b, c).into_iter().min()
}

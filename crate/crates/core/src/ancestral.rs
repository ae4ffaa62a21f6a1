//! Ancestral and maximality checks, and conversion between a MAG and the
//! PAG of its equivalence class.

use alloc::vec;
use alloc::vec::Vec;

use crate::fci::{orient, ConflictPolicy, Sepsets};
use crate::graph::{GraphClass, GraphError, Mark, MixedGraph};
use crate::msep::m_separated_mag;
use crate::vars::{CiKey, VarSet};

/// No directed cycle and no almost-directed cycle (a spouse that is also an
/// ancestor).
pub fn is_ancestral(g: &MixedGraph) -> Result<bool, GraphError> {
    g.conforms(GraphClass::Mag)?;
    let p = g.n_vertices();
    let anc: Vec<VarSet> = (0..p)
        .map(|v| g.ancestors_of(VarSet::singleton(v)))
        .collect();
    for (u, v, mu, mv) in g.edges() {
        let bad = match (mu, mv) {
            (Mark::Tail, Mark::Arrow) => anc[u].contains(v),
            (Mark::Arrow, Mark::Tail) => anc[v].contains(u),
            _ => anc[u].contains(v) || anc[v].contains(u),
        };
        if bad {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True if some path between the non-adjacent `x` and `y` has every
/// interior vertex a collider and an ancestor of `{x, y}`.
pub fn has_inducing_path(g: &MixedGraph, x: usize, y: usize) -> bool {
    let p = g.n_vertices();
    let anc = g.ancestors_of(VarSet::singleton(x).with(y));
    let mut seen = vec![false; p * p];
    let mut stack = Vec::new();
    for w in g.neighbors(x) {
        seen[x * p + w] = true;
        stack.push((x, w));
    }
    while let Some((u, v)) = stack.pop() {
        if v == y {
            return true;
        }
        if !anc.contains(v) || g.mark(u, v) != Some(Mark::Arrow) {
            continue;
        }
        for w in g.neighbors(v) {
            if w != u && w != x && !seen[v * p + w] && g.mark(w, v) == Some(Mark::Arrow) {
                seen[v * p + w] = true;
                stack.push((v, w));
            }
        }
    }
    false
}

/// No inducing path between any non-adjacent pair.
pub fn is_maximal(g: &MixedGraph) -> bool {
    let p = g.n_vertices();
    (0..p).all(|x| (x + 1..p).all(|y| g.adjacent(x, y) || !has_inducing_path(g, x, y)))
}

/// Picks one MAG from the class a PAG represents: `o->` becomes `->`, and
/// the circle component is oriented along a maximum cardinality search order,
/// which is acyclic and collider-free when the component is chordal.
pub fn pag_to_mag(pag: &MixedGraph) -> Result<MixedGraph, GraphError> {
    let identity: Vec<usize> = (0..pag.n_vertices()).collect();
    pag_to_mag_with_priority(pag, &identity)
}

/// [`pag_to_mag`] with search ties broken by `priority` (earlier entries
/// first) instead of by index. Different priorities can select different
/// members of the class.
pub fn pag_to_mag_with_priority(
    pag: &MixedGraph,
    priority: &[usize],
) -> Result<MixedGraph, GraphError> {
    pag.conforms(GraphClass::Pag)?;
    let p = pag.n_vertices();
    let mut m = pag.clone();
    let mut circle_adj = vec![VarSet::EMPTY; p];
    for (u, v, mu, mv) in pag.edges() {
        match (mu, mv) {
            (Mark::Circle, Mark::Arrow) => m.set_mark(v, u, Mark::Tail),
            (Mark::Arrow, Mark::Circle) => m.set_mark(u, v, Mark::Tail),
            (Mark::Circle, Mark::Circle) => {
                circle_adj[u].insert(v);
                circle_adj[v].insert(u);
            }
            (Mark::Circle, Mark::Tail) | (Mark::Tail, Mark::Circle) => {
                return Err(GraphError::ClassMismatch(
                    GraphClass::Pag,
                    "circle opposite a tail",
                ))
            }
            _ => {}
        }
    }

    let order = mcs_order(&circle_adj, priority);
    let mut pos = vec![0usize; p];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Earlier-visited neighbors of every vertex must form a clique; checking
    // them against the latest of them suffices.
    for &v in &order {
        let earlier: VarSet = circle_adj[v].iter().filter(|&u| pos[u] < pos[v]).collect();
        if let Some(last) = earlier.iter().max_by_key(|&u| pos[u]) {
            if !earlier.without(last).is_subset(circle_adj[last]) {
                return Err(GraphError::NotChordal);
            }
        }
    }
    for u in 0..p {
        for v in circle_adj[u] {
            if pos[u] < pos[v] {
                m.add_directed(u, v);
            }
        }
    }
    if is_ancestral(&m)? && is_maximal(&m) {
        Ok(m)
    } else {
        Err(GraphError::NoValidMag)
    }
}

/// Maximum cardinality search; ties go to the vertex listed first in
/// `priority`.
fn mcs_order(adj: &[VarSet], priority: &[usize]) -> Vec<usize> {
    let p = adj.len();
    let mut rank = vec![usize::MAX; p];
    for (i, &v) in priority.iter().enumerate() {
        if v < p {
            rank[v] = rank[v].min(i);
        }
    }
    let mut weight = vec![0usize; p];
    let mut done = VarSet::EMPTY;
    let mut order = Vec::with_capacity(p);
    for _ in 0..p {
        let v = (0..p)
            .filter(|&v| !done.contains(v))
            .max_by(|&a, &b| {
                weight[a]
                    .cmp(&weight[b])
                    .then((rank[b], b).cmp(&(rank[a], a)))
            })
            .expect("unvisited vertex");
        done.insert(v);
        order.push(v);
        for u in adj[v] {
            if !done.contains(u) {
                weight[u] += 1;
            }
        }
    }
    order
}

/// One separator for each non-adjacent pair of a MAG: the ancestors of the
/// pair when they separate, else the first separating subset by size.
pub fn mag_sepsets(m: &MixedGraph) -> Result<Sepsets, GraphError> {
    let p = m.n_vertices();
    let mut seps = Sepsets::new();
    for x in 0..p {
        for y in x + 1..p {
            if m.adjacent(x, y) {
                continue;
            }
            let pair = VarSet::singleton(x).with(y);
            let anc = m.ancestors_of(pair).minus(pair);
            let key = CiKey { x, y, z: anc };
            let sep = if m_separated_mag(m, &key)? {
                anc
            } else {
                let rest = m.vertices().minus(pair);
                let mut found = None;
                for z in rest.subsets_up_to(rest.len()) {
                    if m_separated_mag(m, &CiKey { x, y, z })? {
                        found = Some(z);
                        break;
                    }
                }
                found.ok_or(GraphError::NotMaximal(x, y))?
            };
            seps.insert(x, y, sep);
        }
    }
    Ok(seps)
}

/// The PAG of a MAG's equivalence class: oracle FCI orientation on the MAG's
/// skeleton with separators read off the MAG.
pub fn mag_to_pag(m: &MixedGraph) -> Result<MixedGraph, GraphError> {
    if !is_ancestral(m)? {
        return Err(GraphError::ClassMismatch(GraphClass::Mag, "not ancestral"));
    }
    let seps = mag_sepsets(m)?;
    orient(&m.circle_skeleton(), &seps, ConflictPolicy::Error)
        .map_err(|_| GraphError::ClassMismatch(GraphClass::Mag, "orientation conflict"))
}

/// Why a graph is not a PAG, by the validity stage that rejected it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PagDefect {
    #[error("mark check failed: {0}")]
    Marks(GraphError),
    #[error("no MAG can be read off the graph: {0}")]
    NoMag(GraphError),
    #[error("the PAG of the selected MAG differs from the graph")]
    RoundTrip,
}

/// Validity with the failing stage: marks, MAG extraction, round trip.
pub fn check_pag(pag: &MixedGraph) -> Result<(), PagDefect> {
    pag.conforms(GraphClass::Pag).map_err(PagDefect::Marks)?;
    let m = pag_to_mag(pag).map_err(PagDefect::NoMag)?;
    match mag_to_pag(&m) {
        Ok(back) if &back == pag => Ok(()),
        _ => Err(PagDefect::RoundTrip),
    }
}

/// True iff a MAG can be read off `pag` and the PAG of that MAG is `pag`
/// itself, mark for mark.
pub fn is_valid_pag(pag: &MixedGraph) -> bool {
    check_pag(pag).is_ok()
}

/// Projects an ADMG (bidirected edges standing for latent confounders) onto
/// its MAG: vertices joined by an inducing path become adjacent, oriented
/// `x -> y` when `x` is an ancestor of `y` and `x <-> y` when neither is an
/// ancestor of the other.
pub fn admg_to_mag(admg: &MixedGraph) -> Result<MixedGraph, GraphError> {
    admg.conforms(GraphClass::Admg)?;
    let p = admg.n_vertices();
    let anc: Vec<VarSet> = (0..p)
        .map(|v| admg.ancestors_of(VarSet::singleton(v)))
        .collect();
    let mut m = MixedGraph::new(p);
    for x in 0..p {
        for y in x + 1..p {
            if !has_inducing_path(admg, x, y) {
                continue;
            }
            if anc[y].contains(x) {
                m.add_directed(x, y);
            } else if anc[x].contains(y) {
                m.add_directed(y, x);
            } else {
                m.add_bidirected(x, y);
            }
        }
    }
    Ok(m)
}

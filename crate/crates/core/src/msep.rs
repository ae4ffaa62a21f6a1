//! m-separation in MAGs and PAGs.
//!
//! Both variants walk (previous, current) edge states from `x`, so each
//! directed traversal of an edge is visited once. A collider passes when it
//! is an ancestor of the conditioning set, a non-collider when it is outside
//! it. The PAG variant only passes triples of definite status.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{GraphError, Mark, MixedGraph};
use crate::vars::CiKey;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Collider,
    NonCollider,
    Indefinite,
}

/// Status of the triple `a *-* b *-* c` as a MAG triple: collider iff both
/// marks at `b` are arrowheads.
fn mag_status(g: &MixedGraph, a: usize, b: usize, c: usize) -> Status {
    if g.mark(a, b) == Some(Mark::Arrow) && g.mark(c, b) == Some(Mark::Arrow) {
        Status::Collider
    } else {
        Status::NonCollider
    }
}

/// Definite status of `a *-* b *-* c` in a PAG.
pub(crate) fn pag_status_is(g: &MixedGraph, a: usize, b: usize, c: usize) -> Option<bool> {
    match pag_status(g, a, b, c) {
        Status::Collider => Some(true),
        Status::NonCollider => Some(false),
        Status::Indefinite => None,
    }
}

fn pag_status(g: &MixedGraph, a: usize, b: usize, c: usize) -> Status {
    let ab = g.mark(a, b);
    let cb = g.mark(c, b);
    if ab == Some(Mark::Arrow) && cb == Some(Mark::Arrow) {
        Status::Collider
    } else if ab == Some(Mark::Tail)
        || cb == Some(Mark::Tail)
        || (ab == Some(Mark::Circle) && cb == Some(Mark::Circle) && !g.adjacent(a, c))
    {
        Status::NonCollider
    } else {
        Status::Indefinite
    }
}

fn check_query(g: &MixedGraph, q: &CiKey) -> Result<(), GraphError> {
    g.check_vertex(q.x)?;
    g.check_vertex(q.y)?;
    if q.max_var() >= g.n_vertices() {
        return Err(GraphError::VertexOutOfRange(q.max_var()));
    }
    if q.x == q.y || q.z.contains(q.x) || q.z.contains(q.y) {
        return Err(GraphError::BadQuery(
            "endpoints must be distinct and outside z",
        ));
    }
    Ok(())
}

fn connected(
    g: &MixedGraph,
    q: &CiKey,
    status: fn(&MixedGraph, usize, usize, usize) -> Status,
) -> bool {
    let p = g.n_vertices();
    let anc = g.ancestors_of(q.z);
    let mut seen = vec![false; p * p];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for w in g.neighbors(q.x) {
        seen[q.x * p + w] = true;
        stack.push((q.x, w));
    }
    while let Some((u, v)) = stack.pop() {
        if v == q.y {
            return true;
        }
        for w in g.neighbors(v) {
            if w == u || w == q.x || seen[v * p + w] {
                continue;
            }
            let pass = match status(g, u, v, w) {
                Status::Collider => anc.contains(v),
                Status::NonCollider => !q.z.contains(v),
                Status::Indefinite => false,
            };
            if pass {
                seen[v * p + w] = true;
                stack.push((v, w));
            }
        }
    }
    false
}

/// Whether `x` and `y` are m-separated given `z` in a MAG.
pub fn m_separated_mag(g: &MixedGraph, q: &CiKey) -> Result<bool, GraphError> {
    check_query(g, q)?;
    Ok(!connected(g, q, mag_status))
}

/// Whether `x` and `y` are m-separated given `z` in a PAG: no definite
/// m-connecting path exists.
pub fn m_separated_pag(g: &MixedGraph, q: &CiKey) -> Result<bool, GraphError> {
    check_query(g, q)?;
    Ok(!connected(g, q, pag_status))
}

/// Dispatches on the presence of circle marks. On circle-free graphs the two
/// criteria coincide.
pub fn m_separated(g: &MixedGraph, q: &CiKey) -> Result<bool, GraphError> {
    if g.has_circles() {
        m_separated_pag(g, q)
    } else {
        m_separated_mag(g, q)
    }
}

//! Structural error metrics between an inferred and a true PAG.
//!
//! Each unordered pair contributes two endpoints whose state is a mark or
//! "no edge". SHD counts endpoint states that differ, so a missing or extra
//! edge costs 2 and a wrong mark costs 1.

use crate::graph::{GraphError, Mark, MixedGraph};

fn same_size(a: &MixedGraph, b: &MixedGraph) -> Result<usize, GraphError> {
    if a.n_vertices() == b.n_vertices() {
        Ok(a.n_vertices())
    } else {
        Err(GraphError::BadQuery("graphs have different vertex sets"))
    }
}

/// Endpoint-wise structural Hamming distance.
pub fn shd(inferred: &MixedGraph, truth: &MixedGraph) -> Result<usize, GraphError> {
    let p = same_size(inferred, truth)?;
    let mut d = 0;
    for u in 0..p {
        for v in u + 1..p {
            d += usize::from(inferred.mark(u, v) != truth.mark(u, v));
            d += usize::from(inferred.mark(v, u) != truth.mark(v, u));
        }
    }
    Ok(d)
}

/// Claim counts: `(wrong definite, definite, wrong circle, circle)`.
fn claims(inferred: &MixedGraph, truth: &MixedGraph) -> Result<[usize; 4], GraphError> {
    let p = same_size(inferred, truth)?;
    let mut c = [0usize; 4];
    for u in 0..p {
        for v in u + 1..p {
            if !inferred.adjacent(u, v) {
                c[1] += 1;
                c[0] += usize::from(truth.adjacent(u, v));
                continue;
            }
            for (a, b) in [(u, v), (v, u)] {
                let m = inferred.mark(a, b);
                let wrong = truth.mark(a, b) != m;
                if m == Some(Mark::Circle) {
                    c[3] += 1;
                    c[2] += usize::from(wrong);
                } else {
                    c[1] += 1;
                    c[0] += usize::from(wrong);
                }
            }
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Share of definite claims (arrowheads, tails, absent edges) that are wrong.
pub fn fdr(inferred: &MixedGraph, truth: &MixedGraph) -> Result<f64, GraphError> {
    let c = claims(inferred, truth)?;
    Ok(ratio(c[0], c[1]))
}

/// Share of circle endpoints the truth does not leave as circles.
pub fn for_rate(inferred: &MixedGraph, truth: &MixedGraph) -> Result<f64, GraphError> {
    let c = claims(inferred, truth)?;
    Ok(ratio(c[2], c[3]))
}

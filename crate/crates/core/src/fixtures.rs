//! A four-variable worked example: its graphs and a table of CI test
//! results at n = 10000.
//!
//! Vertex order is `A, B, X, Y`.

use alloc::vec::Vec;

use crate::bayes::{posterior, BffConfig};
use crate::citest::{CiOutcome, TableSource};
use crate::graph::{Mark, MixedGraph};
use crate::special::chi_square_isf;
use crate::vars::{CiKey, VarSet};

pub const NAMES: [&str; 4] = ["A", "B", "X", "Y"];
pub const A: usize = 0;
pub const B: usize = 1;
pub const X: usize = 2;
pub const Y: usize = 3;

/// Sample size behind the table.
pub const TABLE_N: usize = 10_000;

/// One table row: `x`, `y`, conditioning set, p-value, P(H0), P(H1).
#[derive(Clone, Copy, Debug)]
pub struct Row {
    pub x: usize,
    pub y: usize,
    pub z: &'static [usize],
    pub p_value: f64,
    pub p_h0: f64,
    pub p_h1: f64,
}

const fn row(x: usize, y: usize, z: &'static [usize], p_value: f64, p_h0: f64, p_h1: f64) -> Row {
    Row {
        x,
        y,
        z,
        p_value,
        p_h0,
        p_h1,
    }
}

pub const TABLE: [Row; 24] = [
    row(A, B, &[], 2.64e-14, 1.78e-12, 1.0),
    row(A, X, &[], 4.13e-311, 0.0, 1.0),
    row(A, Y, &[], 0.00276, 0.0366, 0.963),
    row(B, X, &[], 0.496, 0.672, 0.328),
    row(B, Y, &[], 0.0, 0.0, 1.0),
    row(X, Y, &[], 0.00937, 0.105, 0.895),
    row(A, B, &[X], 2.58e-15, 1.87e-13, 1.0),
    row(A, B, &[Y], 7.69e-25, 0.0, 1.0),
    row(A, X, &[B], 4.46e-312, 0.0, 1.0),
    row(A, X, &[Y], 3.49e-310, 0.0, 1.0),
    row(A, Y, &[B], 4.59e-14, 3.02e-12, 1.0),
    row(A, Y, &[X], 0.0279, 0.198, 0.802),
    row(B, X, &[A], 0.0246, 0.185, 0.815),
    row(B, X, &[Y], 0.0294, 0.204, 0.796),
    row(B, Y, &[A], 0.0, 0.0, 1.0),
    row(B, Y, &[X], 0.0, 0.0, 1.0),
    row(X, Y, &[A], 0.105, 0.388, 0.612),
    row(X, Y, &[B], 0.000895, 0.0136, 0.986),
    row(A, B, &[X, Y], 2.05e-24, 0.0, 1.0),
    row(A, X, &[B, Y], 9.87e-310, 0.0, 1.0),
    row(A, Y, &[B, X], 1.04e-11, 5.57e-10, 1.0),
    row(B, X, &[A, Y], 0.0936, 0.368, 0.632),
    row(B, Y, &[A, X], 0.0, 0.0, 1.0),
    row(X, Y, &[A, B], 0.536, 0.683, 0.317),
];

impl Row {
    pub fn key(&self) -> CiKey {
        CiKey::new(self.x, self.y, VarSet::from_slice(self.z)).expect("table keys are well formed")
    }

    /// One-degree-of-freedom statistic behind the printed p-value. Rows
    /// printed as 0 get the statistic of the smallest positive double.
    pub fn statistic(&self) -> f64 {
        chi_square_isf(self.p_value.max(f64::MIN_POSITIVE * f64::EPSILON), 1.0)
    }
}

/// Table outcomes with posteriors recomputed from the statistics.
pub fn table_source(bff: &BffConfig) -> TableSource {
    let mut t = TableSource::new();
    for r in &TABLE {
        let post = posterior(r.statistic(), 1, TABLE_N, bff);
        t.insert(
            r.key(),
            CiOutcome {
                p_value: r.p_value,
                p_indep: post.p_h0,
            },
        );
    }
    t
}

/// Table outcomes with the printed posteriors.
pub fn printed_source() -> TableSource {
    let mut t = TableSource::new();
    for r in &TABLE {
        t.insert(
            r.key(),
            CiOutcome {
                p_value: r.p_value,
                p_indep: r.p_h0,
            },
        );
    }
    t
}

use Mark::{Arrow as Ar, Circle as Ci, Tail as Ta};

fn graph(edges: &[(usize, Mark, Mark, usize)]) -> MixedGraph {
    let mut g = MixedGraph::new(4);
    for &(u, mu, mv, v) in edges {
        g.set_edge(u, v, mu, mv);
    }
    g
}

/// True MAG: `X -> A -> Y <- B`, `A <-> B`.
pub fn true_mag() -> MixedGraph {
    graph(&[
        (X, Ta, Ar, A),
        (A, Ta, Ar, Y),
        (B, Ta, Ar, Y),
        (A, Ar, Ar, B),
    ])
}

/// True PAG.
pub fn true_pag() -> MixedGraph {
    graph(&[
        (X, Ci, Ar, A),
        (B, Ci, Ar, A),
        (A, Ta, Ar, Y),
        (B, Ta, Ar, Y),
    ])
}

/// FCI output.
pub fn fci_pag() -> MixedGraph {
    graph(&[(X, Ci, Ar, A), (Y, Ci, Ar, B), (A, Ar, Ar, B)])
}

/// cFCI / GPS output.
pub fn cfci_pag() -> MixedGraph {
    graph(&[(X, Ci, Ci, A), (Y, Ci, Ar, B), (A, Ci, Ar, B)])
}

/// BCCD output, not a valid PAG.
pub fn bccd_pag() -> MixedGraph {
    graph(&[
        (A, Ci, Ar, Y),
        (B, Ci, Ci, Y),
        (B, Ci, Ci, A),
        (X, Ci, Ci, A),
    ])
}

/// BCCD output with the arrowhead into `Y` replaced by a circle.
pub fn bccd_adjusted_pag() -> MixedGraph {
    graph(&[
        (A, Ci, Ci, Y),
        (B, Ci, Ci, Y),
        (B, Ci, Ci, A),
        (X, Ci, Ci, A),
    ])
}

/// DCD output.
pub fn dcd_pag() -> MixedGraph {
    graph(&[
        (X, Ci, Ar, B),
        (Y, Ci, Ar, B),
        (A, Ci, Ar, B),
        (X, Ci, Ci, A),
    ])
}

/// Level-0 candidate without the `B - X` edge.
pub fn candidate_r0() -> MixedGraph {
    graph(&[
        (A, Ci, Ci, Y),
        (B, Ci, Ar, Y),
        (B, Ci, Ar, A),
        (X, Ci, Ar, A),
        (X, Ci, Ar, Y),
    ])
}

/// Level-1 candidate cutting `X - Y`.
pub fn candidate_cut_xy() -> MixedGraph {
    graph(&[
        (A, Ta, Ar, Y),
        (B, Ar, Ar, Y),
        (B, Ar, Ar, A),
        (X, Ci, Ar, A),
    ])
}

/// Level-1 candidate cutting `A - Y`.
pub fn candidate_cut_ay() -> MixedGraph {
    graph(&[
        (B, Ar, Ar, Y),
        (B, Ar, Ar, A),
        (X, Ci, Ar, A),
        (X, Ci, Ar, Y),
    ])
}

/// Level-1 candidate cutting both, discarded by the search.
pub fn candidate_cut_both() -> MixedGraph {
    graph(&[(Y, Ci, Ar, B), (B, Ar, Ar, A), (X, Ci, Ar, A)])
}

/// All named graphs of the example.
pub fn all_graphs() -> Vec<(&'static str, MixedGraph)> {
    alloc::vec![
        ("true-mag", true_mag()),
        ("true-pag", true_pag()),
        ("fci", fci_pag()),
        ("cfci", cfci_pag()),
        ("bccd", bccd_pag()),
        ("bccd-adjusted", bccd_adjusted_pag()),
        ("dcd", dcd_pag()),
        ("candidate_r0", candidate_r0()),
        ("candidate_cut_xy", candidate_cut_xy()),
        ("candidate_cut_ay", candidate_cut_ay()),
        ("candidate_cut_both", candidate_cut_both()),
    ]
}

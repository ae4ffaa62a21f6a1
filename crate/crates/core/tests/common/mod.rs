#![allow(dead_code)]

use dcfci_core::ancestral::admg_to_mag;
use dcfci_core::graph::{Mark, MixedGraph};
use dcfci_core::vars::{CiKey, VarSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random ADMG: a random causal order, directed edges forward along it with
/// probability `dens`, bidirected edges with probability `bi`.
pub fn random_admg(p: usize, dens: f64, bi: f64, seed: u64) -> MixedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut rng);
    let mut g = MixedGraph::new(p);
    for i in 0..p {
        for j in i + 1..p {
            let (u, v) = (order[i], order[j]);
            let roll: f64 = rng.random();
            if roll < dens {
                g.add_directed(u, v);
            } else if roll < dens + bi {
                g.add_bidirected(u, v);
            }
        }
    }
    g
}

pub fn random_mag(p: usize, seed: u64) -> MixedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let dens = rng.random_range(0.15..0.6);
    let bi = rng.random_range(0.0..0.3);
    admg_to_mag(&random_admg(p, dens, bi, seed)).unwrap()
}

/// Every simple path from `x` to `y`, as vertex lists.
pub fn simple_paths(g: &MixedGraph, x: usize, y: usize) -> Vec<Vec<usize>> {
    fn go(g: &MixedGraph, path: &mut Vec<usize>, y: usize, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        if cur == y {
            out.push(path.clone());
            return;
        }
        for w in g.neighbors(cur) {
            if !path.contains(&w) {
                path.push(w);
                go(g, path, y, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, &mut vec![x], y, &mut out);
    out
}

fn collider(g: &MixedGraph, a: usize, b: usize, c: usize) -> bool {
    g.mark(a, b) == Some(Mark::Arrow) && g.mark(c, b) == Some(Mark::Arrow)
}

/// Ancestors through `->` edges, by repeated relaxation.
pub fn ancestors_naive(g: &MixedGraph, set: VarSet) -> VarSet {
    let mut anc = set;
    loop {
        let mut grew = false;
        for (u, v, _, _) in g.edges().collect::<Vec<_>>() {
            for (a, b) in [(u, v), (v, u)] {
                if g.is_directed(a, b) && anc.contains(b) && !anc.contains(a) {
                    anc.insert(a);
                    grew = true;
                }
            }
        }
        if !grew {
            return anc;
        }
    }
}

/// m-separation by enumerating paths. With `definite`, only paths whose
/// interior triples have definite status count, as in a PAG.
pub fn msep_by_paths(g: &MixedGraph, q: &CiKey, definite: bool) -> bool {
    let anc = ancestors_naive(g, q.z);
    !simple_paths(g, q.x, q.y).iter().any(|path| {
        path.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            if collider(g, a, b, c) {
                return anc.contains(b);
            }
            let noncollider = !definite
                || g.mark(a, b) == Some(Mark::Tail)
                || g.mark(c, b) == Some(Mark::Tail)
                || (g.mark(a, b) == Some(Mark::Circle)
                    && g.mark(c, b) == Some(Mark::Circle)
                    && !g.adjacent(a, c));
            noncollider && !q.z.contains(b)
        })
    })
}

/// Inducing path by enumeration.
pub fn inducing_by_paths(g: &MixedGraph, x: usize, y: usize) -> bool {
    let anc = ancestors_naive(g, VarSet::from_slice(&[x, y]));
    simple_paths(g, x, y).iter().any(|path| {
        path.windows(3)
            .all(|w| collider(g, w[0], w[1], w[2]) && anc.contains(w[1]))
    })
}

/// All queries over `p` vertices.
pub fn all_keys(p: usize) -> Vec<CiKey> {
    let mut out = Vec::new();
    for x in 0..p {
        for y in x + 1..p {
            let rest = VarSet::full(p).without(x).without(y);
            out.extend(rest.subsets_up_to(p).map(|z| CiKey { x, y, z }));
        }
    }
    out
}

/// Arbitrary but fixed outcomes, a different draw per key and salt.
pub struct KeyedSource(pub u64);

impl dcfci_core::citest::CiSource for KeyedSource {
    fn outcome(
        &self,
        key: &CiKey,
    ) -> Result<dcfci_core::citest::CiOutcome, dcfci_core::citest::CiError> {
        let mut h = self.0 ^ key.z.bits().wrapping_mul(0x9e37_79b9_7f4a_7c15);
        h ^= ((key.x as u64) << 32 | key.y as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        let mut next = || {
            h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = h;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64
        };
        Ok(dcfci_core::citest::CiOutcome {
            p_value: next(),
            p_indep: next(),
        })
    }
}

//! Random ground truths and SEM sampling.
//!
//! Every random draw is made from a ChaCha stream selected by a seed and a
//! fixed stream number, so results depend only on the seed and never on
//! scheduling.

use std::collections::BTreeMap;

use dcfci_core::ancestral::{admg_to_mag, mag_to_pag};
use dcfci_core::citest::{Column, Dataset, VarKind};
use dcfci_core::graph::{GraphError, MixedGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Smallest coefficient magnitude.
pub const COEF_MIN: f64 = 0.2;
/// Largest coefficient magnitude.
pub const COEF_MAX: f64 = 0.6;

const STREAM_GRAPH: u64 = 1;
const STREAM_SEM: u64 = 2;
const STREAM_DATA: u64 = 3;
const STREAM_KINDS: u64 = 4;

/// The `i`-th seed derived from `base` (SplitMix64 of a counter).
pub fn split_seed(base: u64, i: u64) -> u64 {
    let mut z = base.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// An ADMG with the MAG and PAG it induces over its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub admg: MixedGraph,
    pub mag: MixedGraph,
    pub pag: MixedGraph,
    pub seed: u64,
}

impl GroundTruth {
    pub fn from_admg(admg: MixedGraph, seed: u64) -> Result<Self, GraphError> {
        let mag = admg_to_mag(&admg)?;
        let pag = mag_to_pag(&mag)?;
        Ok(GroundTruth {
            admg,
            mag,
            pag,
            seed,
        })
    }
}

/// Each pair along a random causal order gets an edge with probability
/// `edge_density`; an edge is bidirected with probability
/// `bidirected_fraction`, else it points forward.
pub fn random_ground_truth(
    p: usize,
    edge_density: f64,
    bidirected_fraction: f64,
    seed: u64,
) -> GroundTruth {
    let mut r = rng(seed, STREAM_GRAPH);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut r);
    let mut g = MixedGraph::new(p);
    for i in 0..p {
        for j in i + 1..p {
            let edge = r.random::<f64>() < edge_density;
            let bi = r.random::<f64>() < bidirected_fraction;
            if edge {
                let (u, v) = (order[i], order[j]);
                if bi {
                    g.add_bidirected(u, v);
                } else {
                    g.add_directed(u, v);
                }
            }
        }
    }
    GroundTruth::from_admg(g, seed).expect("forward edges form an ADMG")
}

/// A latent common parent standing for one bidirected edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Latent {
    pub a: usize,
    pub b: usize,
    pub load_a: f64,
    pub load_b: f64,
}

/// Linear structural equations over an ADMG.
#[derive(Clone, Debug, PartialEq)]
pub struct SemSpec {
    /// Coefficient of each directed edge `u -> v`, keyed `(u, v)`.
    pub coefficients: BTreeMap<(usize, usize), f64>,
    pub latents: Vec<Latent>,
    pub noise_sd: Vec<f64>,
    pub intercepts: Vec<f64>,
}

fn coefficient(r: &mut ChaCha8Rng) -> f64 {
    let m = r.random_range(COEF_MIN..COEF_MAX);
    if r.random::<bool>() {
        m
    } else {
        -m
    }
}

/// Smallest residual variance a vertex may be left with in standardized
/// units before its coefficients are redrawn.
const MIN_RESIDUAL: f64 = 0.05;
const REDRAWS: usize = 100;

/// Standardized linear SEM: coefficients with magnitudes in
/// `[COEF_MIN, COEF_MAX)` and random signs, and residual variances chosen
/// so that every variable has unit variance. A bidirected edge is a latent
/// unit-variance parent whose two loadings multiply to a residual
/// covariance of the same magnitude range. When a vertex's parents would
/// explain more than all of its variance, its coefficients are redrawn; if
/// that keeps failing it falls back to unit residual variance.
pub fn random_sem(gt: &GroundTruth, seed: u64) -> SemSpec {
    let mut r = rng(seed, STREAM_SEM);
    let g = &gt.admg;
    let p = g.n_vertices();
    let mut latents = Vec::new();
    for (u, v, _, _) in g.edges() {
        if g.is_bidirected(u, v) {
            let c = coefficient(&mut r);
            let l = c.abs().sqrt();
            latents.push(Latent {
                a: u,
                b: v,
                load_a: l,
                load_b: l.copysign(c),
            });
        }
    }
    // every variable as a combination of independent unit sources: the
    // latents first, then one residual per vertex
    let m = latents.len();
    let mut weights = vec![vec![0.0; m + p]; p];
    let mut coefficients = BTreeMap::new();
    let mut noise_sd = vec![1.0; p];
    for v in topological_order(g) {
        let parents: Vec<usize> = g.parents(v).iter().collect();
        let mut base = vec![0.0; m + p];
        for (j, l) in latents.iter().enumerate() {
            if l.a == v {
                base[j] = l.load_a;
            } else if l.b == v {
                base[j] = l.load_b;
            }
        }
        let mut chosen = None;
        for _ in 0..REDRAWS {
            let coefs: Vec<f64> = parents.iter().map(|_| coefficient(&mut r)).collect();
            let mut w = base.clone();
            for (&u, &b) in parents.iter().zip(&coefs) {
                for (wi, ui) in w.iter_mut().zip(&weights[u]) {
                    *wi += b * ui;
                }
            }
            let explained: f64 = w.iter().map(|x| x * x).sum();
            if explained <= 1.0 - MIN_RESIDUAL {
                chosen = Some((coefs, w, (1.0 - explained).sqrt()));
                break;
            }
            if parents.is_empty() {
                break;
            }
        }
        let (coefs, mut w, sd) = chosen.unwrap_or_else(|| {
            let coefs: Vec<f64> = parents.iter().map(|_| coefficient(&mut r)).collect();
            let mut w = base.clone();
            for (&u, &b) in parents.iter().zip(&coefs) {
                for (wi, ui) in w.iter_mut().zip(&weights[u]) {
                    *wi += b * ui;
                }
            }
            (coefs, w, 1.0)
        });
        w[m + v] = sd;
        noise_sd[v] = sd;
        weights[v] = w;
        for (&u, b) in parents.iter().zip(coefs) {
            coefficients.insert((u, v), b);
        }
    }
    SemSpec {
        coefficients,
        latents,
        noise_sd,
        intercepts: vec![0.0; p],
    }
}

/// Kinds for mixed data: continuous, binary and 3-level with probabilities
/// 1/2, 3/10 and 1/5.
pub fn random_kinds(p: usize, seed: u64) -> Vec<VarKind> {
    let mut r = rng(seed, STREAM_KINDS);
    (0..p)
        .map(|_| match r.random::<f64>() {
            u if u < 0.5 => VarKind::Continuous,
            u if u < 0.8 => VarKind::Binary,
            _ => VarKind::Multinomial(3),
        })
        .collect()
}

/// Default variable names `X1`, `X2`, ...
pub fn var_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("X{i}")).collect()
}

fn topological_order(g: &MixedGraph) -> Vec<usize> {
    let p = g.n_vertices();
    let mut indeg: Vec<usize> = (0..p).map(|v| g.parents(v).len()).collect();
    let mut order = Vec::with_capacity(p);
    let mut done = vec![false; p];
    while order.len() < p {
        let v = (0..p)
            .find(|&v| !done[v] && indeg[v] == 0)
            .expect("directed part is acyclic");
        done[v] = true;
        order.push(v);
        for (c, d) in indeg.iter_mut().enumerate() {
            if g.is_directed(v, c) {
                *d -= 1;
            }
        }
    }
    order
}

/// Linear Gaussian SEM data.
pub fn sample_gaussian(gt: &GroundTruth, spec: &SemSpec, n: usize, seed: u64) -> Dataset {
    let kinds = vec![VarKind::Continuous; gt.admg.n_vertices()];
    sample_mixed(gt, spec, &kinds, n, seed)
}

fn draw_level(r: &mut ChaCha8Rng, eta: &[f64]) -> u32 {
    // reference level 0 has linear predictor 0
    let m = eta.iter().copied().fold(0.0, f64::max);
    let w0 = (-m).exp();
    let total = w0 + eta.iter().map(|e| (e - m).exp()).sum::<f64>();
    let mut u = r.random::<f64>() * total - w0;
    for (j, e) in eta.iter().enumerate() {
        if u < 0.0 {
            return j as u32;
        }
        u -= (e - m).exp();
    }
    eta.len() as u32
}

/// Mixed data: continuous vertices are linear with Gaussian noise; a binary
/// vertex has logit `s`, a `K`-level one baseline-category logits `j·s` for
/// level `j`, where `s` is its intercept plus the weighted sum of its
/// parents and latents. Categorical parents enter through their level code
/// scaled to `[0, 1]`.
pub fn sample_mixed(
    gt: &GroundTruth,
    spec: &SemSpec,
    kinds: &[VarKind],
    n: usize,
    seed: u64,
) -> Dataset {
    let p = gt.admg.n_vertices();
    assert_eq!(kinds.len(), p, "one kind per vertex");
    let mut r = rng(seed, STREAM_DATA);
    let order = topological_order(&gt.admg);
    let parents: Vec<Vec<(usize, f64)>> = (0..p)
        .map(|v| {
            spec.coefficients
                .iter()
                .filter(|(&(_, c), _)| c == v)
                .map(|(&(u, _), &b)| (u, b))
                .collect()
        })
        .collect();
    let mut cont = vec![Vec::new(); p];
    let mut cat = vec![Vec::new(); p];
    let mut value = vec![0.0; p];
    let mut latent = vec![0.0; spec.latents.len()];
    for v in 0..p {
        match kinds[v] {
            VarKind::Continuous => cont[v].reserve(n),
            _ => cat[v].reserve(n),
        }
    }
    for _ in 0..n {
        for l in latent.iter_mut() {
            *l = StandardNormal.sample(&mut r);
        }
        for &v in &order {
            let mut s = spec.intercepts[v];
            for &(u, b) in &parents[v] {
                s += b * value[u];
            }
            for (l, lat) in spec.latents.iter().zip(&latent) {
                if l.a == v {
                    s += l.load_a * lat;
                } else if l.b == v {
                    s += l.load_b * lat;
                }
            }
            match kinds[v] {
                VarKind::Continuous => {
                    let e: f64 = StandardNormal.sample(&mut r);
                    let x = s + spec.noise_sd[v] * e;
                    value[v] = x;
                    cont[v].push(x);
                }
                k => {
                    let levels = k.levels();
                    let eta: Vec<f64> = (1..levels).map(|j| j as f64 * s).collect();
                    let c = draw_level(&mut r, &eta);
                    value[v] = f64::from(c) / (levels - 1) as f64;
                    cat[v].push(c);
                }
            }
        }
    }
    let columns = kinds
        .iter()
        .zip(cont.into_iter().zip(cat))
        .map(|(k, (c, l))| {
            if *k == VarKind::Continuous {
                Column::Continuous(c)
            } else {
                Column::Categorical(l)
            }
        })
        .collect();
    Dataset::new(var_names(p), kinds.to_vec(), columns).expect("sampled columns match their kinds")
}

//! Bayes factor functions for chi-square statistics and the posterior
//! probabilities of (in)dependence built on them.
//!
//! Under the alternative the noncentrality parameter gets a gamma-family
//! nonlocal prior with shape index `r = 1`, which vanishes at zero. Its Bayes
//! factor has the closed form
//!
//! ```text
//! BF10 = (1 + τ²)^-(k/2 + 1) · e^s · (1 + 2s/k),    s = h·τ² / (2(1 + τ²))
//! ```
//!
//! for statistic `h` on `k` degrees of freedom. The prior scale `τ²` is tied
//! to a standardized effect size `ω` through `τ² = c·n·ω²/k`, and the Bayes
//! factor is maximized over a grid of effect sizes.

use libm::{exp, log, log1p};

use crate::vars::CiKey;

/// Effect-size grid and prior settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BffConfig {
    /// Smallest standardized effect size considered.
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_step: f64,
    /// `c` in `τ² = c·n·ω²/k`.
    pub tau_scale: f64,
    /// Prior probability of independence.
    pub prior_h0: f64,
}

impl Default for BffConfig {
    fn default() -> Self {
        BffConfig {
            omega_min: 0.1,
            omega_max: 1.0,
            omega_step: 0.1,
            tau_scale: 0.01,
            prior_h0: 0.5,
        }
    }
}

impl BffConfig {
    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let steps = ((self.omega_max - self.omega_min) / self.omega_step + 1e-9).max(0.0) as usize;
        (0..=steps).map(move |i| self.omega_min + i as f64 * self.omega_step)
    }
}

const LN_BF_CLAMP: f64 = 690.775_527_898_213_7; // ln 1e300

/// `ln BF10` at a fixed prior scale `tau2`.
pub fn ln_bf_at(statistic: f64, df: usize, tau2: f64) -> f64 {
    let k = df as f64;
    let s = statistic * tau2 / (2.0 * (1.0 + tau2));
    -(k / 2.0 + 1.0) * log1p(tau2) + s + log1p(2.0 * s / k)
}

/// `ln BF10` maximized over the effect-size grid, clamped to
/// `[ln 1e-300, ln 1e300]`.
pub fn ln_bayes_factor(statistic: f64, df: usize, n: usize, cfg: &BffConfig) -> f64 {
    let k = df.max(1) as f64;
    let best = cfg
        .grid()
        .map(|w| ln_bf_at(statistic, df.max(1), cfg.tau_scale * n as f64 * w * w / k))
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_nan() {
        LN_BF_CLAMP
    } else {
        best.clamp(-LN_BF_CLAMP, LN_BF_CLAMP)
    }
}

/// Maximized `BF10` for a chi-square statistic.
pub fn bayes_factor_chisq(statistic: f64, df: usize, n: usize, cfg: &BffConfig) -> f64 {
    exp(ln_bayes_factor(statistic, df, n, cfg))
}

/// Posterior probabilities of independence (`p_h0`) and dependence (`p_h1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorPair {
    pub p_h0: f64,
    pub p_h1: f64,
}

/// Posterior from a chi-square statistic on `n` rows.
pub fn posterior(statistic: f64, df: usize, n: usize, cfg: &BffConfig) -> PosteriorPair {
    posterior_from_ln_bf(ln_bayes_factor(statistic, df, n, cfg), cfg.prior_h0)
}

/// Posterior given `ln BF10` and the prior probability of independence.
pub fn posterior_from_ln_bf(ln_bf: f64, prior_h0: f64) -> PosteriorPair {
    let log_odds = ln_bf + log(1.0 - prior_h0) - log(prior_h0);
    let p_h1 = 1.0 / (1.0 + exp(-log_odds));
    let p_h0 = 1.0 / (1.0 + exp(log_odds));
    PosteriorPair { p_h0, p_h1 }
}

/// Independence or dependence claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HypKind {
    Independence,
    Dependence,
}

/// An (in)dependence hypothesis about the data distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    pub key: CiKey,
    pub kind: HypKind,
}

impl Hypothesis {
    /// Posterior probability of this hypothesis given the posterior of
    /// independence for its key.
    pub fn probability(&self, p_indep: f64) -> f64 {
        match self.kind {
            HypKind::Independence => p_indep,
            HypKind::Dependence => 1.0 - p_indep,
        }
    }
}

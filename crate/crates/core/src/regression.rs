//! Maximum-likelihood fits of nested regression models: Gaussian OLS for
//! continuous responses, baseline-category logit (binary and multinomial)
//! for categorical ones. Categorical predictors are one-hot encoded with
//! level 0 as the reference.

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log};

use crate::citest::{CiError, Column, Dataset, VarKind};
use crate::linalg::solve_spd;
use crate::vars::VarSet;

/// Relative log-likelihood change below which Newton iterations stop.
pub const NEWTON_TOL: f64 = 1e-8;
/// Newton iteration budget.
pub const NEWTON_MAX_ITER: usize = 100;
/// A fitted coefficient beyond this magnitude is read as separation.
const SEPARATION_COEF: f64 = 30.0;

/// Maximized log-likelihood and number of free parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub loglik: f64,
    pub params: usize,
}

/// Row-major design matrix: intercept, then each predictor's columns.
fn design(d: &Dataset, predictors: VarSet) -> (Vec<f64>, usize) {
    let w = 1 + predictors
        .iter()
        .map(|v| d.kind(v).columns())
        .sum::<usize>();
    let n = d.n();
    let mut x = vec![0.0; n * w];
    for i in 0..n {
        x[i * w] = 1.0;
    }
    let mut col = 1;
    for v in predictors {
        match d.column(v) {
            Column::Continuous(vals) => {
                // Standardized: likelihoods are unaffected (the intercept
                // absorbs the shift), conditioning and the separation
                // threshold become scale-free.
                let nf = n as f64;
                let mean = vals.iter().sum::<f64>() / nf;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
                let sd = if var > 0.0 { libm::sqrt(var) } else { 1.0 };
                for i in 0..n {
                    x[i * w + col] = (vals[i] - mean) / sd;
                }
                col += 1;
            }
            Column::Categorical(codes) => {
                let k = d.kind(v).columns();
                for i in 0..n {
                    let c = codes[i] as usize;
                    if c > 0 {
                        x[i * w + col + c - 1] = 1.0;
                    }
                }
                col += k;
            }
        }
    }
    (x, w)
}

fn check_predictors(d: &Dataset, response: usize, predictors: VarSet) -> Result<(), CiError> {
    if predictors.contains(response) {
        return Err(CiError::Precondition("response among its own predictors"));
    }
    if response >= d.p() || predictors.iter().any(|v| v >= d.p()) {
        return Err(CiError::Precondition("variable out of range"));
    }
    Ok(())
}

/// Gaussian linear regression with the MLE variance.
pub fn fit_linear(d: &Dataset, response: usize, predictors: VarSet) -> Result<Fit, CiError> {
    check_predictors(d, response, predictors)?;
    let Column::Continuous(y) = d.column(response) else {
        return Err(CiError::Precondition(
            "linear fit needs a continuous response",
        ));
    };
    let (x, w) = design(d, predictors);
    let n = d.n();
    if n <= w {
        return Err(CiError::Precondition("too few rows for the model"));
    }
    let mut xtx = vec![0.0; w * w];
    let mut xty = vec![0.0; w];
    for i in 0..n {
        let row = &x[i * w..(i + 1) * w];
        for a in 0..w {
            xty[a] += row[a] * y[i];
            for b in 0..=a {
                xtx[a * w + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..w {
        for b in 0..a {
            xtx[b * w + a] = xtx[a * w + b];
        }
    }
    let beta = solve_spd(&xtx, &xty, w).ok_or(CiError::Degenerate("singular normal equations"))?;
    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = x[i * w..(i + 1) * w]
                .iter()
                .zip(&beta)
                .map(|(a, b)| a * b)
                .sum();
            (y[i] - fit) * (y[i] - fit)
        })
        .sum();
    let sigma2 = (rss / n as f64).max(f64::MIN_POSITIVE);
    let nf = n as f64;
    Ok(Fit {
        loglik: -nf / 2.0 * (log(2.0 * core::f64::consts::PI * sigma2) + 1.0),
        params: w + 1,
    })
}

/// Logistic regression for a binary response.
pub fn fit_logistic(d: &Dataset, response: usize, predictors: VarSet) -> Result<Fit, CiError> {
    if d.kind(response) != VarKind::Binary {
        return Err(CiError::Precondition(
            "logistic fit needs a binary response",
        ));
    }
    fit_categorical(d, response, predictors)
}

/// Baseline-category multinomial logit.
pub fn fit_multinomial(d: &Dataset, response: usize, predictors: VarSet) -> Result<Fit, CiError> {
    if !matches!(d.kind(response), VarKind::Multinomial(_)) {
        return Err(CiError::Precondition(
            "multinomial fit needs a multinomial response",
        ));
    }
    fit_categorical(d, response, predictors)
}

/// Dispatches on the response kind.
pub fn fit(d: &Dataset, response: usize, predictors: VarSet) -> Result<Fit, CiError> {
    match d.kind(response) {
        VarKind::Continuous => fit_linear(d, response, predictors),
        _ => fit_categorical(d, response, predictors),
    }
}

/// Per-row class log-probabilities into `lp` for linear predictors `eta`
/// (reference class first, fixed at zero).
fn log_probs(eta: &[f64], lp: &mut [f64]) {
    lp[0] = 0.0;
    lp[1..].copy_from_slice(eta);
    let m = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = lp.iter().map(|v| exp(v - m)).sum();
    let lse = m + log(s);
    for v in lp.iter_mut() {
        *v -= lse;
    }
}

fn fit_categorical(d: &Dataset, response: usize, predictors: VarSet) -> Result<Fit, CiError> {
    check_predictors(d, response, predictors)?;
    let Column::Categorical(y) = d.column(response) else {
        return Err(CiError::Precondition(
            "categorical fit needs a categorical response",
        ));
    };
    let k = d.kind(response).levels();
    let n = d.n();
    let mut counts = vec![0usize; k];
    for &c in y {
        counts[c as usize] += 1;
    }
    if counts.contains(&0) {
        return Err(CiError::Precondition("response level absent from the data"));
    }
    let (x, w) = design(d, predictors);
    let m = k - 1;
    let dim = m * w;
    if n <= dim {
        return Err(CiError::Precondition("too few rows for the model"));
    }

    // start from the intercept-only solution
    let mut beta = vec![0.0; dim];
    for j in 0..m {
        beta[j * w] = log(counts[j + 1] as f64 / counts[0] as f64);
    }

    let loglik = |beta: &[f64]| -> f64 {
        let mut eta = vec![0.0; m];
        let mut lp = vec![0.0; k];
        let mut ll = 0.0;
        for i in 0..n {
            let row = &x[i * w..(i + 1) * w];
            for j in 0..m {
                eta[j] = row
                    .iter()
                    .zip(&beta[j * w..(j + 1) * w])
                    .map(|(a, b)| a * b)
                    .sum();
            }
            log_probs(&eta, &mut lp);
            ll += lp[y[i] as usize];
        }
        ll
    };

    let mut ll = loglik(&beta);
    let mut eta = vec![0.0; m];
    let mut lp = vec![0.0; k];
    for iter in 0..NEWTON_MAX_ITER {
        let mut grad = vec![0.0; dim];
        let mut hess = vec![0.0; dim * dim];
        for i in 0..n {
            let row = &x[i * w..(i + 1) * w];
            for j in 0..m {
                eta[j] = row
                    .iter()
                    .zip(&beta[j * w..(j + 1) * w])
                    .map(|(a, b)| a * b)
                    .sum();
            }
            log_probs(&eta, &mut lp);
            let yi = y[i] as usize;
            for j in 0..m {
                let mu_j = exp(lp[j + 1]);
                let resid = f64::from(u8::from(yi == j + 1)) - mu_j;
                for a in 0..w {
                    grad[j * w + a] += row[a] * resid;
                }
                for l in 0..=j {
                    let mu_l = exp(lp[l + 1]);
                    let wt = if l == j {
                        mu_j * (1.0 - mu_j)
                    } else {
                        -mu_j * mu_l
                    };
                    if wt == 0.0 {
                        continue;
                    }
                    for a in 0..w {
                        let ra = row[a] * wt;
                        for b in 0..w {
                            hess[(j * w + a) * dim + l * w + b] += ra * row[b];
                        }
                    }
                }
            }
        }
        for r in 0..dim {
            for c in r + 1..dim {
                hess[r * dim + c] = hess[c * dim + r];
            }
        }
        let Some(step) = solve_spd(&hess, &grad, dim) else {
            return Err(if max_abs(&beta) > SEPARATION_COEF {
                CiError::FitFailure {
                    iterations: iter,
                    separation: true,
                }
            } else {
                CiError::Degenerate("singular information matrix")
            });
        };
        // step halving until the likelihood does not decrease
        let mut t = 1.0;
        let mut next = beta.clone();
        let mut next_ll;
        loop {
            for (nb, (b, s)) in next.iter_mut().zip(beta.iter().zip(&step)) {
                *nb = b + t * s;
            }
            next_ll = loglik(&next);
            if next_ll >= ll - 1e-12 * ll.abs() || t < 1e-10 {
                break;
            }
            t *= 0.5;
        }
        let delta = (next_ll - ll).abs();
        beta = next;
        let prev = ll;
        ll = next_ll;
        if max_abs(&beta) > SEPARATION_COEF {
            return Err(CiError::FitFailure {
                iterations: iter + 1,
                separation: true,
            });
        }
        if delta <= NEWTON_TOL * prev.abs().max(1e-300) {
            return Ok(Fit {
                loglik: ll,
                params: dim,
            });
        }
    }
    Err(CiError::FitFailure {
        iterations: NEWTON_MAX_ITER,
        separation: false,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

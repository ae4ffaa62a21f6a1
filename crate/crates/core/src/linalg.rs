//! Small dense symmetric positive-definite solves.

use alloc::vec::Vec;

/// Solves `a x = b` for symmetric positive-definite `a` (row-major `w x w`)
/// by Cholesky. Retries once with a relative diagonal jitter of 1e-10 before
/// giving up.
pub(crate) fn solve_spd(a: &[f64], b: &[f64], w: usize) -> Option<Vec<f64>> {
    if let Some(x) = cholesky_solve(a, b, w, 0.0) {
        return Some(x);
    }
    let scale = (0..w)
        .map(|i| a[i * w + i].abs())
        .fold(0.0, f64::max)
        .max(1.0);
    cholesky_solve(a, b, w, 1e-10 * scale)
}

fn cholesky_solve(a: &[f64], b: &[f64], w: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = alloc::vec![0.0; w * w];
    let max_diag = (0..w).map(|i| a[i * w + i].abs()).fold(0.0, f64::max);
    let floor = max_diag * 1e-13;
    for i in 0..w {
        for j in 0..=i {
            let mut s = a[i * w + j];
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[i * w + k] * l[j * w + k];
            }
            if i == j {
                #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
                if !(s > floor) {
                    return None;
                }
                l[i * w + i] = libm::sqrt(s);
            } else {
                l[i * w + j] = s / l[j * w + j];
            }
        }
    }
    let mut y = alloc::vec![0.0; w];
    for i in 0..w {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * w + k] * y[k];
        }
        y[i] = s / l[i * w + i];
    }
    let mut x = alloc::vec![0.0; w];
    for i in (0..w).rev() {
        let mut s = y[i];
        for k in i + 1..w {
            s -= l[k * w + i] * x[k];
        }
        x[i] = s / l[i * w + i];
    }
    Some(x)
}

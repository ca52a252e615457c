//! Spherical Bessel functions of the first kind.

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: usize = 50;

/// `j_l(x)` for `0 <= l <= 50`, `x >= 0`.
///
/// Power series for `x <= 1`, forward recurrence when `x >= l` (stable in
/// that regime), Miller's backward recurrence otherwise.
pub fn spherical_bessel(l: usize, x: f64) -> Result<f64> {
    if l > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "spherical Bessel order {l} exceeds {MAX_ORDER}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Parameter(format!(
            "spherical Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(eval(l, x))
}

fn eval(l: usize, x: f64) -> f64 {
    if x <= 1.0 {
        return series(l, x);
    }
    if x >= l as f64 {
        return upward(l, x);
    }
    miller(l, x)
}

fn series(l: usize, x: f64) -> f64 {
    // x^l / (2l+1)!! · Σ_k (-x²/2)^k / (k! (2l+3)(2l+5)…(2l+2k+1))
    let mut lead = 1.0;
    for k in 0..l {
        lead *= x / (2 * k + 3) as f64;
    }
    let h = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= h / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn upward(l: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn miller(l: usize, x: f64) -> f64 {
    let start = l + 20 + (x as usize) + ((40 * l) as f64).sqrt() as usize;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut target = 0.0;
    let mut j1_trial = 0.0;
    for k in (1..=start).rev() {
        let prev = (2 * k + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == l {
            target = cur;
        }
        if k == 2 {
            j1_trial = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            target *= 1e-250;
            j1_trial *= 1e-250;
        }
    }
    // cur now holds the unnormalized j_0
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    if j0.abs() >= j1.abs() {
        target * j0 / cur
    } else {
        target * j1 / j1_trial
    }
}

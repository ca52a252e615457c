use std::f64::consts::PI;

use serde::Serialize;

use super::function::BallFunction;
use crate::error::{param, Result};

/// Entropies of one function in the unit ball, in units where the Born
/// entropy is `π‖f‖²`.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub d: usize,
    /// `π∫f²`.
    pub born: f64,
    /// `π∫(1-r²)f²`.
    pub parabolic: f64,
    /// `π∫(1-r²)|∇f|²`.
    pub legendre: f64,
    /// `π∫[(1-r²)|∇f|² + r²f²]`.
    pub prolate: f64,
    /// `|prolate + parabolic − legendre − born|`.
    pub balance_residual: f64,
    /// `1e-10 (born + legendre + 1)`.
    pub tolerance: f64,
    pub balanced: bool,
}

/// The four ball integrals with radius `radius` and band factor `band²`
/// in front of `r²f²`.
pub(crate) struct Integrals {
    pub born: f64,
    pub parabolic: f64,
    pub legendre: f64,
    pub prolate: f64,
}

pub(crate) fn integrals(f: &BallFunction, radius: f64, band: f64) -> Result<Integrals> {
    let r2 = radius * radius;
    let b2 = band * band;
    let mut out = Integrals {
        born: 0.0,
        parabolic: 0.0,
        legendre: 0.0,
        prolate: 0.0,
    };
    for (t, w) in f.ball_rule(radius)? {
        let s = f.sample(t);
        let t2 = t * t;
        let f2 = s.value * s.value;
        out.born += w * f2;
        out.parabolic += w * (r2 - t2) * f2;
        out.legendre += w * (r2 - t2) * s.grad_sq;
        out.prolate += w * ((r2 - t2) * s.grad_sq + b2 * t2 * f2);
    }
    out.born *= PI;
    out.parabolic *= PI;
    out.legendre *= PI;
    out.prolate *= PI;
    Ok(out)
}

pub fn entropy_report(f: &BallFunction) -> Result<EntropyReport> {
    let i = integrals(f, 1.0, 1.0)?;
    let residual = (i.prolate + i.parabolic - i.legendre - i.born).abs();
    let tolerance = 1e-10 * (i.born + i.legendre + 1.0);
    Ok(EntropyReport {
        d: f.d,
        born: i.born,
        parabolic: i.parabolic,
        legendre: i.legendre,
        prolate: i.prolate,
        balance_residual: residual,
        tolerance,
        balanced: residual < tolerance,
    })
}

/// Entropy relation on the ball of radius `λ` with band radius `λ'`.
///
/// With `W = ∇(λ²−r²)∇ − λ'²r²`, `L = ∇(λ²−r²)∇` and `M = λ² − r²`, the
/// certified identity is
/// `−π(f,Wf) + λ'²π(f,Mf) = −π(f,Lf) + λ²λ'²π‖f‖²`.
/// `swapped_residual` measures the variant with the `M` and `‖f‖²` terms
/// exchanged between the two sides, which does not hold in general.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralRadiusReport {
    pub d: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// Equivalent unit-ball bandwidth `λλ'`.
    pub c: f64,
    /// `−π(f, Wf)` on the ball of radius `λ`.
    pub prolate: f64,
    /// `−π(f, Lf)`.
    pub legendre: f64,
    /// `π(f, Mf)`.
    pub parabolic: f64,
    /// `π‖f‖²`.
    pub born: f64,
    pub residual: f64,
    pub swapped_residual: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// `|−π(δ_λ f, W δ_λ f) − (−π(f, W_c f))|` relative, where the right
    /// side is on the unit ball with bandwidth `c = λλ'`.
    pub dilation_covariance: f64,
}

pub fn general_radius_report(
    f: &BallFunction,
    lambda: f64,
    lambda_prime: f64,
) -> Result<GeneralRadiusReport> {
    for (name, v) in [("lambda", lambda), ("lambda_prime", lambda_prime)] {
        if !(v > 0.0) || !v.is_finite() {
            return param(format!("{name} must be finite and > 0, got {v}"));
        }
    }
    let i = integrals(f, lambda, lambda_prime)?;
    let (l2, lp2) = (lambda * lambda, lambda_prime * lambda_prime);
    let lhs = i.prolate + lp2 * i.parabolic;
    let rhs = i.legendre + l2 * lp2 * i.born;
    let residual = (lhs - rhs).abs();
    let swapped = (i.prolate + l2 * lp2 * i.born - i.legendre - lp2 * i.parabolic).abs();
    let tolerance =
        1e-10 * (i.prolate.abs() + lp2 * i.parabolic.abs() + i.legendre + l2 * lp2 * i.born + 1.0);

    let c = lambda * lambda_prime;
    let unit = integrals(f, 1.0, c)?;
    let moved = integrals(&f.dilated(lambda)?, lambda, lambda_prime)?;
    let dilation_covariance = (moved.prolate - unit.prolate).abs() / unit.prolate.abs().max(1e-300);
    Ok(GeneralRadiusReport {
        d: f.d,
        lambda,
        lambda_prime,
        c,
        prolate: i.prolate,
        legendre: i.legendre,
        parabolic: i.parabolic,
        born: i.born,
        residual,
        swapped_residual: swapped,
        tolerance,
        holds: residual < tolerance,
        dilation_covariance,
    })
}

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{param, Result};
use crate::numerics::{gauss_rule, QuadratureRule, WeightKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `sin(c(x-y)) / (π(x-y))` on `(-1, 1)`.
    Angle,
    /// `sqrt(c/2π) e^{-icxy}` on `(-1, 1)`.
    TruncatedFourier,
    /// Radial Bessel kernel of one angular sector on `(0, 1)`.
    SectorHankel,
}

/// Nyström discretization `sqrt(w_i) K(x_i, x_j) sqrt(w_j)`.
///
/// For the truncated Fourier transform `matrix` is the real part and `imag`
/// the imaginary part.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    pub kind: KernelKind,
    pub c: f64,
    pub rule: QuadratureRule,
    pub matrix: DMatrix<f64>,
    pub imag: Option<DMatrix<f64>>,
    /// `(d, ell)` of a sector kernel.
    pub sector: Option<(usize, usize)>,
}

impl KernelOperator {
    pub fn n_quad(&self) -> usize {
        self.rule.len()
    }

    /// `sqrt(w_i)` at every node; maps function samples into the symmetric
    /// coordinates the matrix acts on.
    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.rule.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `F*F` for the Fourier kernel, the matrix itself otherwise squared.
    pub fn gram(&self) -> DMatrix<f64> {
        let re = &self.matrix;
        match &self.imag {
            Some(im) => re.transpose() * re + im.transpose() * im,
            None => re.transpose() * re,
        }
    }
}

fn check(c: f64, n_quad: usize) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return param(format!("bandwidth must be finite and > 0, got {c}"));
    }
    if n_quad < 8 {
        return param(format!("need at least 8 quadrature points, got {n_quad}"));
    }
    Ok(())
}

pub(crate) fn sinc_kernel(c: f64, u: f64) -> f64 {
    let z = c * u;
    if z.abs() < 1e-4 {
        // sin z / z by its Taylor polynomial
        let z2 = z * z;
        c / PI * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0))
    } else {
        z.sin() / (PI * u)
    }
}

pub fn angle_operator_nystrom(c: f64, n_quad: usize) -> Result<KernelOperator> {
    check(c, n_quad)?;
    let rule = gauss_rule(WeightKind::Legendre, n_quad)?;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let x = &rule.nodes;
    let matrix = DMatrix::from_fn(n_quad, n_quad, |i, j| {
        sw[i] * sinc_kernel(c, x[i] - x[j]) * sw[j]
    });
    Ok(KernelOperator {
        kind: KernelKind::Angle,
        c,
        rule,
        matrix,
        imag: None,
        sector: None,
    })
}

pub fn truncated_fourier_nystrom(c: f64, n_quad: usize) -> Result<KernelOperator> {
    check(c, n_quad)?;
    let rule = gauss_rule(WeightKind::Legendre, n_quad)?;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let x = &rule.nodes;
    let norm = (c / (2.0 * PI)).sqrt();
    let mut re = DMatrix::zeros(n_quad, n_quad);
    let mut im = DMatrix::zeros(n_quad, n_quad);
    for i in 0..n_quad {
        for j in 0..n_quad {
            let (s, co) = (c * x[i] * x[j]).sin_cos();
            let scale = norm * sw[i] * sw[j];
            re[(i, j)] = scale * co;
            im[(i, j)] = -scale * s;
        }
    }
    Ok(KernelOperator {
        kind: KernelKind::TruncatedFourier,
        c,
        rule,
        matrix: re,
        imag: Some(im),
        sector: None,
    })
}

/// Projection onto even functions in the node ordering of a symmetric rule
/// (`x_i = -x_{n-1-i}`).
pub fn even_projector(n_quad: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n_quad, n_quad, |i, j| {
        let mut v = 0.0;
        if i == j {
            v += 0.5;
        }
        if i + j == n_quad - 1 {
            v += 0.5;
        }
        v
    })
}

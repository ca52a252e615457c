use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{param, Error, Result};
use crate::numerics::{gauss_rule, normalized_legendre_table, WeightKind};
use crate::prolate_nd::forms::MAX_RADIAL_BASIS;
use crate::prolate_nd::{RadialBasis, SpectralSector};

/// Highest polynomial degree accepted in a Gaussian-times-polynomial.
pub const MAX_POLY_DEGREE: usize = 32;
/// Largest dimension accepted for ball functions.
pub const MAX_DIMENSION: usize = 32;

/// Shape of a function on the unit ball.
///
/// Closed forms in `d >= 2` are radial, with `t = r`; in `d = 1` they are
/// functions of `t = x ∈ (-1, 1)`. Sector profiles carry a unit spherical
/// harmonic of degree `ell` (for `d = 1`, `ell` is the parity).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// Indicator of the ball; its gradient is taken in the form sense (zero).
    ChiB,
    /// `e^{-a t²}`.
    Gaussian { a: f64 },
    /// `p(t) e^{-a t²}` with `p` in monomial coefficients, lowest first.
    GaussianPoly { coeffs: Vec<f64>, a: f64 },
    /// `Σ c_j P̃_j(x)` with `L²(-1,1)`-normalized Legendre polynomials; `d = 1`.
    Legendre { coeffs: Vec<f64> },
    /// `Σ c_n u_n(r) Y_ℓ` in the orthonormal radial basis of the sector.
    Sector { ell: usize, coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct BallFunction {
    pub d: usize,
    pub profile: Profile,
    /// Constant added to the profile (used by the zero-mean projection).
    pub offset: f64,
    /// `δ_s f(x) = s^{-d/2} f(x/s)`; 1 for the undilated function.
    pub dilation: f64,
    #[serde(skip)]
    basis: Option<RadialBasis>,
}

/// Value and `|∇f|²` at one point of the ball.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub value: f64,
    pub grad_sq: f64,
}

impl BallFunction {
    fn build(d: usize, profile: Profile) -> Result<Self> {
        if d == 0 || d > MAX_DIMENSION {
            return param(format!("dimension must be in 1..={MAX_DIMENSION}, got {d}"));
        }
        let mut basis = None;
        match &profile {
            Profile::ChiB => {}
            Profile::Gaussian { a } => check_width(*a)?,
            Profile::GaussianPoly { coeffs, a } => {
                check_width(*a)?;
                check_coeffs(coeffs, MAX_POLY_DEGREE + 1)?;
            }
            Profile::Legendre { coeffs } => {
                if d != 1 {
                    return Err(Error::Unsupported(
                        "Legendre series are one-dimensional; use a sector profile".into(),
                    ));
                }
                check_coeffs(coeffs, MAX_RADIAL_BASIS)?;
            }
            Profile::Sector { ell, coeffs } => {
                check_coeffs(coeffs, MAX_RADIAL_BASIS)?;
                let sector = SpectralSector::new(d, *ell, 1.0)?;
                basis = Some(RadialBasis::new(sector, coeffs.len()));
            }
        }
        Ok(Self {
            d,
            profile,
            offset: 0.0,
            dilation: 1.0,
            basis,
        })
    }

    pub fn chi_b(d: usize) -> Result<Self> {
        Self::build(d, Profile::ChiB)
    }

    pub fn gaussian(d: usize, a: f64) -> Result<Self> {
        Self::build(d, Profile::Gaussian { a })
    }

    pub fn gaussian_poly(d: usize, coeffs: Vec<f64>, a: f64) -> Result<Self> {
        Self::build(d, Profile::GaussianPoly { coeffs, a })
    }

    pub fn legendre_series(coeffs: Vec<f64>) -> Result<Self> {
        Self::build(1, Profile::Legendre { coeffs })
    }

    /// `P̃_n` in one dimension, the radial basis element `u_n` of the
    /// `ell = 0` sector otherwise. Both are eigenfunctions of the Legendre
    /// operator.
    pub fn legendre_mode(d: usize, n: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        if d == 1 {
            Self::legendre_series(coeffs)
        } else {
            Self::sector(d, 0, coeffs)
        }
    }

    pub fn sector(d: usize, ell: usize, coeffs: Vec<f64>) -> Result<Self> {
        Self::build(d, Profile::Sector { ell, coeffs })
    }

    /// `δ_s f`, unitary on `L²`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return param(format!("dilation must be finite and > 0, got {s}"));
        }
        Ok(Self {
            dilation: self.dilation * s,
            ..self.clone()
        })
    }

    pub(crate) fn with_offset(&self, offset: f64) -> Self {
        Self {
            offset,
            ..self.clone()
        }
    }

    pub(crate) fn is_sector(&self) -> bool {
        matches!(self.profile, Profile::Sector { .. })
    }

    fn centrifugal(&self) -> f64 {
        match &self.profile {
            Profile::Sector { ell, .. } => {
                let (l, d) = (*ell as f64, self.d as f64);
                l * (l + d - 2.0)
            }
            _ => 0.0,
        }
    }

    /// Undilated profile value and derivative at `t`.
    fn profile_at(&self, t: f64) -> (f64, f64) {
        match &self.profile {
            Profile::ChiB => (1.0, 0.0),
            Profile::Gaussian { a } => {
                let g = (-a * t * t).exp();
                (g, -2.0 * a * t * g)
            }
            Profile::GaussianPoly { coeffs, a } => {
                let g = (-a * t * t).exp();
                let (mut p, mut dp) = (0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    dp = dp * t + p;
                    p = p * t + c;
                }
                (p * g, (dp - 2.0 * a * t * p) * g)
            }
            Profile::Legendre { coeffs } => {
                let (v, dv) = normalized_legendre_table(coeffs.len(), t);
                coeffs.iter().enumerate().fold((0.0, 0.0), |(s, ds), (j, &c)| {
                    (s + c * v[j], ds + c * dv[j])
                })
            }
            Profile::Sector { coeffs, .. } => {
                let basis = self.basis.as_ref().expect("sector basis built at construction");
                let tab = basis.table(t, coeffs.len());
                coeffs.iter().enumerate().fold((0.0, 0.0), |(s, ds), (n, &c)| {
                    (s + c * tab.u[n], ds + c * tab.du[n])
                })
            }
        }
    }

    pub(crate) fn sample(&self, t: f64) -> Sample {
        let s = self.dilation;
        let amp = s.powf(-(self.d as f64) / 2.0);
        let (v, dv) = self.profile_at(t / s);
        let value = amp * v + self.offset;
        let grad = amp * dv / s;
        let mut grad_sq = grad * grad;
        let cf = self.centrifugal();
        if cf != 0.0 {
            grad_sq += cf * (amp * v / t).powi(2);
        }
        Sample { value, grad_sq }
    }

    /// Quadrature rule `(t_q, w_q)` over the ball of radius `radius`, with the
    /// volume element folded into the weights.
    pub(crate) fn ball_rule(&self, radius: f64) -> Result<Vec<(f64, f64)>> {
        let degree = match &self.profile {
            Profile::Legendre { coeffs } => coeffs.len(),
            Profile::Sector { ell, coeffs } => 2 * coeffs.len() + ell + self.d,
            _ => 0,
        };
        let m = 200.max(degree + 8);
        let gl = gauss_rule(WeightKind::Legendre, m)?;
        let full_line = self.d == 1 && !self.is_sector();
        let surface = if self.d >= 2 && !self.is_sector() {
            sphere_area(self.d)
        } else {
            1.0
        };
        Ok(gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&x, &w)| {
                if full_line {
                    (radius * x, radius * w)
                } else {
                    let r = radius * (1.0 + x) / 2.0;
                    (r, surface * radius / 2.0 * w * r.powi(self.d as i32 - 1))
                }
            })
            .collect())
    }

    /// Mean over the ball, in the coordinates of the profile (the constant
    /// mode). Harmonics of degree `ell >= 1` have mean zero.
    pub(crate) fn mean(&self) -> Result<f64> {
        if matches!(self.profile, Profile::Sector { ell, .. } if ell > 0) {
            return Ok(0.0);
        }
        let rule = self.ball_rule(1.0)?;
        let integral: f64 = rule.iter().map(|&(t, w)| w * self.sample(t).value).sum();
        let volume: f64 = rule.iter().map(|&(_, w)| w).sum();
        Ok(integral / volume)
    }
}

fn check_width(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return param(format!("Gaussian width parameter must be finite and > 0, got {a}"));
    }
    Ok(())
}

fn check_coeffs(c: &[f64], max: usize) -> Result<()> {
    if c.is_empty() || c.len() > max {
        return param(format!("need between 1 and {max} coefficients, got {}", c.len()));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Data("coefficients must be finite".into()));
    }
    Ok(())
}

/// `|S^{d-1}| = 2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit ball in `ℝ^d`.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d) / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rule_measures_volume() {
        for d in 1..=7 {
            let f = BallFunction::chi_b(d).unwrap();
            let vol: f64 = f.ball_rule(1.0).unwrap().iter().map(|p| p.1).sum();
            assert!((vol - ball_volume(d)).abs() < 1e-13 * vol);
        }
    }

    #[test]
    fn polynomial_profile_derivative() {
        let f = BallFunction::gaussian_poly(1, vec![1.0, -2.0, 0.5], 0.7).unwrap();
        let (t, h) = (0.3, 1e-6);
        let fd = (f.sample(t + h).value - f.sample(t - h).value) / (2.0 * h);
        assert!((fd * fd - f.sample(t).grad_sq).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BallFunction::gaussian(2, -1.0).is_err());
        assert!(BallFunction::gaussian(0, 1.0).is_err());
        assert!(matches!(
            BallFunction::legendre_series(vec![1.0]).map(|f| f.d),
            Ok(1)
        ));
        assert!(matches!(
            BallFunction::build(2, Profile::Legendre { coeffs: vec![1.0] }),
            Err(Error::Unsupported(_))
        ));
        assert!(BallFunction::sector(1, 2, vec![1.0]).is_err());
        assert!(BallFunction::gaussian_poly(1, vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn dilation_is_unitary() {
        let f = BallFunction::gaussian(3, 2.0).unwrap();
        let g = f.dilated(0.5).unwrap();
        let norm = |h: &BallFunction, r: f64| -> f64 {
            h.ball_rule(r).unwrap().iter().map(|&(t, w)| w * h.sample(t).value.powi(2)).sum()
        };
        // all of the mass of g sits in B_{1/2} up to a Gaussian tail
        let full = norm(&f, 6.0);
        assert!((norm(&g, 3.0) - full).abs() < 1e-12 * full);
    }
}

use nalgebra::DMatrix;

use super::sector::{RadialBasis, SpectralSector};
use crate::error::{param, Result};
use crate::numerics::{gauss_rule, generalized_sym_eig, SymmetricSpectrum, WeightKind};

/// Largest supported basis size for the radial forms.
pub const MAX_RADIAL_BASIS: usize = 200;

/// Galerkin matrices of one sector in the orthonormal radial basis.
///
/// All integrals are over `(0, 1)` against `r^{d-1} dr`.
#[derive(Debug, Clone)]
pub struct RadialForms {
    pub sector: SpectralSector,
    pub size: usize,
    pub mass: DMatrix<f64>,
    /// `∫(1-r²)[u'v' + ℓ(ℓ+d-2)uv/r²]`.
    pub l_form: DMatrix<f64>,
    /// `∫(1-r²)uv`.
    pub m_form: DMatrix<f64>,
    /// `∫r²uv`.
    pub r2_form: DMatrix<f64>,
    /// `l_form + c² r2_form`.
    pub w_form: DMatrix<f64>,
}

impl RadialForms {
    pub fn basis(&self) -> RadialBasis {
        RadialBasis::new(self.sector, self.size)
    }

    /// Largest entry of `W − L − c²(mass − M)`.
    pub fn identity_residual(&self) -> f64 {
        let c2 = self.sector.c * self.sector.c;
        (&self.w_form - &self.l_form - (&self.mass - &self.m_form) * c2).amax()
    }

    pub fn l_spectrum(&self) -> Result<SymmetricSpectrum> {
        generalized_sym_eig(&self.l_form, &self.mass)
    }

    pub fn w_spectrum(&self) -> Result<SymmetricSpectrum> {
        generalized_sym_eig(&self.w_form, &self.mass)
    }
}

/// Assembles the four forms with a Gauss–Jacobi rule in `s = 2r² - 1`.
///
/// After the substitution every integrand is a polynomial times
/// `(1 + s)^γ`, with `γ = β - 1` when `ell >= 1` (to absorb `1/r²`) and
/// `γ = β` otherwise, so `N + 3` points integrate all entries exactly.
pub fn assemble_radial_forms(sector: SpectralSector, n: usize) -> Result<RadialForms> {
    if n < 4 {
        return param(format!("radial basis size must be at least 4, got {n}"));
    }
    if n > MAX_RADIAL_BASIS {
        return param(format!(
            "radial basis size {n} exceeds {MAX_RADIAL_BASIS}"
        ));
    }
    let basis = RadialBasis::new(sector, n);
    let beta = sector.jacobi_beta();
    let ell = sector.ell as f64;
    let gamma = if sector.ell >= 1 { beta - 1.0 } else { beta };
    let rule = gauss_rule(WeightKind::Jacobi { alpha: 0.0, beta: gamma }, n + 3)?;
    let norm2 = basis.norm() * basis.norm();
    let centrifugal = sector.centrifugal();

    let mut mass = DMatrix::zeros(n, n);
    let mut l_form = DMatrix::zeros(n, n);
    let mut m_form = DMatrix::zeros(n, n);
    let mut r2_form = DMatrix::zeros(n, n);
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 0.5 * (1.0 + s);
        let sigma = if sector.ell >= 1 { 1.0 } else { 1.0 / t };
        let wt = w * 2f64.powf(-gamma) / 4.0 * norm2 * sigma;
        let tab = basis.recurrence().eval(n, s);
        let a: Vec<f64> = (0..n).map(|k| ell * tab.p[k] + 4.0 * t * tab.dp[k]).collect();
        for i in 0..n {
            for j in 0..=i {
                let pp = tab.p[i] * tab.p[j];
                mass[(i, j)] += wt * t * pp;
                l_form[(i, j)] += wt * (1.0 - t) * (a[i] * a[j] + centrifugal * pp);
                m_form[(i, j)] += wt * (1.0 - t) * t * pp;
                r2_form[(i, j)] += wt * t * t * pp;
            }
        }
    }
    for m in [&mut mass, &mut l_form, &mut m_form, &mut r2_form] {
        m.fill_upper_triangle_with_lower_triangle();
    }
    let c2 = sector.c * sector.c;
    let w_form = &l_form + &r2_form * c2;
    Ok(RadialForms {
        sector,
        size: n,
        mass,
        l_form,
        m_form,
        r2_form,
        w_form,
    })
}

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::balance::integrals;
use super::function::BallFunction;
use crate::error::{param, Result};
use crate::numerics::generalized_sym_eig;
use crate::prolate_nd::{assemble_radial_forms, SpectralSector};

/// Mean below which a one-dimensional momentum datum counts as zero-mean.
pub const MEAN_TOLERANCE: f64 = 1e-14;

/// Initial data `Φ = f`, `∂_tΦ = g` of a free wave in `ℝ^d`.
#[derive(Debug, Clone)]
pub struct CauchyData {
    pub f: BallFunction,
    pub g: BallFunction,
    pub d: usize,
}

impl CauchyData {
    pub fn new(f: BallFunction, g: BallFunction) -> Result<Self> {
        if f.d != g.d {
            return param(format!("field has d={} but momentum has d={}", f.d, g.d));
        }
        Ok(Self { d: f.d, f, g })
    }

    /// `(d - 1)/2`.
    pub fn scaling_dimension(&self) -> f64 {
        (self.d as f64 - 1.0) / 2.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveEntropy {
    pub d: usize,
    pub scaling_dimension: f64,
    /// `−π(f, Lf)`.
    pub field_legendre: f64,
    /// `π(g, Mg)`.
    pub momentum_parabolic: f64,
    /// `2πD‖f‖²`, also the lower bound.
    pub field_born: f64,
    pub entropy: f64,
    /// `π[−(f,Wf) + (f,Mf) + (g,Mg) + (d−2)‖f‖²]`.
    pub prolate_form: f64,
    pub cross_form_residual: f64,
    /// `entropy − field_born`.
    pub slack: f64,
    /// Set when `g` had nonzero mean in `d = 1` and was projected.
    pub momentum_projected: bool,
    pub warnings: Vec<String>,
}

/// Entropy of a free wave in the unit ball.
pub fn wave_entropy(cd: &CauchyData) -> Result<WaveEntropy> {
    let d = cd.d;
    let dim = cd.scaling_dimension();
    let mut g = cd.g.clone();
    let mut projected = false;
    let mut warnings = Vec::new();
    if d == 1 {
        let mean = g.mean()?;
        if mean.abs() > MEAN_TOLERANCE {
            g = g.with_offset(g.offset - mean);
            projected = true;
            warnings.push(format!(
                "momentum datum had mean {mean:.3e}; projected to zero mean"
            ));
        }
    }
    let fi = integrals(&cd.f, 1.0, 1.0)?;
    let gi = integrals(&g, 1.0, 1.0)?;
    let field_born = 2.0 * dim * fi.born;
    let entropy = fi.legendre + gi.parabolic + field_born;
    let prolate_form = fi.prolate + fi.parabolic + gi.parabolic + (d as f64 - 2.0) * fi.born;
    Ok(WaveEntropy {
        d,
        scaling_dimension: dim,
        field_legendre: fi.legendre,
        momentum_parabolic: gi.parabolic,
        field_born,
        entropy,
        prolate_form,
        cross_form_residual: (entropy - prolate_form).abs(),
        slack: entropy - field_born,
        momentum_projected: projected,
        warnings,
    })
}

/// The two diagonal blocks of the wave entropy operator on one sector, as
/// forms in the orthonormal radial basis.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyBlocks {
    pub d: usize,
    pub ell: usize,
    pub basis_size: usize,
    /// Spectrum of `π(l_form + 2D mass)`, i.e. of `−πL_D` with `L_D = L − 2D`.
    pub field_eigenvalues: Vec<f64>,
    /// Spectrum of `π m_form`.
    pub momentum_eigenvalues: Vec<f64>,
    pub positive: bool,
    #[serde(skip)]
    pub field: DMatrix<f64>,
    #[serde(skip)]
    pub momentum: DMatrix<f64>,
}

pub fn entropy_operator_blocks(d: usize, ell: usize, n: usize) -> Result<EntropyBlocks> {
    let sector = SpectralSector::new(d, ell, 1.0)?;
    let forms = assemble_radial_forms(sector, n)?;
    let two_d = 2.0 * sector.scaling_dimension();
    let field = (&forms.l_form + &forms.mass * two_d) * PI;
    let momentum = &forms.m_form * PI;
    let fe = generalized_sym_eig(&field, &forms.mass)?.eigenvalues;
    let me = generalized_sym_eig(&momentum, &forms.mass)?.eigenvalues;
    let floor = |e: &[f64]| -1e-10 * e.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let positive = fe[0] >= floor(&fe) && me[0] >= floor(&me);
    Ok(EntropyBlocks {
        d,
        ell,
        basis_size: n,
        field_eigenvalues: fe,
        momentum_eigenvalues: me,
        positive,
        field,
        momentum,
    })
}

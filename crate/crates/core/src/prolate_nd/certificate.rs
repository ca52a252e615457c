use nalgebra::DMatrix;
use serde::Serialize;

use super::forms::{assemble_radial_forms, RadialForms};
use super::hankel::{
    check_witness_sector, hankel_kernel, hankel_kernel_euler, sector_hankel_nystrom, sector_rule,
};
use super::sector::{RadialBasis, SpectralSector};
use crate::error::{param, Result};
use crate::numerics::SymmetricSpectrum;
use crate::prolate1d::certificate::{align, finish};
use crate::prolate1d::matrix::{fix_sign, TRUST_TAIL};
use crate::prolate1d::{CommutationReport, KernelKind, KernelOperator};

/// Concentration values with `|μ| <= RESOLVED_FLOOR` are below round-off
/// and excluded from the ordering check.
pub const RESOLVED_FLOOR: f64 = 1e-12;

/// Eigenvectors with the sign convention applied, their tail masses and the
/// trust flags.
pub(crate) fn normalized_eigenvectors(spec: &SymmetricSpectrum) -> (DMatrix<f64>, Vec<bool>) {
    let n = spec.eigenvectors.nrows();
    let mut v = spec.eigenvectors.clone();
    let tail_start = n - n / 4;
    let mut trusted = Vec::with_capacity(v.ncols());
    for k in 0..v.ncols() {
        let mut col: Vec<f64> = v.column(k).iter().copied().collect();
        fix_sign(&mut col);
        let tail: f64 = col[tail_start..].iter().map(|x| x * x).sum();
        trusted.push(tail < TRUST_TAIL);
        for (i, x) in col.into_iter().enumerate() {
            v[(i, k)] = x;
        }
    }
    (v, trusted)
}

/// `sqrt(w_q) u_n(r_q)` on the kernel's nodes.
fn sampled_basis(basis: &RadialBasis, h: &KernelOperator) -> DMatrix<f64> {
    let sw = h.sqrt_weights();
    let mut out = DMatrix::zeros(h.n_quad(), basis.size);
    for (q, &r) in h.rule.nodes.iter().enumerate() {
        let tab = basis.table(r, basis.size);
        for n in 0..basis.size {
            out[(q, n)] = sw[q] * tab.u[n];
        }
    }
    out
}

/// Alignment of the `W` eigenvectors of one sector with the sector angle
/// operator `H²`.
pub fn nd_commutation_certificate(
    forms: &RadialForms,
    h: &KernelOperator,
    k_max: usize,
) -> Result<CommutationReport> {
    let sector = forms.sector;
    if h.kind != KernelKind::SectorHankel || h.sector != Some((sector.d, sector.ell)) {
        return param(format!(
            "kernel sector {:?} does not match forms sector (d={}, ell={})",
            h.sector, sector.d, sector.ell
        ));
    }
    if (sector.c - h.c).abs() > 1e-14 * sector.c.max(1.0) {
        return param(format!(
            "bandwidth mismatch: forms have c={}, kernel has c={}",
            sector.c, h.c
        ));
    }
    let k_max = k_max.min(forms.size);
    let spec = forms.w_spectrum()?;
    let (vecs, trusted) = normalized_eigenvectors(&spec);
    let basis = forms.basis();
    let samples = sampled_basis(&basis, h) * vecs.columns(0, k_max);
    let t = &h.matrix * &h.matrix;
    let (residuals, rayleigh) = align(&t, &samples);
    let (_, mu) = align(&h.matrix, &samples);
    let lambda: Vec<f64> = mu.iter().map(|m| m * m).collect();
    let resolved = mu.iter().take_while(|m| m.abs() > RESOLVED_FLOOR).count();
    let mut warnings = Vec::new();
    if k_max > forms.size / 2 {
        warnings.push(format!(
            "requested {k_max} eigenpairs but only N/2 = {} are in the trusted range",
            forms.size / 2
        ));
    }
    if let Some(k) = trusted[..k_max].iter().position(|t| !t) {
        warnings.push(format!("eigenpair {k} fails the coefficient-tail test; increase N"));
    }
    Ok(finish(
        sector.d,
        sector.ell,
        sector.c,
        forms.size,
        h.n_quad(),
        &spec.eigenvalues[..k_max],
        vec![(sector.ell % 2) as u8; k_max],
        trusted[..k_max].to_vec(),
        residuals,
        lambda,
        rayleigh,
        resolved,
        warnings,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessOperator {
    /// `∇(1-r²)∇ - c²r²`.
    Prolate,
    /// `∇(1-r²)∇`.
    Legendre,
}

#[derive(Debug, Clone, Serialize)]
pub struct HermiticityReport {
    pub d: usize,
    pub ell: usize,
    pub c: f64,
    pub basis_size: usize,
    pub n_quad: usize,
    pub operator: WitnessOperator,
    /// `max |(u_m, A ψ_n) − (A u_m, ψ_n)|` for ball-supported `u_m` and
    /// band-limited `ψ_n`.
    pub asymmetry: f64,
    pub relative_asymmetry: f64,
    /// Largest alignment residual of the operator's first eight
    /// eigenvectors against the sector angle operator.
    pub alignment_max: f64,
    pub commutes_with_band_projection: bool,
}

/// Tolerance separating commuting from non-commuting operators in the
/// witness.
pub const WITNESS_ALIGNMENT_TOL: f64 = 1e-6;

/// Mixed matrix of an operator between ball-supported basis elements and
/// their band-limited images.
///
/// `ψ_n` is the sector Fourier image of `u_n`; `A ψ_n` uses the Helmholtz
/// identity of the kernel, so no numerical differentiation enters.
pub fn hermiticity_witness(
    sector: SpectralSector,
    n_basis: usize,
    n_quad: usize,
    operator: WitnessOperator,
) -> Result<HermiticityReport> {
    check_witness_sector(&sector)?;
    if n_quad < 8 {
        return param(format!("need at least 8 quadrature points, got {n_quad}"));
    }
    let forms = assemble_radial_forms(sector, n_basis)?;
    let basis = forms.basis();
    let rule = sector_rule(sector.d, n_quad)?;
    let x = &rule.nodes;
    let w = &rule.weights;
    let c2 = sector.c * sector.c;
    let kappa = match operator {
        WitnessOperator::Prolate => 1.0,
        WitnessOperator::Legendre => 0.0,
    };
    let tabs: Vec<_> = x.iter().map(|&r| basis.table(r, n_basis)).collect();
    let mut psi = DMatrix::<f64>::zeros(n_quad, n_basis);
    let mut a_psi = DMatrix::<f64>::zeros(n_quad, n_basis);
    for i in 0..n_quad {
        let p = x[i];
        for j in 0..n_quad {
            let r = x[j];
            let k = hankel_kernel(&sector, p, r);
            let e = hankel_kernel_euler(&sector, p, r);
            let a_k = (1.0 - p * p) * (-c2 * r * r) * k - 2.0 * e - kappa * c2 * p * p * k;
            for n in 0..n_basis {
                let wu = w[j] * tabs[j].u[n];
                psi[(i, n)] += k * wu;
                a_psi[(i, n)] += a_k * wu;
            }
        }
    }
    let mut asym: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for m in 0..n_basis {
        for n in 0..n_basis {
            let mut g = 0.0;
            let mut g_moved = 0.0;
            for i in 0..n_quad {
                let t = x[i] * x[i];
                let a_u = tabs[i].lu[m] - kappa * c2 * t * tabs[i].u[m];
                g += w[i] * tabs[i].u[m] * a_psi[(i, n)];
                g_moved += w[i] * a_u * psi[(i, n)];
            }
            asym = asym.max((g - g_moved).abs());
            scale = scale.max(g.abs());
        }
    }

    let h = sector_hankel_nystrom(sector, n_quad)?;
    let spec = match operator {
        WitnessOperator::Prolate => forms.w_spectrum()?,
        WitnessOperator::Legendre => forms.l_spectrum()?,
    };
    let (vecs, _) = normalized_eigenvectors(&spec);
    let k = 8.min(n_basis);
    let samples = sampled_basis(&basis, &h) * vecs.columns(0, k);
    let (res, _) = align(&(&h.matrix * &h.matrix), &samples);
    let alignment_max = res.iter().fold(0.0f64, |m, &r| m.max(r));
    Ok(HermiticityReport {
        d: sector.d,
        ell: sector.ell,
        c: sector.c,
        basis_size: n_basis,
        n_quad,
        operator,
        asymmetry: asym,
        relative_asymmetry: asym / scale.max(f64::MIN_POSITIVE),
        alignment_max,
        commutes_with_band_projection: alignment_max < WITNESS_ALIGNMENT_TOL,
    })
}

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::sector::SpectralSector;
use crate::error::{param, Error, Result};
use crate::numerics::bessel::{spherical_bessel, MAX_ORDER};
use crate::numerics::{gauss_rule, QuadratureRule, WeightKind};
use crate::prolate1d::{KernelKind, KernelOperator};

/// Order of the spherical Bessel function in the kernel of an odd-`d`
/// sector: `ell + (d - 3)/2` (for `d = 1` the kernel is trigonometric).
fn bessel_order(sector: &SpectralSector) -> usize {
    (sector.ell + (sector.d - 1) / 2).saturating_sub(1)
}

fn check_sector(sector: &SpectralSector) -> Result<()> {
    if sector.d % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "Fourier-side sector kernels are implemented for odd dimensions only, got d = {}",
            sector.d
        )));
    }
    if sector.d > 1 && bessel_order(sector) > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "kernel needs j_{} but orders above {MAX_ORDER} are not supported",
            bessel_order(sector)
        )));
    }
    if !(sector.c > 0.0) {
        return param(format!("bandwidth must be > 0, got {}", sector.c));
    }
    Ok(())
}

/// Positive half of the `2n`-point Gauss–Legendre rule with the weights
/// multiplied by `r^{d-1}`. Exact enough for the even integrands that
/// appear in odd dimension.
pub fn sector_rule(d: usize, n: usize) -> Result<QuadratureRule> {
    let full = gauss_rule(WeightKind::Legendre, 2 * n)?;
    let (nodes, weights): (Vec<f64>, Vec<f64>) = full
        .nodes
        .iter()
        .zip(&full.weights)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &w)| (x, w * x.powi(d as i32 - 1)))
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: (0.0, 1.0),
        kind: WeightKind::Legendre,
    })
}

/// Kernel of the bandwidth-`c` Fourier transform restricted to the sector,
/// as an operator on `L²((0,1), r^{d-1} dr)`.
///
/// `d = 1`: `sqrt(2c/π) cos(cpr)` (even) or `sqrt(2c/π) sin(cpr)` (odd);
/// odd `d >= 3`: `c^{d/2} sqrt(2/π) z^{(3-d)/2} j_m(z)` with `z = cpr` and
/// `m = ell + (d-3)/2`.
pub fn hankel_kernel(sector: &SpectralSector, p: f64, r: f64) -> f64 {
    let c = sector.c;
    let z = c * p * r;
    if sector.d == 1 {
        let amp = (2.0 * c / PI).sqrt();
        return if sector.ell == 0 { amp * z.cos() } else { amp * z.sin() };
    }
    let (amp, power) = bessel_prefactor(sector, z);
    let j = spherical_bessel(bessel_order(sector), z).unwrap_or(f64::NAN);
    amp * power * j
}

/// `c^{d/2} sqrt(2/π)` and `z^{(3-d)/2}`.
fn bessel_prefactor(sector: &SpectralSector, z: f64) -> (f64, f64) {
    let d = sector.d as i32;
    let amp = sector.c.powf(d as f64 / 2.0) * (2.0 / PI).sqrt();
    (amp, z.powi((3 - d) / 2))
}

/// `p ∂_p` of the kernel at fixed `r`.
pub(crate) fn hankel_kernel_euler(sector: &SpectralSector, p: f64, r: f64) -> f64 {
    let c = sector.c;
    let z = c * p * r;
    if sector.d == 1 {
        let amp = (2.0 * c / PI).sqrt();
        return if sector.ell == 0 {
            -amp * z * z.sin()
        } else {
            amp * z * z.cos()
        };
    }
    // z d/dz [z^a j_m(z)] = z^a [(a + m) j_m(z) - z j_{m+1}(z)], a + m = ell
    let m = bessel_order(sector);
    let (amp, power) = bessel_prefactor(sector, z);
    let jm = spherical_bessel(m, z).unwrap_or(f64::NAN);
    let jn = spherical_bessel(m + 1, z).unwrap_or(f64::NAN);
    amp * power * (sector.ell as f64 * jm - z * jn)
}

/// Symmetrized Nyström matrix of the sector kernel with `n_quad` nodes on
/// `(0, 1)`. Its square is the sector angle operator.
pub fn sector_hankel_nystrom(sector: SpectralSector, n_quad: usize) -> Result<KernelOperator> {
    check_sector(&sector)?;
    if n_quad < 8 {
        return param(format!("need at least 8 quadrature points, got {n_quad}"));
    }
    let rule = sector_rule(sector.d, n_quad)?;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let x = &rule.nodes;
    let matrix = DMatrix::from_fn(n_quad, n_quad, |i, j| {
        sw[i] * hankel_kernel(&sector, x[i], x[j]) * sw[j]
    });
    Ok(KernelOperator {
        kind: KernelKind::SectorHankel,
        c: sector.c,
        rule,
        matrix,
        imag: None,
        sector: Some((sector.d, sector.ell)),
    })
}

pub(crate) fn check_witness_sector(sector: &SpectralSector) -> Result<()> {
    check_sector(sector)?;
    if sector.d > 1 && bessel_order(sector) >= MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "the witness needs j_{}; orders above {MAX_ORDER} are not supported",
            bessel_order(sector) + 1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sym_eig;
    use crate::prolate1d::kernel::sinc_kernel;

    #[test]
    fn even_sector_squares_to_even_angle_operator() {
        let n = 60;
        let h = sector_hankel_nystrom(SpectralSector::new(1, 0, 1.0).unwrap(), n).unwrap();
        let sq = &h.matrix * &h.matrix;
        let x = &h.rule.nodes;
        let sw = h.sqrt_weights();
        // even part of the sinc kernel folded onto (0, 1)
        let t = DMatrix::from_fn(n, n, |i, j| {
            sw[i] * (sinc_kernel(1.0, x[i] - x[j]) + sinc_kernel(1.0, x[i] + x[j])) * sw[j]
        });
        assert!((sq - t).norm() < 1e-10);
    }

    #[test]
    fn finite_at_origin() {
        let s = SpectralSector::new(3, 0, 1.0).unwrap();
        let v = hankel_kernel(&s, 0.0, 0.0);
        assert!((v - (2.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn squared_spectrum_in_unit_interval() {
        for ell in [0, 1, 2, 7] {
            let h = sector_hankel_nystrom(SpectralSector::new(3, ell, 2.0).unwrap(), 60).unwrap();
            let s = sym_eig(&(&h.matrix * &h.matrix)).unwrap();
            assert!(*s.eigenvalues.last().unwrap() < 1.0);
            assert!(s.eigenvalues[0] > -1e-14);
        }
    }

    #[test]
    fn five_dimensional_kernel_is_finite_at_origin() {
        // H(0, r) = c^{5/2} sqrt(2/π) lim z^{-1} j_1(z) = c^{5/2} sqrt(2/π) / 3
        let s = SpectralSector::new(5, 0, 1.0).unwrap();
        let v = hankel_kernel(&s, 1e-3, 1e-3);
        assert!((v - (2.0 / PI).sqrt() / 3.0).abs() < 1e-6);
    }

    #[test]
    fn even_dimension_unsupported() {
        let s = SpectralSector::new(2, 0, 1.0).unwrap();
        assert!(matches!(sector_hankel_nystrom(s, 20), Err(Error::Unsupported(_))));
    }

    #[test]
    fn euler_derivative_matches_finite_difference() {
        for (d, ell) in [(1, 0), (1, 1), (3, 0), (3, 4), (5, 0), (7, 2)] {
            let s = SpectralSector::new(d, ell, 1.3).unwrap();
            let (p, r, h) = (0.7, 0.4, 1e-6);
            let fd = p * (hankel_kernel(&s, p + h, r) - hankel_kernel(&s, p - h, r)) / (2.0 * h);
            assert!((fd - hankel_kernel_euler(&s, p, r)).abs() < 1e-8);
        }
    }
}

use serde::Serialize;

use crate::error::{param, Result};
use crate::numerics::polynomial::JacobiRecurrence;

/// One angular sector of the ball in `ℝ^d`: spherical harmonics of degree
/// `ell`, bandwidth `c`. For `d = 1`, `ell` 0 and 1 stand for even and odd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSector {
    pub d: usize,
    pub ell: usize,
    pub c: f64,
}

impl SpectralSector {
    pub fn new(d: usize, ell: usize, c: f64) -> Result<Self> {
        if d == 0 {
            return param("dimension must be at least 1");
        }
        if d == 1 && ell > 1 {
            return param(format!("in one dimension ell encodes parity (0 or 1), got {ell}"));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return param(format!("bandwidth must be finite and >= 0, got {c}"));
        }
        Ok(Self { d, ell, c })
    }

    /// Scaling dimension `(d - 1)/2`.
    pub fn scaling_dimension(&self) -> f64 {
        (self.d as f64 - 1.0) / 2.0
    }

    /// Eigenvalue `ell (ell + d - 2)` of the angular Laplacian.
    pub fn centrifugal(&self) -> f64 {
        let l = self.ell as f64;
        l * (l + self.d as f64 - 2.0)
    }

    /// Jacobi exponent of the basis: `ell + d/2 - 1`.
    pub fn jacobi_beta(&self) -> f64 {
        self.ell as f64 + self.d as f64 / 2.0 - 1.0
    }

    pub fn with_bandwidth(&self, c: f64) -> Self {
        Self { c, ..*self }
    }
}

/// `u_n(r) = sqrt(4 · 2^β) r^ell p_n(2r² - 1)` with `p_n` orthonormal for
/// `(1 + s)^β` on `(-1, 1)`; orthonormal in `L²((0,1), r^{d-1} dr)`.
#[derive(Debug, Clone)]
pub struct RadialBasis {
    pub sector: SpectralSector,
    pub size: usize,
    rec: JacobiRecurrence,
    norm: f64,
}

/// Basis values at one radius.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Strong radial Legendre operator `r^{1-d}(r^{d-1}(1-r²)u')' - (1-r²)ℓ(ℓ+d-2)u/r²`.
    pub lu: Vec<f64>,
    /// `Δ_ℓ u`, the radial Laplacian of the sector.
    pub lap: Vec<f64>,
}

impl RadialBasis {
    pub fn new(sector: SpectralSector, size: usize) -> Self {
        let beta = sector.jacobi_beta();
        Self {
            sector,
            size,
            rec: JacobiRecurrence::new(0.0, beta, size),
            norm: (4.0 * 2f64.powf(beta)).sqrt(),
        }
    }

    pub(crate) fn recurrence(&self) -> &JacobiRecurrence {
        &self.rec
    }

    pub(crate) fn norm(&self) -> f64 {
        self.norm
    }

    /// `(u_n(r), u_n'(r))`.
    pub fn eval(&self, n: usize, r: f64) -> (f64, f64) {
        let t = self.table(r, n + 1);
        (t.u[n], t.du[n])
    }

    /// Values, derivatives and strong operators of `u_0 .. u_{count-1}`.
    pub fn table(&self, r: f64, count: usize) -> RadialTable {
        let ell = self.sector.ell as f64;
        let d = self.sector.d as f64;
        let t = r * r;
        let poly = self.rec.eval(count, 2.0 * t - 1.0);
        let rl = r.powi(self.sector.ell as i32);
        let rl1 = if self.sector.ell == 0 {
            0.0
        } else {
            r.powi(self.sector.ell as i32 - 1)
        };
        let mut tab = RadialTable {
            u: Vec::with_capacity(count),
            du: Vec::with_capacity(count),
            lu: Vec::with_capacity(count),
            lap: Vec::with_capacity(count),
        };
        for n in 0..count {
            let (p, dp, ddp) = (poly.p[n], poly.dp[n], poly.ddp[n]);
            let lap = 16.0 * t * ddp + 4.0 * (2.0 * ell + d) * dp;
            let euler = ell * p + 4.0 * t * dp;
            tab.u.push(self.norm * rl * p);
            tab.du.push(self.norm * (ell * rl1 * p + 4.0 * rl * r * dp));
            tab.lap.push(self.norm * rl * lap);
            tab.lu.push(self.norm * rl * ((1.0 - t) * lap - 2.0 * euler));
        }
        tab
    }
}

/// Function handle for a single basis element: `r ↦ (u_n(r), u_n'(r))`.
pub fn radial_basis(sector: SpectralSector, n: usize) -> impl Fn(f64) -> (f64, f64) {
    let basis = RadialBasis::new(sector, n + 1);
    move |r| basis.eval(n, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear_elements() {
        let s = SpectralSector::new(3, 0, 1.0).unwrap();
        let f = radial_basis(s, 0);
        let (a, da) = f(0.2);
        let (b, _) = f(0.9);
        assert!((a - b).abs() < 1e-15 && da == 0.0);
        // ∫ u² r² dr = 1 over the unit interval
        assert!((a * a / 3.0 - 1.0).abs() < 1e-14);

        let s1 = SpectralSector::new(3, 1, 1.0).unwrap();
        let g = radial_basis(s1, 0);
        let (x, _) = g(0.3);
        let (y, _) = g(0.6);
        assert!((y / x - 2.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (d, ell) in [(1, 0), (1, 1), (2, 3), (3, 2), (5, 0)] {
            let s = SpectralSector::new(d, ell, 1.0).unwrap();
            let b = RadialBasis::new(s, 6);
            let h = 1e-5;
            for r in [0.15, 0.5, 0.8] {
                let t = b.table(r, 6);
                let tp = b.table(r + h, 6);
                let tm = b.table(r - h, 6);
                for n in 0..6 {
                    let fd = (tp.u[n] - tm.u[n]) / (2.0 * h);
                    assert!((fd - t.du[n]).abs() < 1e-6 * (1.0 + fd.abs()));
                    // strong operator from finite differences of r^{d-1}(1-r²)u'
                    let flux = |tab: &RadialTable, rr: f64| {
                        rr.powi(d as i32 - 1) * (1.0 - rr * rr) * tab.du[n]
                    };
                    let df = (flux(&tp, r + h) - flux(&tm, r - h)) / (2.0 * h);
                    let lu = df / r.powi(d as i32 - 1) - (1.0 - r * r) * s.centrifugal() * t.u[n] / (r * r);
                    assert!((lu - t.lu[n]).abs() < 1e-5 * (1.0 + lu.abs()), "d={d} l={ell} n={n}");
                }
            }
        }
    }

    #[test]
    fn parity_encoding() {
        assert!(SpectralSector::new(1, 2, 1.0).is_err());
        assert!(SpectralSector::new(0, 0, 1.0).is_err());
        assert_eq!(SpectralSector::new(3, 0, 1.0).unwrap().scaling_dimension(), 1.0);
    }
}

//! Exact Fourier calculus on `p(x) e^{-a x²}`.
//!
//! Derivatives, multiplication by polynomials and the unitary Fourier
//! transform all map this class to itself, so commutators of differential
//! operators with `F_c` can be evaluated symbolically on the line.

use nalgebra::Complex;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Highest polynomial degree accepted as a test function.
pub const MAX_TEST_DEGREE: usize = 6;

/// `Σ_k coeffs[k] x^k e^{-exponent x²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPoly {
    pub coeffs: Vec<C64>,
    pub exponent: f64,
}

impl GaussPoly {
    /// A real test function `p(x) e^{-a x²}` with `deg p <= 6` and `a > 0`.
    pub fn test_function(poly: &[f64], a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Unsupported(format!(
                "test functions need a decaying Gaussian factor, got exponent {a}"
            )));
        }
        let deg = poly.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        if deg > MAX_TEST_DEGREE {
            return Err(Error::Unsupported(format!(
                "test polynomial degree {deg} exceeds {MAX_TEST_DEGREE}"
            )));
        }
        Ok(Self {
            coeffs: poly.iter().map(|&c| C64::new(c, 0.0)).collect(),
            exponent: a,
        })
    }

    fn with(coeffs: Vec<C64>, exponent: f64) -> Self {
        Self { coeffs, exponent }
    }

    pub fn eval(&self, x: f64) -> C64 {
        let poly = self
            .coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c);
        poly * (-self.exponent * x * x).exp()
    }

    pub fn derivative(&self) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                out[k - 1] += c * k as f64;
            }
            out[k + 1] -= c * (2.0 * self.exponent);
        }
        Self::with(out, self.exponent)
    }

    /// Multiplication by the real polynomial `Σ poly[k] x^k`.
    pub fn times_poly(&self, poly: &[f64]) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + poly.len().max(1) - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in poly.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::with(out, self.exponent)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::with(self.coeffs.iter().map(|&c| c * s).collect(), self.exponent)
    }

    /// Sum of two functions with the same Gaussian factor.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert!((self.exponent - other.exponent).abs() <= 1e-15 * self.exponent);
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    + other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        Self::with(coeffs, self.exponent)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Unitary transform `(2π)^{-1/2} ∫ e^{-ipx} f(x) dx`.
    ///
    /// Uses `F[e^{-ax²}] = (2a)^{-1/2} e^{-p²/4a}` and `F[x g] = i d/dp F[g]`.
    pub fn fourier(&self) -> Self {
        let a = self.exponent;
        let beta = 0.25 / a;
        let mut h = Self::with(vec![C64::new((2.0 * a).powf(-0.5), 0.0)], beta);
        let mut acc = Self::with(vec![C64::new(0.0, 0.0)], beta);
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                h = h.derivative().scale(C64::new(0.0, 1.0));
            }
            acc = acc.add(&h.scale(c));
        }
        acc
    }

    /// `x ↦ f(s x)`.
    pub fn dilate(&self, s: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * s.powi(k as i32))
            .collect();
        Self::with(coeffs, self.exponent * s * s)
    }

    /// `F_c f (x) = sqrt(c) (F f)(c x)`, the transform with kernel
    /// `sqrt(c/2π) e^{-icxy}`.
    pub fn band_fourier(&self, c: f64) -> Self {
        self.fourier().dilate(c).scale(C64::new(c.sqrt(), 0.0))
    }

    /// `L²(ℝ)` norm from the exact Gaussian moments.
    pub fn l2_norm(&self) -> f64 {
        let b = 2.0 * self.exponent;
        let n = self.coeffs.len();
        let moment = |m: usize| {
            if m % 2 == 1 {
                0.0
            } else {
                let h = (m as f64 + 1.0) / 2.0;
                gamma(h) / b.powf(h)
            }
        };
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += (self.coeffs[j].conj() * self.coeffs[k]).re * moment(j + k);
            }
        }
        s.max(0.0).sqrt()
    }
}

/// `a L f + b c² M f` with `L = d/dx (1 - x²) d/dx`, `M = 1 - x²`.
pub fn legendre_parabolic_combination(f: &GaussPoly, a: f64, b: f64, c: f64) -> GaussPoly {
    let lf = f.derivative().times_poly(&[1.0, 0.0, -1.0]).derivative();
    let mf = f.times_poly(&[1.0, 0.0, -1.0]);
    lf.scale(C64::new(a, 0.0)).add(&mf.scale(C64::new(b * c * c, 0.0)))
}

/// `W(c) f = ((1 - x²) f')' - c² x² f`.
pub fn prolate_apply(f: &GaussPoly, c: f64) -> GaussPoly {
    let lf = f.derivative().times_poly(&[1.0, 0.0, -1.0]).derivative();
    lf.sub(&f.times_poly(&[0.0, 0.0, c * c]))
}

fn relative_commutator(f: &GaussPoly, c: f64, op: impl Fn(&GaussPoly) -> GaussPoly) -> f64 {
    let lhs = op(f).band_fourier(c);
    let rhs = op(&f.band_fourier(c));
    let scale = lhs.l2_norm().max(rhs.l2_norm()).max(f64::MIN_POSITIVE);
    lhs.sub(&rhs).l2_norm() / scale
}

/// Largest relative `L²` norm of `F_c W(c) f − W(c) F_c f` over the tests.
pub fn fourier_commutation_fullline(c: f64, tests: &[GaussPoly]) -> Result<f64> {
    check(c, tests)?;
    Ok(tests
        .iter()
        .map(|f| relative_commutator(f, c, |g| prolate_apply(g, c)))
        .fold(0.0, f64::max))
}

/// The same residual for `a L + b c² M`; it vanishes only when `a = b`.
pub fn fourier_commutation_family(c: f64, a: f64, b: f64, tests: &[GaussPoly]) -> Result<f64> {
    check(c, tests)?;
    Ok(tests
        .iter()
        .map(|f| relative_commutator(f, c, |g| legendre_parabolic_combination(g, a, b, c)))
        .fold(0.0, f64::max))
}

fn check(c: f64, tests: &[GaussPoly]) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("bandwidth must be > 0, got {c}")));
    }
    for t in tests {
        let deg = t.coeffs.iter().rposition(|z| z.norm() != 0.0).unwrap_or(0);
        if deg > MAX_TEST_DEGREE || !(t.exponent > 0.0) {
            return Err(Error::Unsupported(
                "test functions must be p(x) e^{-ax²} with deg p <= 6 and a > 0".into(),
            ));
        }
    }
    Ok(())
}

/// Monomials up to degree six and a mixed polynomial, under four Gaussian
/// widths.
pub fn default_test_set() -> Vec<GaussPoly> {
    let mut out = Vec::new();
    for &a in &[0.5, 0.25, 1.0, 2.0] {
        for k in 0..=MAX_TEST_DEGREE {
            let mut p = vec![0.0; k + 1];
            p[k] = 1.0;
            out.push(GaussPoly::test_function(&p, a).expect("valid test function"));
        }
        out.push(
            GaussPoly::test_function(&[0.3, -1.0, 0.5, 2.0, 0.0, -0.7, 0.1], a)
                .expect("valid test function"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_norm(f: &GaussPoly) -> f64 {
        // brute force on a wide grid
        let h = 1e-3;
        let mut s = 0.0;
        let mut x = -40.0;
        while x <= 40.0 {
            s += f.eval(x).norm_sqr() * h;
            x += h;
        }
        s.sqrt()
    }

    #[test]
    fn standard_gaussian_is_fixed() {
        let g = GaussPoly::test_function(&[1.0], 0.5).unwrap();
        let fg = g.band_fourier(1.0);
        assert!((fg.exponent - 0.5).abs() < 1e-15);
        assert!((fg.coeffs[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(fourier_commutation_fullline(1.0, &[g]).unwrap(), 0.0);
    }

    #[test]
    fn hermite_function_eigenvalue() {
        // x e^{-x²/2} has eigenvalue -i
        let f = GaussPoly::test_function(&[0.0, 1.0], 0.5).unwrap();
        let ff = f.fourier();
        let expected = f.scale(C64::new(0.0, -1.0));
        assert!(ff.sub(&expected).l2_norm() < 1e-15);
        assert!(fourier_commutation_fullline(1.0, &[f]).unwrap() < 1e-12);
    }

    #[test]
    fn fourier_matches_numerical_integral() {
        let f = GaussPoly::test_function(&[0.2, -1.0, 0.4, 0.3], 0.8).unwrap();
        let ff = f.fourier();
        for p in [-1.3, 0.0, 0.4, 2.2] {
            let h = 2e-3;
            let mut acc = C64::new(0.0, 0.0);
            let mut x = -20.0;
            while x <= 20.0 {
                acc += f.eval(x) * C64::new(0.0, -p * x).exp() * h;
                x += h;
            }
            acc /= (2.0 * std::f64::consts::PI).sqrt();
            assert!((acc - ff.eval(p)).norm() < 1e-10);
        }
    }

    #[test]
    fn norms_match_quadrature_and_are_preserved() {
        let f = GaussPoly::test_function(&[1.0, 0.5, -0.25, 0.0, 0.1], 0.7).unwrap();
        let n = f.l2_norm();
        assert!((n - quad_norm(&f)).abs() < 1e-10);
        assert!((f.fourier().l2_norm() - n).abs() < 1e-13);
        assert!((f.band_fourier(2.0).l2_norm() - n).abs() < 1e-13);
    }

    #[test]
    fn prolate_commutes_for_every_bandwidth() {
        let tests = default_test_set();
        for c in [0.5, 1.0, 2.0] {
            assert!(fourier_commutation_fullline(c, &tests).unwrap() < 1e-12);
            assert!(fourier_commutation_family(c, 1.0, 1.0, &tests).unwrap() < 1e-12);
            assert!(fourier_commutation_family(c, 1.0, 0.0, &tests).unwrap() > 1e-3);
            assert!(fourier_commutation_family(c, 0.0, 1.0, &tests).unwrap() > 1e-3);
        }
    }

    #[test]
    fn rejects_non_gaussian_input() {
        assert!(matches!(
            GaussPoly::test_function(&[1.0], 0.0),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            GaussPoly::test_function(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 1.0),
            Err(Error::Unsupported(_))
        ));
    }
}

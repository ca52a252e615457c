//! Classical orthogonal polynomials by three-term recurrence.

use statrs::function::gamma::ln_gamma;

/// Legendre polynomial `P_n(x)` and its derivative.
///
/// The derivative uses `(1 - x^2) P_n' = n (P_{n-1} - x P_n)` away from the
/// endpoints and the closed form `P_n'(±1) = (±1)^{n-1} n(n+1)/2` on them.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let one_minus = 1.0 - x * x;
    let dp = if one_minus.abs() < 1e-12 {
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p_prev - x * p) / one_minus
    };
    (p, dp)
}

/// Values, first and second derivatives of the orthonormal Legendre
/// polynomials `sqrt(k + 1/2) P_k(x)` for `k < n`.
pub fn normalized_legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut vals = Vec::with_capacity(n);
    let mut ders = Vec::with_capacity(n);
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..n {
        let scale = (k as f64 + 0.5).sqrt();
        vals.push(scale * p);
        ders.push(scale * d);
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let dnext = ((2.0 * kf + 1.0) * (p + x * d) - kf * d_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
        d_prev = d;
        d = dnext;
    }
    (vals, ders)
}

/// Recurrence data for polynomials orthonormal against
/// `(1 - x)^alpha (1 + x)^beta` on `(-1, 1)`.
///
/// `a[k]` are the diagonal and `b[k]` (for `k >= 1`) the squared
/// off-diagonal entries of the Jacobi matrix; `mu0` is the total mass.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    pub alpha: f64,
    pub beta: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mu0: f64,
}

impl JacobiRecurrence {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Self {
        let ab = alpha + beta;
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let kf = k as f64;
            let ak = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            };
            a.push(ak);
            let bk = match k {
                0 => 0.0,
                1 => 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab)),
                _ => {
                    let t = 2.0 * kf + ab;
                    4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                        / (t * t * (t + 1.0) * (t - 1.0))
                }
            };
            b.push(bk);
        }
        let mu0 = if alpha == 0.0 {
            2f64.powf(beta + 1.0) / (beta + 1.0)
        } else if beta == 0.0 {
            2f64.powf(alpha + 1.0) / (alpha + 1.0)
        } else {
            ((ab + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
                - ln_gamma(ab + 2.0))
            .exp()
        };
        Self {
            alpha,
            beta,
            a,
            b,
            mu0,
        }
    }

    /// Orthonormal polynomial values with first and second derivatives,
    /// degrees `0..n`, at `x`.
    pub fn eval(&self, n: usize, x: f64) -> OrthoTable {
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut ddp = vec![0.0; n];
        if n == 0 {
            return OrthoTable { p, dp, ddp };
        }
        p[0] = 1.0 / self.mu0.sqrt();
        for k in 0..n - 1 {
            let s_next = self.b[k + 1].sqrt();
            let (pm, dpm, ddpm) = if k == 0 {
                (0.0, 0.0, 0.0)
            } else {
                (p[k - 1], dp[k - 1], ddp[k - 1])
            };
            let s_k = self.b[k].sqrt();
            let shift = x - self.a[k];
            p[k + 1] = (shift * p[k] - s_k * pm) / s_next;
            dp[k + 1] = (p[k] + shift * dp[k] - s_k * dpm) / s_next;
            ddp[k + 1] = (2.0 * dp[k] + shift * ddp[k] - s_k * ddpm) / s_next;
        }
        OrthoTable { p, dp, ddp }
    }
}

/// Orthonormal polynomial values at one point.
#[derive(Debug, Clone)]
pub struct OrthoTable {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub ddp: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{gauss_rule, WeightKind};

    #[test]
    fn legendre_constant() {
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(legendre_eval(0, x), (1.0, 0.0));
        }
    }

    #[test]
    fn legendre_degree_two_at_half() {
        // P2 = (3x^2 - 1)/2, P2' = 3x
        let (p, dp) = legendre_eval(2, 0.5);
        assert!((p + 0.125).abs() < 1e-15);
        assert!((dp - 1.5).abs() < 1e-15);
    }

    #[test]
    fn legendre_endpoints() {
        for n in 0..30 {
            let (p, dp) = legendre_eval(n, 1.0);
            let nf = n as f64;
            assert!((p - 1.0).abs() < 1e-13, "n={n}");
            assert!((dp - nf * (nf + 1.0) / 2.0).abs() < 1e-10 * (1.0 + nf * nf), "n={n}");
            let (pm, dpm) = legendre_eval(n, -1.0);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((pm - sign).abs() < 1e-13);
            assert!((dpm + sign * nf * (nf + 1.0) / 2.0).abs() < 1e-10 * (1.0 + nf * nf));
        }
    }

    #[test]
    fn legendre_orthogonality() {
        for m in 0..12 {
            for n in 0..12 {
                let rule = gauss_rule(WeightKind::Legendre, (m + n).max(1)).unwrap();
                let val = rule.integrate(|x| legendre_eval(m, x).0 * legendre_eval(n, x).0);
                let expected = if m == n { 2.0 / (2.0 * n as f64 + 1.0) } else { 0.0 };
                assert!((val - expected).abs() < 1e-13, "m={m} n={n} val={val}");
            }
        }
    }

    #[test]
    fn normalized_table_matches_scalar_eval() {
        let (v, d) = normalized_legendre_table(9, 0.37);
        for k in 0..9 {
            let (p, dp) = legendre_eval(k, 0.37);
            let s = (k as f64 + 0.5).sqrt();
            assert!((v[k] - s * p).abs() < 1e-14);
            assert!((d[k] - s * dp).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_zero_zero_is_legendre() {
        let rec = JacobiRecurrence::new(0.0, 0.0, 10);
        let t = rec.eval(10, 0.41);
        for k in 0..10 {
            let (p, dp) = legendre_eval(k, 0.41);
            let s = (k as f64 + 0.5).sqrt();
            assert!((t.p[k] - s * p).abs() < 1e-13);
            assert!((t.dp[k] - s * dp).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_derivatives_match_finite_differences() {
        let rec = JacobiRecurrence::new(0.0, 1.5, 8);
        let h = 1e-5;
        let x = 0.23;
        let t = rec.eval(8, x);
        let tp = rec.eval(8, x + h);
        let tm = rec.eval(8, x - h);
        for k in 0..8 {
            let fd = (tp.p[k] - tm.p[k]) / (2.0 * h);
            let fdd = (tp.p[k] - 2.0 * t.p[k] + tm.p[k]) / (h * h);
            assert!((fd - t.dp[k]).abs() < 1e-7 * (1.0 + fd.abs()));
            assert!((fdd - t.ddp[k]).abs() < 1e-3 * (1.0 + fdd.abs()));
        }
    }
}

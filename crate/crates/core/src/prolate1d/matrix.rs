use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{param, Result};
use crate::numerics::{gauss_rule, normalized_legendre_table, tridiagonal_eig, WeightKind};

/// Coefficient mass in the top quarter of the basis below which an
/// eigenvector is considered resolved.
pub const TRUST_TAIL: f64 = 1e-10;

/// The quadratic form of `-W(c) = -(d/dx (1-x²) d/dx) + c² x²` on the
/// orthonormal Legendre basis `sqrt(n + 1/2) P_n`.
///
/// Pentadiagonal: even and odd degrees decouple into two tridiagonal blocks.
#[derive(Debug, Clone)]
pub struct ProlateMatrix1D {
    pub c: f64,
    pub n: usize,
    pub entries: DMatrix<f64>,
    pub even: Tridiagonal,
    pub odd: Tridiagonal,
}

/// Symmetric tridiagonal block: `diag[i]` and `off[i]` coupling `i`, `i+1`.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Assembles the form by Gauss–Legendre quadrature with `n + 1` points,
/// exact for every entry.
pub fn assemble_prolate_matrix(c: f64, n: usize) -> Result<ProlateMatrix1D> {
    if !(c >= 0.0) || !c.is_finite() {
        return param(format!("bandwidth must be finite and >= 0, got {c}"));
    }
    if n < 4 {
        return param(format!("basis size must be at least 4, got {n}"));
    }
    let rule = gauss_rule(WeightKind::Legendre, n + 1)?;
    let c2 = c * c;
    let mut entries = DMatrix::<f64>::zeros(n, n);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (p, dp) = normalized_legendre_table(n, x);
        let stiff = w * (1.0 - x * x);
        let pot = w * c2 * x * x;
        for i in 0..n {
            // only |i - j| in {0, 2} survive; the rest vanish by parity or degree
            for j in [i, i + 2] {
                if j < n {
                    entries[(i, j)] += stiff * dp[i] * dp[j] + pot * p[i] * p[j];
                }
            }
        }
    }
    for i in 0..n {
        if i + 2 < n {
            entries[(i + 2, i)] = entries[(i, i + 2)];
        }
    }
    let block = |start: usize| {
        let idx: Vec<usize> = (start..n).step_by(2).collect();
        Tridiagonal {
            diag: idx.iter().map(|&i| entries[(i, i)]).collect(),
            off: idx.windows(2).map(|w| entries[(w[0], w[1])]).collect(),
        }
    };
    let even = block(0);
    let odd = block(1);
    Ok(ProlateMatrix1D {
        c,
        n,
        entries,
        even,
        odd,
    })
}

/// Spectrum of `-W(c)` with Legendre-coefficient eigenvectors.
#[derive(Debug, Clone, Serialize)]
pub struct ProlateSpectrum {
    pub c: f64,
    pub basis_size: usize,
    /// All `N` eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// 0 for even, 1 for odd eigenfunctions.
    pub parity: Vec<u8>,
    /// Coefficient mass in the top quarter of the basis.
    pub tail_mass: Vec<f64>,
    pub trusted: Vec<bool>,
    pub warnings: Vec<String>,
    /// Columns are unit coefficient vectors in the order of `eigenvalues`.
    #[serde(skip)]
    pub coefficients: DMatrix<f64>,
}

impl ProlateSpectrum {
    /// Number of leading eigenpairs that are all trusted.
    pub fn trusted_prefix(&self) -> usize {
        self.trusted.iter().take_while(|&&t| t).count()
    }

    /// `ψ_k(x)` from its coefficients.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        let (p, _) = normalized_legendre_table(self.basis_size, x);
        p.iter()
            .enumerate()
            .map(|(j, pj)| pj * self.coefficients[(j, k)])
            .sum()
    }
}

/// Solves the two parity blocks and merges them in ascending order.
///
/// `k_max` is the number of eigenpairs the caller intends to use; asking for
/// more than `N/2`, or for eigenpairs that fail the tail test, adds a warning.
pub fn prolate_eigenpairs(pm: &ProlateMatrix1D, k_max: usize) -> Result<ProlateSpectrum> {
    let n = pm.n;
    let mut pairs: Vec<(f64, u8, Vec<f64>)> = Vec::with_capacity(n);
    for (parity, block) in [(0u8, &pm.even), (1u8, &pm.odd)] {
        let s = tridiagonal_eig(&block.diag, &block.off)?;
        for k in 0..s.len() {
            let mut v = vec![0.0; n];
            for (i, idx) in (parity as usize..n).step_by(2).enumerate() {
                v[idx] = s.eigenvectors[(i, k)];
            }
            pairs.push((s.eigenvalues[k], parity, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let tail_start = n - n / 4;
    let mut coefficients = DMatrix::<f64>::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut parity = Vec::with_capacity(n);
    let mut tail_mass = Vec::with_capacity(n);
    let mut trusted = Vec::with_capacity(n);
    for (k, (val, par, mut v)) in pairs.into_iter().enumerate() {
        fix_sign(&mut v);
        let tail: f64 = v[tail_start..].iter().map(|x| x * x).sum();
        for (i, x) in v.iter().enumerate() {
            coefficients[(i, k)] = *x;
        }
        eigenvalues.push(val);
        parity.push(par);
        tail_mass.push(tail);
        trusted.push(tail < TRUST_TAIL);
    }
    let mut warnings = Vec::new();
    if k_max > n / 2 {
        warnings.push(format!(
            "requested {k_max} eigenpairs but only N/2 = {} are in the trusted range",
            n / 2
        ));
    }
    let prefix = trusted.iter().take_while(|&&t| t).count();
    if prefix < k_max.min(n) {
        warnings.push(format!(
            "eigenpair {prefix} has top-quarter coefficient mass {:e} >= {TRUST_TAIL:e}; increase N",
            tail_mass[prefix]
        ));
    }
    Ok(ProlateSpectrum {
        c: pm.c,
        basis_size: n,
        eigenvalues,
        parity,
        tail_mass,
        trusted,
        warnings,
        coefficients,
    })
}

/// First coefficient above `1e-8` of the largest one is made positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * big) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `<P̃_i, x P̃_j>`: tridiagonal with off-diagonal `j / sqrt(4j² - 1)`.
pub fn position_matrix(n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, n);
    for j in 1..n {
        let jf = j as f64;
        let a = jf / (4.0 * jf * jf - 1.0).sqrt();
        x[(j - 1, j)] = a;
        x[(j, j - 1)] = a;
    }
    x
}

/// `<P̃_i, P̃_j'>` = `sqrt((2i+1)(2j+1))` for `i < j`, `i + j` odd.
pub fn derivative_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i < j && (i + j) % 2 == 1 {
            (((2 * i + 1) * (2 * j + 1)) as f64).sqrt()
        } else {
            0.0
        }
    })
}

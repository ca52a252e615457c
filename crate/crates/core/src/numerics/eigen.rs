//! Dense symmetric eigensolvers.
//!
//! Householder reduction to tridiagonal form followed by the implicit-shift
//! QL iteration (the EISPACK `tred2`/`tql2` pair). The generalized problem
//! `A v = λ B v` is reduced to standard form through the Cholesky factor of
//! `B`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Full spectrum of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `eigenvalues`.
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
    /// `max_k ‖A v_k − λ_k v_k‖₂` (or `‖A v_k − λ_k B v_k‖₂` for pencils).
    pub residual_norm: f64,
}

impl SymmetricSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// Largest eigenvalue magnitude, i.e. the 2-norm of the source matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn check_square(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Data(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix.
///
/// The input is symmetrized as `(A + Aᵀ)/2` before the solve.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    check_square(a, "matrix")?;
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    if n == 0 {
        return Ok(SymmetricSpectrum {
            eigenvalues: vec![],
            eigenvectors: DMatrix::zeros(0, 0),
            residual_norm: 0.0,
        });
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| sym.row(i).iter().copied().collect()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    let vecs = DMatrix::from_fn(n, n, |i, j| v[i][j]);
    let mut spec = SymmetricSpectrum {
        eigenvalues: d,
        eigenvectors: vecs,
        residual_norm: 0.0,
    };
    spec.residual_norm = residual(&sym, None, &spec);
    Ok(spec)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal (`off.len() == diag.len() - 1`).
pub fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> Result<SymmetricSpectrum> {
    let n = diag.len();
    if n == 0 {
        return Ok(SymmetricSpectrum {
            eigenvalues: vec![],
            eigenvectors: DMatrix::zeros(0, 0),
            residual_norm: 0.0,
        });
    }
    if off.len() + 1 != n {
        return Err(Error::Data("off-diagonal length must be n-1".into()));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::Data("tridiagonal matrix has non-finite entries".into()));
    }
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(off);
    tql2(&mut v, &mut d, &mut e)?;
    let vecs = DMatrix::from_fn(n, n, |i, j| v[i][j]);
    let a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let mut spec = SymmetricSpectrum {
        eigenvalues: d,
        eigenvectors: vecs,
        residual_norm: 0.0,
    };
    spec.residual_norm = residual(&a, None, &spec);
    Ok(spec)
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector. `O(n²)`; used by Golub–Welsch.
pub fn tridiagonal_eig_first_components(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut v = vec![vec![0.0; n]];
    if n > 0 {
        v[0][0] = 1.0;
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    if n > 1 {
        e[1..n].copy_from_slice(off);
    }
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v.swap_remove(0)))
}

/// Solves `A v = λ B v` with `B` symmetric positive definite.
///
/// Eigenvectors are `B`-orthonormal.
pub fn generalized_sym_eig(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    check_square(a, "A")?;
    check_square(b, "B")?;
    if a.nrows() != b.nrows() {
        return Err(Error::Data("A and B must have the same size".into()));
    }
    let n = a.nrows();
    let a = (a + a.transpose()) * 0.5;
    let b = (b + b.transpose()) * 0.5;
    let l = cholesky(&b)?;
    // C = L⁻¹ A L⁻ᵀ
    let y = solve_lower(&l, &a);
    let c = solve_lower(&l, &y.transpose());
    let inner = sym_eig(&c)?;
    let vecs = solve_lower_transpose(&l, &inner.eigenvectors);
    let mut spec = SymmetricSpectrum {
        eigenvalues: inner.eigenvalues,
        eigenvectors: vecs,
        residual_norm: 0.0,
    };
    if n > 0 {
        spec.residual_norm = residual(&a, Some(&b), &spec);
    }
    Ok(spec)
}

/// Lower Cholesky factor; fails with the smallest pivot when `B` is not
/// positive definite.
pub fn cholesky(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    let scale = b.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let mut s = b[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        min_pivot = min_pivot.min(s);
        if s <= 1e-14 * scale {
            return Err(Error::Conditioning(format!(
                "matrix is not positive definite: pivot {j} is {s:e} (relative {:e})",
                s / scale
            )));
        }
        let d = s.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn solve_lower(l: &DMatrix<f64>, rhs: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..x.ncols() {
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

fn solve_lower_transpose(l: &DMatrix<f64>, rhs: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

fn residual(a: &DMatrix<f64>, b: Option<&DMatrix<f64>>, spec: &SymmetricSpectrum) -> f64 {
    let av = a * &spec.eigenvectors;
    let bv = match b {
        Some(b) => b * &spec.eigenvectors,
        None => spec.eigenvectors.clone(),
    };
    (0..spec.len())
        .map(|k| (av.column(k) - bv.column(k) * spec.eigenvalues[k]).norm())
        .fold(0.0, f64::max)
}

/// Householder reduction of the symmetric matrix stored in `v` to
/// tridiagonal form; on exit `v` holds the accumulated transformation.
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal matrix (`d`, `e[1..]`), rotating the
/// rows of `v` (which may hold fewer rows than `n`). Sorts ascending.
fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    return Err(Error::Conditioning(
                        "QL iteration failed to converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // selection sort keeps the column swaps explicit
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in v.iter_mut() {
                row.swap(i, k);
            }
        }
    }
    Ok(())
}

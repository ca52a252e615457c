use nalgebra::{DMatrix, DVector};

use crate::error::{param, Result};
use crate::numerics::{sym_eig, SymmetricSpectrum};

/// `ℂ^n` realized as `ℝ^{2n}` with vectors `(x, y)` standing for `x + iy`.
#[derive(Debug, Clone)]
pub struct ComplexSpace {
    pub n: usize,
    /// Multiplication by `i`: `[[0, -I], [I, 0]]`.
    pub jc: DMatrix<f64>,
}

impl ComplexSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return param("complex dimension must be at least 1");
        }
        Ok(Self {
            n,
            jc: standard_structure(n),
        })
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    /// `Im⟨a, b⟩ = g(J_c a, b)`, with the scalar product antilinear in the
    /// first slot.
    pub fn im_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (&self.jc * a).dot(b)
    }

    /// `max(‖J_c² + I‖, ‖J_c + J_cᵀ‖)`.
    pub fn structure_residual(&self) -> f64 {
        let m = self.real_dim();
        let sq = (&self.jc * &self.jc + DMatrix::identity(m, m)).amax();
        let anti = (&self.jc + self.jc.transpose()).amax();
        sq.max(anti)
    }
}

pub(crate) fn standard_structure(n: usize) -> DMatrix<f64> {
    let mut jc = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        jc[(n + i, i)] = 1.0;
        jc[(i, n + i)] = -1.0;
    }
    jc
}

/// `V f(Λ) Vᵀ`.
pub(crate) fn spectral_fn(spec: &SymmetricSpectrum, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let v = &spec.eigenvectors;
    let mut scaled = v.clone();
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        let fl = f(l);
        scaled.column_mut(k).scale_mut(fl);
    }
    scaled * v.transpose()
}

/// Eigendecomposition of `[[0, A], [Aᵀ, 0]]`, whose eigenvalues are `±σ_k`
/// with eigenvectors `(u_k, ±v_k)/√2`. Keeps singular values accurate to
/// `ε‖A‖` in absolute terms.
fn augmented(a: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    let (r, c) = a.shape();
    let mut big = DMatrix::zeros(r + c, r + c);
    big.view_mut((0, r), (r, c)).copy_from(a);
    big.view_mut((r, 0), (c, r)).copy_from(&a.transpose());
    sym_eig(&big)
}

/// Singular values, descending.
pub(crate) fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let k = a.nrows().min(a.ncols());
    let spec = augmented(a)?;
    Ok(spec.eigenvalues.iter().rev().take(k).map(|s| s.max(0.0)).collect())
}

/// Numerical rank with the relative threshold `1e-10 σ_max`.
pub(crate) fn numerical_rank(a: &DMatrix<f64>) -> Result<usize> {
    let s = singular_values(a)?;
    let top = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&v| v > 1e-10 * top).count())
}

/// Polar decomposition `A = U |A|` of an invertible square matrix, returned
/// as `(U, |A|)`.
pub(crate) fn polar(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let spec = augmented(a)?;
    let mut unitary = DMatrix::zeros(n, n);
    let mut modulus = DMatrix::zeros(n, n);
    for k in n..2 * n {
        let w = spec.vector(k);
        let u = w.rows(0, n);
        let v = w.rows(n, n);
        unitary += (u * v.transpose()) * 2.0;
        modulus += (v * v.transpose()) * (2.0 * spec.eigenvalues[k]);
    }
    Ok((unitary, modulus))
}

/// Orthonormal basis of the span of linearly independent columns.
pub(crate) fn orthonormal_columns(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().qr().q()
}

/// The `k` leading eigenvectors of `A Aᵀ`: an orthonormal basis of the
/// range when `A` has rank `k`.
pub(crate) fn leading_range(a: &DMatrix<f64>, k: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let spec = sym_eig(&(a * a.transpose()))?;
    let m = a.nrows();
    let out = DMatrix::from_fn(m, k, |i, j| spec.eigenvectors[(i, m - 1 - j)]);
    let values = (0..m).rev().map(|j| spec.eigenvalues[j]).collect();
    Ok((out, values))
}

/// Orthonormal basis of the orthogonal complement of an orthonormal set.
pub(crate) fn orthogonal_complement(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = q.nrows();
    let proj = DMatrix::identity(m, m) - q * q.transpose();
    Ok(leading_range(&proj, m - q.ncols())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_structure() {
        let s = ComplexSpace::new(3).unwrap();
        assert_eq!(s.structure_residual(), 0.0);
        // Im⟨1, i⟩ = 1 in ℂ
        let one = DVector::from_vec(vec![1.0, 0.0]);
        let i = DVector::from_vec(vec![0.0, 1.0]);
        let c = ComplexSpace::new(1).unwrap();
        assert_eq!(c.im_inner(&one, &i), 1.0);
        assert_eq!(c.im_inner(&i, &one), -1.0);
    }

    #[test]
    fn complement_is_orthogonal() {
        let q = orthonormal_columns(&DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 0.0]));
        let c = orthogonal_complement(&q).unwrap();
        assert_eq!(c.ncols(), 2);
        assert!((q.transpose() * &c).amax() < 1e-15);
        assert!((c.transpose() * &c - DMatrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn polar_factors() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, -1.0, 3.0, 0.5, 0.2, 0.0, 1.0]);
        let (u, p) = polar(&a).unwrap();
        assert!((&u * &p - &a).amax() < 1e-14);
        assert!((u.transpose() * &u - DMatrix::identity(3, 3)).amax() < 1e-14);
        assert!((&p - p.transpose()).amax() < 1e-14);
        let s = singular_values(&a).unwrap();
        // product of singular values is |det A|
        assert!((s.iter().product::<f64>() - a.determinant().abs()).abs() < 1e-13);
        assert_eq!(numerical_rank(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0])).unwrap(), 1);
    }
}

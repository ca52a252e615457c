use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::space::{
    leading_range, numerical_rank, orthogonal_complement, orthonormal_columns, polar,
    singular_values, spectral_fn, ComplexSpace,
};
use crate::error::{Error, Result};
use crate::numerics::{sym_eig, SymmetricSpectrum};

/// Largest condition number of `[basis | J_c basis]` accepted by the
/// Tomita construction.
pub const MAX_CONDITION: f64 = 1e12;
/// Modular eigenvalues closer than this to 1 count as non-factorial.
pub const UNIT_GUARD: f64 = 1e-10;
/// Attempts before random sampling gives up.
pub const MAX_ATTEMPTS: usize = 1000;

/// Modular operator and conjugation as real `2n×2n` matrices.
///
/// Antilinear maps are represented by their real matrices; their adjoint is
/// the plain transpose, so `Δ = SᵀS`.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub s: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub log_delta: DMatrix<f64>,
    pub j: DMatrix<f64>,
    /// Eigendecomposition of `Δ`, ascending; each value appears twice.
    pub spectrum: SymmetricSpectrum,
}

impl ModularData {
    /// `Δ^{it} = cos(t logΔ) + J_c sin(t logΔ)`.
    pub fn delta_it(&self, jc: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
        let cos = spectral_fn(&self.spectrum, |l| (t * l.ln()).cos());
        let sin = spectral_fn(&self.spectrum, |l| (t * l.ln()).sin());
        cos + jc * sin
    }

    pub fn delta_pow(&self, p: f64) -> DMatrix<f64> {
        spectral_fn(&self.spectrum, |l| l.powf(p))
    }

    /// Distance of the closest modular eigenvalue to 1.
    pub fn unit_distance(&self) -> f64 {
        self.spectrum
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &l| m.min((l - 1.0).abs()))
    }
}

/// Residuals of the modular identities, all relative to the size of the
/// operators involved.
#[derive(Debug, Clone, Serialize)]
pub struct ModularIdentities {
    pub j_squared: f64,
    pub j_delta_j: f64,
    /// Worst over `t ∈ {0.3, 1, √2}`.
    pub delta_it_invariance: f64,
    pub s_fixes_basis: f64,
    pub s_polar: f64,
    pub j_antilinear: f64,
    pub delta_linear: f64,
}

impl ModularIdentities {
    pub fn max(&self) -> f64 {
        [
            self.j_squared,
            self.j_delta_j,
            self.delta_it_invariance,
            self.s_fixes_basis,
            self.s_polar,
            self.j_antilinear,
            self.delta_linear,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// A real subspace `H ⊂ ℂ^n` of real dimension `n` with `H ∩ iH = {0}`,
/// together with its modular data.
#[derive(Debug, Clone)]
pub struct StandardSubspace {
    pub space: ComplexSpace,
    pub basis: DMatrix<f64>,
    /// Orthonormal basis of `H`.
    pub orth: DMatrix<f64>,
    /// Condition number of `[basis | J_c basis]`.
    pub condition: f64,
    /// `H ∩ H' = {0}`.
    pub factorial: bool,
    pub modular: ModularData,
    /// Draws needed by [`StandardSubspace::random`]; 1 otherwise.
    pub attempts: usize,
}

impl StandardSubspace {
    pub fn new(space: ComplexSpace, basis: DMatrix<f64>) -> Result<Self> {
        let n = space.n;
        if basis.nrows() != 2 * n || basis.ncols() != n {
            return Err(Error::Data(format!(
                "basis must be {}x{n}, got {}x{}",
                2 * n,
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::Data("basis has non-finite entries".into()));
        }
        let b = stack(&basis, &(&space.jc * &basis));
        let s = singular_values(&b)?;
        let rank = s.iter().filter(|&&v| v > 1e-10 * s[0]).count();
        let condition = s[0] / s[2 * n - 1];
        if rank < 2 * n {
            return Err(Error::Validation(format!(
                "[basis | i basis] has rank {rank} < {} (condition {condition:.3e}): H ∩ iH is not trivial",
                2 * n
            )));
        }
        let orth = orthonormal_columns(&basis);
        let complement = &space.jc * orthogonal_complement(&orth)?;
        let factorial = numerical_rank(&stack(&orth, &complement))? == 2 * n;
        let modular = tomita_data(&space, &orth, condition)?;
        Ok(Self {
            space,
            basis,
            orth,
            condition,
            factorial,
            modular,
            attempts: 1,
        })
    }

    /// Gaussian basis drawn from `seed`, redrawn until standard and, for
    /// even `n`, factorial with no modular eigenvalue near 1.
    ///
    /// Odd `n` admits no factorial subspace (the form `Im⟨h, h'⟩` on `H` is
    /// antisymmetric of odd size), so there only standardness is required.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let space = ComplexSpace::new(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for attempt in 1..=MAX_ATTEMPTS {
            let basis = DMatrix::from_fn(2 * n, n, |_, _| StandardNormal.sample(&mut rng));
            match Self::new(space.clone(), basis) {
                Ok(mut h) => {
                    let ok = n % 2 == 1 || (h.factorial && h.modular.unit_distance() > UNIT_GUARD);
                    if ok {
                        h.attempts = attempt;
                        return Ok(h);
                    }
                }
                Err(Error::Validation(_)) | Err(Error::Conditioning(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Err(Error::Validation(format!(
            "no acceptable subspace in {MAX_ATTEMPTS} draws (n={n}, seed={seed})"
        )))
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    /// Orthonormal basis of the symplectic complement
    /// `H' = {Ψ : Im⟨h, Ψ⟩ = 0 for h ∈ H} = J_c(H^⊥)`.
    pub fn symplectic_complement(&self) -> DMatrix<f64> {
        let perp = orthogonal_complement(&self.orth).expect("finite orthonormal basis");
        &self.space.jc * perp
    }

    pub fn identities(&self) -> ModularIdentities {
        let m = 2 * self.n();
        let id = DMatrix::<f64>::identity(m, m);
        let md = &self.modular;
        let jc = &self.space.jc;
        let dnorm = md.delta.norm().max(1.0);
        let inv = md.delta_pow(-1.0);
        let mut invariance: f64 = 0.0;
        for t in [0.3, 1.0, 2f64.sqrt()] {
            let moved = md.delta_it(jc, t) * &self.orth;
            let off = &moved - &self.orth * (self.orth.transpose() * &moved);
            invariance = invariance.max(off.norm() / moved.norm());
        }
        let polar = &md.j * md.delta_pow(0.5);
        ModularIdentities {
            j_squared: (&md.j * &md.j - &id).norm() / (m as f64).sqrt(),
            j_delta_j: (&md.j * &md.delta * &md.j - &inv).norm() / dnorm,
            delta_it_invariance: invariance,
            s_fixes_basis: (&md.s * &self.basis - &self.basis).norm() / self.basis.norm(),
            s_polar: (&polar - &md.s).norm() / md.s.norm(),
            j_antilinear: (&md.j * jc + jc * &md.j).norm() / (m as f64).sqrt(),
            delta_linear: (&md.delta * jc - jc * &md.delta).norm() / dnorm,
        }
    }

    /// `P_H = (1 − Δ)^{-1} + J Δ^{1/2} (1 − Δ)^{-1}`.
    pub fn cutting_projection_formula(&self) -> Result<DMatrix<f64>> {
        self.require_factorial()?;
        let md = &self.modular;
        let resolvent = spectral_fn(&md.spectrum, |l| 1.0 / (1.0 - l));
        let root_resolvent = spectral_fn(&md.spectrum, |l| l.sqrt() / (1.0 - l));
        Ok(&resolvent + &md.j * root_resolvent)
    }

    /// Projection onto `H` along `H'` by a direct solve against the
    /// concatenated bases.
    pub fn cutting_projection_direct(&self) -> Result<DMatrix<f64>> {
        self.require_factorial()?;
        let n = self.n();
        let both = stack(&self.orth, &self.symplectic_complement());
        let inv = both
            .try_inverse()
            .ok_or_else(|| Error::Conditioning("[H | H'] is singular".into()))?;
        let mut keep = DMatrix::zeros(2 * n, 2 * n);
        keep.columns_mut(0, n).copy_from(&self.orth);
        Ok(keep * inv)
    }

    fn require_factorial(&self) -> Result<()> {
        let dist = self.modular.unit_distance();
        if !self.factorial || dist <= UNIT_GUARD {
            return Err(Error::DegenerateSpectrum(format!(
                "modular operator has an eigenvalue within {dist:.3e} of 1; \
                 use the factorial component"
            )));
        }
        Ok(())
    }

    /// Restriction to the spectral subspace of `Δ` away from 1.
    ///
    /// Returns `None` when `Δ = 1` (for instance `H = ℝ^n`).
    pub fn factorial_component(&self) -> Result<Option<FactorialComponent>> {
        let md = &self.modular;
        let jc = &self.space.jc;
        let m = 2 * self.n();
        let mut frame: Vec<DVector<f64>> = Vec::new();
        for k in 0..m {
            if (md.spectrum.eigenvalues[k] - 1.0).abs() <= UNIT_GUARD {
                continue;
            }
            let mut v = md.spectrum.vector(k);
            for e in &frame {
                let ie = jc * e;
                v -= e * e.dot(&v) + &ie * ie.dot(&v);
            }
            let norm = v.norm();
            if norm > 0.5 {
                frame.push(v / norm);
            }
        }
        if frame.is_empty() {
            return Ok(None);
        }
        let k = frame.len();
        let mut embed = DMatrix::zeros(m, 2 * k);
        for (i, e) in frame.iter().enumerate() {
            embed.set_column(i, e);
            embed.set_column(k + i, &(jc * e));
        }
        // the coordinates of H ∩ K; the projected basis has singular values 0 and 1
        let (local, sv) = leading_range(&(embed.transpose() * &self.orth), k)?;
        if sv[k - 1] < 0.5 || sv.get(k).is_some_and(|&v| v > 0.5) {
            return Err(Error::Conditioning(format!(
                "H does not split along the modular spectrum (projected values {sv:?})"
            )));
        }
        let subspace = StandardSubspace::new(ComplexSpace::new(k)?, local)?;
        Ok(Some(FactorialComponent { embed, subspace }))
    }

    /// Entropy operator `E_H = J_c P_H J_c logΔ`, assembled on the factorial
    /// component and extended by zero (`logΔ = 0` on the rest).
    pub fn entropy_operator(&self) -> Result<EntropyOperator> {
        let m = 2 * self.n();
        let Some(fc) = self.factorial_component()? else {
            return Ok(EntropyOperator {
                matrix: DMatrix::zeros(m, m),
                embed: DMatrix::zeros(m, 0),
                local_projection: DMatrix::zeros(0, 0),
                local_generator: DMatrix::zeros(0, 0),
                local_jc: DMatrix::zeros(0, 0),
            });
        };
        let h = &fc.subspace;
        let p = h.cutting_projection_formula()?;
        let jc = &h.space.jc;
        let local = jc * &p * jc * &h.modular.log_delta;
        let generator = -(jc * &h.modular.log_delta);
        Ok(EntropyOperator {
            matrix: &fc.embed * local * fc.embed.transpose(),
            embed: fc.embed,
            local_projection: p,
            local_generator: generator,
            local_jc: jc.clone(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FactorialComponent {
    /// Isometry `ℝ^{2k} → ℝ^{2n}` intertwining the complex structures.
    pub embed: DMatrix<f64>,
    pub subspace: StandardSubspace,
}

#[derive(Debug, Clone)]
pub struct EntropyOperator {
    pub matrix: DMatrix<f64>,
    embed: DMatrix<f64>,
    local_projection: DMatrix<f64>,
    local_generator: DMatrix<f64>,
    local_jc: DMatrix<f64>,
}

impl EntropyOperator {
    /// `S(Φ) = g(Φ, E_H Φ)`.
    pub fn entropy(&self, phi: &DVector<f64>) -> f64 {
        phi.dot(&(&self.matrix * phi))
    }

    /// `S(Φ) = Im⟨Φ, P_H A_H Φ⟩` with `A_H = −i logΔ`.
    pub fn entropy_via_generator(&self, phi: &DVector<f64>) -> f64 {
        if self.embed.ncols() == 0 {
            return 0.0;
        }
        let local = self.embed.transpose() * phi;
        let moved = &self.local_projection * (&self.local_generator * &local);
        (&self.local_jc * &local).dot(&moved)
    }

    /// `‖E − Eᵀ‖ / ‖E‖`.
    pub fn asymmetry(&self) -> f64 {
        let norm = self.matrix.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.matrix - self.matrix.transpose()).norm() / norm
    }

    /// Smallest eigenvalue of the symmetric part relative to its norm.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        Ok(sym_eig(&sym)?.eigenvalues[0])
    }
}

fn stack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// `S = B diag(I, −I) B⁻¹` and its polar decomposition `S = J Δ^{1/2}`.
fn tomita_data(space: &ComplexSpace, orth: &DMatrix<f64>, condition: f64) -> Result<ModularData> {
    let n = space.n;
    if condition > MAX_CONDITION {
        return Err(Error::Conditioning(format!(
            "condition number of [basis | i basis] is {condition:.3e} > {MAX_CONDITION:.0e}"
        )));
    }
    let b = stack(orth, &(&space.jc * orth));
    let inv = b
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("[basis | i basis] is singular".into()))?;
    let mut flip = b;
    flip.columns_mut(n, n).neg_mut();
    let s = flip * inv;
    let (j, root) = polar(&s)?;
    let root_spec = sym_eig(&root)?;
    if root_spec.eigenvalues[0] <= 0.0 {
        return Err(Error::Conditioning("Tomita operator is singular".into()));
    }
    let spectrum = SymmetricSpectrum {
        eigenvalues: root_spec.eigenvalues.iter().map(|s| s * s).collect(),
        eigenvectors: root_spec.eigenvectors,
        residual_norm: root_spec.residual_norm,
    };
    let delta = spectral_fn(&spectrum, |l| l);
    let log_delta = spectral_fn(&spectrum, f64::ln);
    Ok(ModularData {
        s,
        delta,
        log_delta,
        j,
        spectrum,
    })
}

pub(crate) fn random_vectors(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng)))
        .collect()
}

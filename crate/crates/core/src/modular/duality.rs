use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::space::{spectral_fn, standard_structure, ComplexSpace};
use super::standard::{random_vectors, StandardSubspace, MAX_ATTEMPTS, UNIT_GUARD};
use crate::error::{param, Error, Result};
use crate::numerics::eigen::cholesky;
use crate::numerics::sym_eig;

/// Field/momentum pair `H_+ ⊕ H_-` with the complex structure
/// `ı = [[0, μ⁻¹], [−μ, 0]]` and a subspace `K = K_+ ⊕ K_-`.
///
/// The modular theory of `K` is computed in the frame
/// `T = diag(μ^{1/2}, −μ^{-1/2})`, which carries `ı` to the standard `J_c`
/// and the real part of the scalar product to the identity.
#[derive(Debug, Clone)]
pub struct DualityModel {
    pub n: usize,
    pub mu: DMatrix<f64>,
    pub k_plus: DMatrix<f64>,
    pub k_minus: DMatrix<f64>,
    /// `ı` in the original coordinates.
    pub structure: DMatrix<f64>,
    frame: DMatrix<f64>,
    frame_inv: DMatrix<f64>,
    /// `K` carried to the standard frame.
    pub doubled: StandardSubspace,
    pub attempts: usize,
}

impl DualityModel {
    pub fn new(mu: DMatrix<f64>, k_plus: DMatrix<f64>, k_minus: DMatrix<f64>) -> Result<Self> {
        let n = mu.nrows();
        if n == 0 || mu.ncols() != n {
            return param(format!("mu must be square and nonempty, got {}x{}", mu.nrows(), mu.ncols()));
        }
        if k_plus.nrows() != n || k_minus.nrows() != n {
            return param(format!(
                "subspace bases must have {n} rows, got {} and {}",
                k_plus.nrows(),
                k_minus.nrows()
            ));
        }
        if k_plus.ncols() + k_minus.ncols() != n {
            return param(format!(
                "dim K_+ + dim K_- must equal {n}, got {} + {}",
                k_plus.ncols(),
                k_minus.ncols()
            ));
        }
        if (&mu - mu.transpose()).amax() > 1e-12 * mu.amax() {
            return param("mu is not symmetric");
        }
        cholesky(&mu).map_err(|e| Error::Parameter(format!("mu is not positive definite: {e}")))?;
        let spec = sym_eig(&mu)?;
        let root = spectral_fn(&spec, f64::sqrt);
        let inv_root = spectral_fn(&spec, |l| 1.0 / l.sqrt());
        let mu_inv = spectral_fn(&spec, |l| 1.0 / l);
        let frame = block_diag(&root, &(-&inv_root));
        let frame_inv = block_diag(&inv_root, &(-&root));
        let mut structure = DMatrix::zeros(2 * n, 2 * n);
        structure.view_mut((0, n), (n, n)).copy_from(&mu_inv);
        structure.view_mut((n, 0), (n, n)).copy_from(&(-&mu));
        let mut basis = DMatrix::zeros(2 * n, n);
        let kp = k_plus.ncols();
        basis.view_mut((0, 0), (n, kp)).copy_from(&k_plus);
        basis.view_mut((n, kp), (n, n - kp)).copy_from(&k_minus);
        let doubled = StandardSubspace::new(ComplexSpace::new(n)?, &frame * basis)?;
        Ok(Self {
            n,
            mu,
            k_plus,
            k_minus,
            structure,
            frame,
            frame_inv,
            doubled,
            attempts: 1,
        })
    }

    /// Random SPD `μ` and Gaussian `K_±` with `dim K_+ = ⌊n/2⌋`; redrawn
    /// until `K` is standard and, for even `n`, factorial.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return param(format!("duality model needs n >= 2, got {n}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian(n, n, &mut rng);
        let mu = (&a * a.transpose()) / n as f64 + DMatrix::identity(n, n) * 0.5;
        Self::with_random_subspaces(mu, &mut rng)
    }

    /// Discretized wave model: `μ = diag|p_j|` on a symmetric frequency grid
    /// avoiding `p = 0`, with Gaussian `K_±`.
    pub fn wave(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return param(format!("duality model needs n >= 2, got {n}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (-1.0 + (2 * i + 1) as f64 / n as f64).abs() * n as f64
            } else {
                0.0
            }
        });
        Self::with_random_subspaces(mu, &mut rng)
    }

    fn with_random_subspaces(mu: DMatrix<f64>, rng: &mut ChaCha8Rng) -> Result<Self> {
        let n = mu.nrows();
        let kp = n / 2;
        for attempt in 1..=MAX_ATTEMPTS {
            let k_plus = gaussian(n, kp, rng);
            let k_minus = gaussian(n, n - kp, rng);
            match Self::new(mu.clone(), k_plus, k_minus) {
                Ok(mut m) => {
                    let h = &m.doubled;
                    if n % 2 == 1 || (h.factorial && h.modular.unit_distance() > UNIT_GUARD) {
                        m.attempts = attempt;
                        return Ok(m);
                    }
                }
                Err(Error::Validation(_)) | Err(Error::Conditioning(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Err(Error::Validation(format!("no standard K_+ ⊕ K_- in {MAX_ATTEMPTS} draws")))
    }

    /// `β(a, b) = ⟨g_a, f_b⟩ − ⟨f_a, g_b⟩`.
    pub fn beta(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let n = self.n;
        a.rows(n, n).dot(&b.rows(0, n)) - a.rows(0, n).dot(&b.rows(n, n))
    }

    /// `max(‖ı² + I‖, ‖ıᵀΩı − Ω‖ / ‖Ω‖)` with `β(a, b) = aᵀΩb`.
    pub fn structure_residual(&self) -> f64 {
        let m = 2 * self.n;
        let i = &self.structure;
        let sq = (i * i + DMatrix::identity(m, m)).amax();
        let omega = -standard_structure(self.n);
        let kept = (i.transpose() * &omega * i - &omega).amax();
        sq.max(kept / i.amax().max(1.0).powi(2))
    }

    /// A map of the standard frame expressed in the original coordinates.
    fn pull_back(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.frame_inv * x * &self.frame
    }

    /// Generic entropy `S(Φ)` of the doubled subspace for `Φ = f ⊕ g`.
    pub fn entropy(&self, phi: &DVector<f64>) -> Result<f64> {
        let e = self.doubled.entropy_operator()?;
        Ok(e.entropy(&(&self.frame * phi)))
    }

    /// Projection onto `K_+` along `K_-^⊥` and onto `K_-` along `K_+^⊥`.
    pub fn cutting_blocks(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if self.k_plus.ncols() != self.k_minus.ncols() {
            return Err(Error::DegenerateSpectrum(format!(
                "dim K_+ = {} differs from dim K_- = {}; the cutting projection does not exist",
                self.k_plus.ncols(),
                self.k_minus.ncols()
            )));
        }
        let oblique = |onto: &DMatrix<f64>, dual: &DMatrix<f64>| -> Result<DMatrix<f64>> {
            let g = (dual.transpose() * onto)
                .try_inverse()
                .ok_or_else(|| Error::DegenerateSpectrum("K_+ meets the annihilator of K_-".into()))?;
            Ok(onto * g * dual.transpose())
        };
        Ok((oblique(&self.k_plus, &self.k_minus)?, oblique(&self.k_minus, &self.k_plus)?))
    }

    pub fn block_structure_certificate(&self, samples: usize, seed: u64) -> Result<BlockReport> {
        let n = self.n;
        let h = &self.doubled;
        let log_delta = self.pull_back(&h.modular.log_delta);
        let j = self.pull_back(&h.modular.j);
        let generator = -(&self.structure * &log_delta);
        let m = generator.view((0, n), (n, n)) / PI;
        let l = generator.view((n, 0), (n, n)) / PI;
        let m_star = &self.mu * m.transpose() * &self.mu;
        let mu_m_mu = &self.mu * &m * &self.mu;
        let scale = l.norm().max(m_star.norm());
        let rel = |x: f64| if scale == 0.0 { x } else { x / scale };

        let mut entropy_cross_check = None;
        let mut cutting_block_residual = None;
        if h.factorial && h.modular.unit_distance() > UNIT_GUARD {
            let (p_plus, p_minus) = self.cutting_blocks()?;
            let p = self.pull_back(&h.cutting_projection_formula()?);
            let blocks = block_diag(&p_plus, &p_minus);
            cutting_block_residual = Some((&p - &blocks).norm() / blocks.norm());
            let e = h.entropy_operator()?;
            let mut worst: f64 = 0.0;
            for phi in random_vectors(2 * n, samples, seed) {
                let f = phi.rows(0, n).into_owned();
                let g = phi.rows(n, n).into_owned();
                let field = -PI * f.dot(&(&p_minus * (&l * &f)));
                let momentum = PI * g.dot(&(&p_plus * (&m * &g)));
                let generic = e.entropy(&(&self.frame * &phi));
                let size = field.abs() + momentum.abs() + f64::MIN_POSITIVE;
                worst = worst.max((generic - field - momentum).abs() / size);
            }
            entropy_cross_check = Some(worst);
        }
        let identities = h.identities();
        Ok(BlockReport {
            n,
            dim_k_plus: self.k_plus.ncols(),
            dim_k_minus: self.k_minus.ncols(),
            condition: h.condition,
            factorial: h.factorial,
            attempts: self.attempts,
            structure_residual: self.structure_residual(),
            modular_identities: identities.max(),
            log_delta_offdiag: off_diagonal_mass(&log_delta, n),
            j_offdiag: off_diagonal_mass(&j, n),
            generator_diag: diagonal_mass(&generator, n),
            m_star_plus_l: rel((&m_star + &l).norm()),
            l_plus_mu_m_mu: rel((&l + &mu_m_mu).norm()),
            cutting_block_residual,
            entropy_cross_check,
            m_block: rows(&m.into_owned()),
            l_block: rows(&l.into_owned()),
        })
    }
}

/// Block theorem residuals for one duality model, in the `H_+ ⊕ H_-`
/// split. Masses are Frobenius ratios; `None` marks a check that needs a
/// factorial subspace.
#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub dim_k_plus: usize,
    pub dim_k_minus: usize,
    pub condition: f64,
    pub factorial: bool,
    pub attempts: usize,
    pub structure_residual: f64,
    pub modular_identities: f64,
    pub log_delta_offdiag: f64,
    pub j_offdiag: f64,
    pub generator_diag: f64,
    /// `‖μMᵀμ + L‖`, relative.
    pub m_star_plus_l: f64,
    /// `‖L + μMμ‖`, relative.
    pub l_plus_mu_m_mu: f64,
    /// `‖P_K − diag(P_+, P_-)‖ / ‖P_K‖`.
    pub cutting_block_residual: Option<f64>,
    /// Worst relative gap between the generic entropy and
    /// `−π⟨f, P_- L f⟩ + π⟨g, P_+ M g⟩`.
    pub entropy_cross_check: Option<f64>,
    pub m_block: Vec<Vec<f64>>,
    pub l_block: Vec<Vec<f64>>,
}

impl BlockReport {
    /// Whether every available check meets its tolerance.
    pub fn passes(&self) -> bool {
        self.structure_residual < 1e-12
            && self.modular_identities < 1e-9
            && self.log_delta_offdiag < 1e-9
            && self.j_offdiag < 1e-9
            && self.generator_diag < 1e-9
            && self.m_star_plus_l < 1e-8
            && self.l_plus_mu_m_mu < 1e-8
            && self.cutting_block_residual.is_none_or(|r| r < 1e-9)
            && self.entropy_cross_check.is_none_or(|r| r < 1e-8)
    }
}

fn gaussian(r: usize, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((p, p), (q, q)).copy_from(b);
    out
}

fn off_diagonal_mass(x: &DMatrix<f64>, n: usize) -> f64 {
    let total = x.norm();
    if total == 0.0 {
        return 0.0;
    }
    let off = x.view((0, n), (n, n)).norm_squared() + x.view((n, 0), (n, n)).norm_squared();
    off.sqrt() / total
}

fn diagonal_mass(x: &DMatrix<f64>, n: usize) -> f64 {
    let total = x.norm();
    if total == 0.0 {
        return 0.0;
    }
    let on = x.view((0, 0), (n, n)).norm_squared() + x.view((n, n), (n, n)).norm_squared();
    on.sqrt() / total
}

fn rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    x.row_iter().map(|r| r.iter().copied().collect()).collect()
}

use serde::Serialize;

use super::standard::{random_vectors, ModularIdentities, StandardSubspace};
use crate::error::Result;

/// Tolerance for the modular identities and the cutting-formula agreement.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Checks on one seeded random standard subspace of `ℂ^n`.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub n: usize,
    pub seed: u64,
    pub attempts: usize,
    pub condition: f64,
    pub factorial: bool,
    /// Complex dimension of the factorial component.
    pub factorial_dim: usize,
    pub identities: ModularIdentities,
    pub identities_max: f64,
    /// `‖P_formula − P_direct‖ / ‖P_direct‖` on the factorial component.
    pub cutting_agreement: Option<f64>,
    /// `min S(Φ)/‖Φ‖²` over the sampled vectors.
    pub entropy_min: f64,
    /// Operator norm bound `‖E‖_F` used to scale `entropy_min`.
    pub entropy_scale: f64,
    /// Worst relative gap between `g(Φ, EΦ)` and `Im⟨Φ, P A Φ⟩`.
    pub generator_agreement: f64,
    pub asymmetry: f64,
    pub vectors: usize,
}

impl InstanceReport {
    pub fn passes(&self) -> bool {
        self.identities_max < IDENTITY_TOL
            && self.cutting_agreement.is_none_or(|r| r < IDENTITY_TOL)
            && self.entropy_min >= -1e-10 * (1.0 + self.entropy_scale)
            && self.generator_agreement < IDENTITY_TOL
            && self.asymmetry < IDENTITY_TOL
    }
}

/// Draws `StandardSubspace::random(n, seed)` and checks it against
/// `vectors` Gaussian test vectors.
pub fn instance_report(n: usize, seed: u64, vectors: usize) -> Result<InstanceReport> {
    let h = StandardSubspace::random(n, seed)?;
    let identities = h.identities();
    let component = h.factorial_component()?;
    let factorial_dim = component.as_ref().map_or(0, |c| c.subspace.n());
    let target = if h.factorial {
        Some(&h)
    } else {
        component.as_ref().map(|c| &c.subspace)
    };
    let cutting_agreement = match target {
        Some(k) => {
            let p = k.cutting_projection_formula()?;
            let q = k.cutting_projection_direct()?;
            Some((&p - &q).norm() / q.norm())
        }
        None => None,
    };
    let e = h.entropy_operator()?;
    let mut entropy_min = f64::INFINITY;
    let mut generator_agreement: f64 = 0.0;
    for phi in random_vectors(2 * n, vectors, seed ^ 0x5eed) {
        let s = e.entropy(&phi);
        entropy_min = entropy_min.min(s / phi.norm_squared());
        let alt = e.entropy_via_generator(&phi);
        generator_agreement = generator_agreement.max((s - alt).abs() / (1.0 + s.abs()));
    }
    Ok(InstanceReport {
        n,
        seed,
        attempts: h.attempts,
        condition: h.condition,
        factorial: h.factorial,
        factorial_dim,
        identities_max: identities.max(),
        identities,
        cutting_agreement,
        entropy_min,
        entropy_scale: e.matrix.norm(),
        generator_agreement,
        asymmetry: e.asymmetry(),
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instances_pass() {
        for n in [1, 2, 3, 6] {
            let r = instance_report(n, 7, 64).unwrap();
            assert!(r.passes(), "{r:?}");
            assert_eq!(r.cutting_agreement.is_some(), r.factorial_dim > 0);
        }
    }
}

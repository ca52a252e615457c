//! Finite-dimensional modular theory: standard subspaces, the modular
//! operator and conjugation, cutting projections, entropy operators and the
//! field/momentum duality model.
//!
//! Complex vectors are real vectors `(x, y)` of twice the length. The scalar
//! product is antilinear in its first slot, so `Im⟨Φ, Ψ⟩ = g(J_c Φ, Ψ)`.

pub mod duality;
pub mod space;
pub mod standard;
pub mod suite;

pub use duality::{BlockReport, DualityModel};
pub use space::ComplexSpace;
pub use standard::{
    EntropyOperator, FactorialComponent, ModularData, ModularIdentities, StandardSubspace,
};
pub use suite::{instance_report, InstanceReport};

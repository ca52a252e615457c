//! The ball in `ℝ^d`, one spherical-harmonic sector at a time.

pub mod certificate;
pub mod forms;
pub mod hankel;
pub mod sector;

pub use certificate::{
    hermiticity_witness, nd_commutation_certificate, HermiticityReport, WitnessOperator,
};
pub use forms::{assemble_radial_forms, RadialForms};
pub use hankel::sector_hankel_nystrom;
pub use sector::{radial_basis, RadialBasis, SpectralSector};

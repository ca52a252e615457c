//! The interval: prolate form in the Legendre basis, sinc and Fourier
//! kernels by Nyström, and the commutation certificate tying them together.

pub mod certificate;
pub mod fourier;
pub mod kernel;
pub mod matrix;

pub use certificate::{commutation_certificate, concentration_values, CommutationReport};
pub use fourier::{fourier_commutation_family, fourier_commutation_fullline, GaussPoly};
pub use kernel::{angle_operator_nystrom, truncated_fourier_nystrom, KernelKind, KernelOperator};
pub use matrix::{assemble_prolate_matrix, prolate_eigenpairs, ProlateMatrix1D, ProlateSpectrum};

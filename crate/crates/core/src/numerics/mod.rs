//! Quadrature, orthogonal polynomials, spherical Bessel functions and dense
//! symmetric eigensolvers.

pub mod bessel;
pub mod eigen;
pub mod polynomial;
pub mod quadrature;

pub use bessel::spherical_bessel;
pub use eigen::{generalized_sym_eig, sym_eig, tridiagonal_eig, SymmetricSpectrum};
pub use polynomial::{legendre_eval, normalized_legendre_table, JacobiRecurrence};
pub use quadrature::{gauss_rule, QuadratureRule, WeightKind};

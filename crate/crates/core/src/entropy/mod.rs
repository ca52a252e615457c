//! Quadratic entropy functionals on the ball: Born, parabolic, Legendre
//! and prolate entropies, the balance between them, the entropy of a free
//! wave, and the general-radius relation.

pub mod balance;
pub mod function;
pub mod wave;

pub use balance::{entropy_report, general_radius_report, EntropyReport, GeneralRadiusReport};
pub use function::{ball_volume, sphere_area, BallFunction, Profile};
pub use wave::{entropy_operator_blocks, wave_entropy, CauchyData, EntropyBlocks, WaveEntropy};

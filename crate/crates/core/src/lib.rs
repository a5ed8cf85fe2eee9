//! Short multiplicative character sums modulo a prime: exact enumeration,
//! Fourier reductions, kernel subtraction, and random multiplicative models.

pub mod arith;
pub mod characters;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod polya;
pub mod rmf;
pub mod scalar;
pub mod short_sums;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Character = characters::Character<f64>;
pub type CharacterGroup = characters::CharacterGroup<f64>;
pub type EmpiricalDistribution = short_sums::EmpiricalDistribution<f64>;
pub type CosineSeries = polya::CosineSeries<f64>;
pub type TrigPolynomial = polya::TrigPolynomial<f64>;
pub type KernelExperiment = kernel::KernelExperiment<f64>;
pub type RmfSample = rmf::RmfSample<f64>;

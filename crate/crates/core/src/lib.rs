//! Conditioned Galton-Watson trees: codings, exact samplers, exact finite-`n`
//! laws and the stable-process quantities they converge to.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32`, `f64`); exact
//! enumeration is generic over [`scalar::Weight`], which also covers
//! [`ExactWeight`]. The aliases below fix the usual choices.

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod codings;
pub mod error;
pub mod exactlaw;
pub mod limits;
pub mod offspring;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};

pub type ExactWeight = num_rational::BigRational;

pub type OffspringLawF64 = offspring::OffspringLaw<f64>;
pub type OffspringLawF32 = offspring::OffspringLaw<f32>;
pub type StepLawF64 = offspring::StepLaw<f64>;
pub type StableLawF64 = stable::StableLaw<f64>;
pub type StableLawF32 = stable::StableLaw<f32>;
pub type PmfTableF64 = exactlaw::PmfTable<f64>;
pub type ProgenyLawF64 = exactlaw::ProgenyLaw<f64>;
pub type RescaledPathF64 = codings::RescaledPath<f64>;

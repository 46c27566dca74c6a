//! Tropical-limit toolkit: idempotent monoids, filters and ultrametrics,
//! nesting decompositions of partition functions, tropical thermodynamics,
//! dequantified Gibbs weights and statistical amoebas.

pub mod amoeba;
pub mod dequantify;
pub mod extended;
pub mod filters;
pub mod nesting;
pub mod scalar;
pub mod schema;
pub mod subset;
pub mod thermo;
pub mod tropical;
pub mod ultrametric;

pub use extended::{Extended, ExtendedRational, ExtendedReal};
pub use scalar::{NumericMode, Scalar};
pub use subset::Subset;
pub use tropical::{Mode, TropicalError, TropicalMonoid};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

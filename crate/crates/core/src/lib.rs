//! Nonlinear congruential generators over `Z/p^k` built from compatible functions,
//! with exact interpolation-series criteria, brute-force and threshold certificates,
//! and linear-complexity diagnostics.

pub mod analysis;
pub mod certify;
pub mod error;
pub mod expr;
pub mod genlib;
pub mod mahler;
pub mod padic;
pub mod scalar;

pub use error::{Error, Result};
pub use padic::{CompositeModulus, Modulus, ModulusSpec, Order, ResidueInt};
pub use scalar::Natural;

pub type Residue = ResidueInt<num_bigint::BigUint>;
pub type Residue64 = ResidueInt<u64>;
pub type Modulus64 = Modulus<u64>;
pub type BigModulus = Modulus<num_bigint::BigUint>;
pub type CompositeModulus64 = CompositeModulus<u64>;

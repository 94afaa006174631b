//! Hecke groups, Hecke-symmetric rational period functions and the remainder
//! terms of the associated Dirichlet-series functional equations.
//!
//! The crate is `no_std` (it needs `alloc`). Exact arithmetic happens in
//! [`lambda_ring`] (the ring `Z[λ_p]`, `λ_p = 2cos(π/p)`), [`hecke_group`] and
//! [`quadratic_forms`]; everything analytic lives in [`rpf`],
//! [`special_functions`] and [`mellin`].
//!
//! IO, file formats and the command-line driver live in the companion
//! `hecke-rpf` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod hecke_group;
pub mod interval;
pub mod lambda_ring;
pub mod mellin;
pub mod qexp;
pub mod quadratic_forms;
pub mod quadrature;
pub mod real;
pub mod rpf;
pub mod special_functions;

pub use error::{Error, Result};
pub use hecke_group::{generators, Classification, ExtComplex, GroupElem, IntervalDecomposition};
pub use lambda_ring::{minimal_polynomial, LambdaRing, RingElem};
pub use quadratic_forms::{
    enumerate_simple_cycle, Branch, HyperbolicPoint, QuadraticForm, SimpleCycle,
};
pub use real::{DoubleDouble, Real};
pub use rpf::{RpfSpec, RpfTerm};

/// Complex numbers in binary64.
pub type C64 = num_complex::Complex64;

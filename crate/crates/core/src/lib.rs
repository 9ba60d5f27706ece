//! Finitely banded Toeplitz matrices under small random perturbations.
//!
//! This crate holds the pure numerical part of `toepspec`: Laurent
//! polynomial symbols and their root profiles, self-contained dense complex
//! kernels (LU, Hessenberg QR, Hermitian tridiagonal QL), Toeplitz
//! constructors and identities, noise ensembles, and exact small-N oracles
//! for the corner-perturbation determinant expansion.
//!
//! It is `no_std` and only needs `alloc`. File formats, experiment
//! orchestration and the command line live in the `toepspec` crate.
#![no_std]
#![deny(rust_2018_idioms)]
#![allow(
    clippy::needless_range_loop,
    clippy::many_single_char_names,
    clippy::neg_cmp_op_on_partial_ord
)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod expansion;
pub mod linalg;
pub mod matrix;
pub mod noise;
pub mod rng;
pub mod roots;
pub mod stats;
pub mod symbol;
pub mod toeplitz;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64 as C64;
pub use symbol::{RegionLabel, RootProfile, Symbol};

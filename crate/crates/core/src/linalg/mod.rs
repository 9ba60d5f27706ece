//! Self-contained dense complex kernels.
//!
//! * [`lu`]: partial-pivoted LU, log-determinants and solves.
//! * [`eigen`]: Householder Hessenberg reduction and single-shift complex QR.
//! * [`hermitian`]: Hermitian tridiagonalization and implicit QL.
//! * [`svd`]: singular values through the Hermitian symmetrization, Stieltjes
//!   transforms and norms.
//! * [`haar`]: Haar-distributed unitary matrices.

pub mod eigen;
pub mod haar;
pub mod hermitian;
pub mod lu;
pub mod svd;

pub use eigen::{eigenvalues, hessenberg, SpectrumResult};
pub use haar::haar_unitary;
pub use hermitian::hermitian_eigenvalues;
pub use lu::{determinant, lu_logdet, LogDet, Lu};
pub use svd::{hs_norm, op_norm_est, singular_values, smin, stieltjes, stieltjes_from_singular_values};

//! Bilinear forms of the time-ordered exponential via a tensor
//! non-Hermitian Lanczos process.
//!
//! The pipeline is:
//!
//! 1. [`problems`] describes a matrix-valued function `A(t)` symbolically.
//! 2. [`discretize`] samples it on a mesh into a 4-mode tensor whose
//!    `(k, l)` slice is the lower-triangular rectangle-rule block of `A_kl`.
//! 3. [`lanczos`] runs the tensor Lanczos recurrence, producing the
//!    block-tridiagonal tensor of coefficients.
//! 4. [`resolvent`] evaluates the `(1,1)` block of the ⋆-resolvent as a
//!    continued fraction and turns it into samples of `wᴴU(t)v`.
//! 5. [`diagnostics`] measures biorthogonality, recurrence quality, moment
//!    matching and solution error; [`tt`] measures tensor-train
//!    compressibility of the discretized operator.

pub mod diagnostics;
pub mod discretize;
pub mod error;
pub mod lanczos;
pub mod problems;
pub mod resolvent;
pub mod tensor;
pub mod tt;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

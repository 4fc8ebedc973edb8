//! Hardy space infinite elements for exterior Helmholtz-type problems.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! core:
//!
//! - [`hardy`]: exact finite-dimensional algebra of the Hardy space `H⁺(S¹)`
//!   in the monomial basis (Möbius map, `T±`, the radial multiplication
//!   operator `D` and its inverse, the bilinear form `B`, the radial bases).
//! - [`surface`]: polynomial spaces and surface differential operators on the
//!   reference triangle.
//! - [`quadrature`]: Gauss–Legendre and collapsed triangle rules.
//! - [`derham`]: the tensor-product complex `W → V → Q → X` of one infinite
//!   prism and its exactness check.
//! - [`segment`]: geometry of one infinite pyramidal frustum and the exterior
//!   mass/stiffness forms for H¹, H(curl) and H(div).
//! - [`linalg`]: dense complex matrices, LU, Schur, SVD rank and a shift-invert
//!   Krylov–Schur eigensolver for `S x = κ² M x`.
//! - [`solvers`]: the 1D and radial-mode exterior problems (DtN, scattering,
//!   resonances) with closed-form references.
//!
//! IO, the command line and file formats live in the companion `hsiem` crate.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` rejects NaN on purpose; index loops follow the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod derham;
pub mod error;
pub mod hardy;
pub mod linalg;
pub mod quadrature;
pub mod segment;
pub mod solvers;
pub mod surface;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

//! Exact moments of the Hermitian Jacobi process.
//!
//! Everything in this crate is exact rational arithmetic: finite-size moments
//! `E tr(J_{t/d}^n)` as exponential polynomials in `t`, the coefficients
//! `c_{n,h,l}` of their large-size limit obtained by polynomial long division
//! in `d`, and the independent routes (symmetric functions, triangular
//! recurrences, closed forms) that reproduce the same coefficients.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

mod error;

pub mod coefficients;
pub mod exact;
pub mod hypergeo;
pub mod moments;
pub mod polyring;

pub use error::Error;
pub use exact::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

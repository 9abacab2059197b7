//! Command-line tools, file formats, coefficient caching and Monte Carlo
//! validation around the exact algebra in `jacobi_core`.

pub mod cache;
pub mod cli;
pub mod formats;
pub mod mc;
pub mod verify;

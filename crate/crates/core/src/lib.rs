//! Fast escaping sets of transcendental entire functions: level sets
//! `A_R^L(f)`, iterated maximum-modulus ladders, growth analysis from power
//! series, spider's-web certificates and raster renders of fundamental holes.

pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub mod escape;
pub mod fmt;
pub mod function;
pub mod growth;
pub mod magnitude;
pub mod raster;
pub mod series;
pub mod signs;

pub use error::{Error, EvalError, Result};
pub use function::{iterate_function, make_builtin, make_random_signs, make_series, EntireFunction};
pub use magnitude::Magnitude;
pub use num_complex::Complex64;

pub mod cauchy;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod green;
pub mod harmonic;
pub mod oracle;
pub mod path;
pub mod szego;

pub use error::{Error, Result};
pub use num_complex::Complex64;

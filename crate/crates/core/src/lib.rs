//! Numerical laboratory for the fourth moment of newform Eisenstein series
//! on Γ₀(N) in the level aspect.

pub mod arith;
pub mod eisenstein;
pub mod error;
pub mod geometry;
pub mod lfun;
pub mod moment;
pub mod par;
pub mod quad;
pub mod recipe;
pub mod report;
pub mod special;
pub mod sum;

pub use error::{LabError, Result};
pub use num_complex::Complex64;

//! Eisenstein series E*_{χ₁,χ₂}(z, s) for Γ₀(q₁q₂): Fourier coefficients,
//! certified evaluation, a lattice-sum oracle, cusp slashes and truncation.

mod cusp;
mod model;
mod oracle;

pub use cusp::{cusp_slash, truncate_at, CuspData, PrimeLevelEisenstein, RoutedValue};
pub use model::{
    constant_term, eval_e_star, eval_e_star_row, eval_nonconstant_row, fourier_cutoff, lambda_coeff, newform_normalize,
    theta, CompletionMode, EisensteinModel, DEFAULT_Y_FLOOR, MAX_FOURIER_TERMS,
};
pub use oracle::{direct_series_oracle, LatticeSum};

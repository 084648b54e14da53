//! Hurwitz and Riemann zeta, Dirichlet L-functions, completed Λ, logarithmic
//! derivatives and Laurent expansions by Cauchy circles.

mod dirichlet;
mod hurwitz;
mod laurent;

pub use dirichlet::{completed_lambda, dirichlet_l, log_derivative, principal_l, LogDerivative, DEFAULT_RADIUS};
pub use hurwitz::{hurwitz_zeta, zeta};
pub use laurent::{cauchy_derivatives, laurent_at, LaurentExpansion};

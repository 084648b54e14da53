use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::log_gamma;
use crate::error::Result;

/// Data of the functional-equation factor f(s, g) of an L-function with
/// spectral parameter t and conductor Q.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFactorSpec {
    pub s: Complex64,
    pub spectral_t: f64,
    pub conductor_q: u64,
}

/// Γ((1−s+it)/2)Γ((1−s−it)/2) / (Γ((s+it)/2)Γ((s−it)/2)).
pub fn gamma_ratio(s: Complex64, t: f64) -> Result<Complex64> {
    let it = Complex64::new(0.0, t);
    let log = log_gamma((1.0 - s + it) / 2.0)? + log_gamma((1.0 - s - it) / 2.0)?
        - log_gamma((s + it) / 2.0)?
        - log_gamma((s - it) / 2.0)?;
    Ok(log.exp())
}

/// f(s, g) = Q^{1/2−s} π^{2s−1} · gamma_ratio(s, t).
pub fn gamma_factor_f(spec: GammaFactorSpec) -> Result<Complex64> {
    let s = spec.s;
    let q = spec.conductor_q as f64;
    let powers = (0.5 - s) * q.ln() + (2.0 * s - 1.0) * PI.ln();
    Ok(powers.exp() * gamma_ratio(s, spec.spectral_t)?)
}

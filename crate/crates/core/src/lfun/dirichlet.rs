use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::hurwitz::{hurwitz_regular, hurwitz_zeta, zeta};
use super::laurent::cauchy_derivatives;
use crate::arith::{prime_divisors, DirichletCharacter};
use crate::error::{pole, LabError, Result};
use crate::special::log_gamma;

/// L(s, χ) = q^{−s} Σ_{a=1}^{q} χ(a) ζ(s, a/q). Works for imprimitive χ.
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    if q == 1 {
        return zeta(s);
    }
    let principal = chi.is_principal();
    if principal && s == Complex64::new(1.0, 0.0) {
        return Err(pole("dirichlet_l", format!("s = 1 for principal character mod {q}")));
    }
    let qf = q as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        let v = chi.value(a as i64);
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        // character sums vanish for non-principal χ, so the 1/(s−1) parts drop
        let h = if principal {
            hurwitz_zeta(s, a as f64 / qf)?
        } else {
            hurwitz_regular(s, a as f64 / qf)?
        };
        acc += v * h;
    }
    Ok(acc * (-s * qf.ln()).exp())
}

/// ζ(s) ∏_{p | N} (1 − p^{−s}).
pub fn principal_l(s: Complex64, n: u64) -> Result<Complex64> {
    let mut v = zeta(s)?;
    for p in prime_divisors(n) {
        v *= 1.0 - (-s * (p as f64).ln()).exp();
    }
    Ok(v)
}

/// Λ(s, χ) = (q/π)^{(s+a)/2} Γ((s+a)/2) L(s, χ), a the parity bit.
pub fn completed_lambda(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(LabError::InvalidArgument(format!(
            "completed_lambda needs a primitive character, got {}",
            chi.label()
        )));
    }
    let a = if chi.is_even() { 0.0 } else { 1.0 };
    let w = (s + a) / 2.0;
    let q = chi.modulus() as f64;
    let log_factor = w * (q / PI).ln() + log_gamma(w)?;
    Ok(log_factor.exp() * dirichlet_l(s, chi)?)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogDerivative {
    pub value: Complex64,
    /// difference between the radius-r and radius-r/2 evaluations
    pub error_estimate: f64,
    pub radius: f64,
}

pub const DEFAULT_RADIUS: f64 = 0.1;

/// L^{(k)}/L(s, χ) for k ∈ {1, 2}, derivatives by Cauchy circles.
pub fn log_derivative(s: Complex64, chi: &DirichletCharacter, k: usize) -> Result<LogDerivative> {
    if !(1..=2).contains(&k) {
        return Err(LabError::Unsupported(format!("log_derivative order {k}")));
    }
    let mut r = DEFAULT_RADIUS;
    if chi.is_principal() {
        let d = (s - 1.0).norm();
        if d == 0.0 {
            return Err(pole("log_derivative", "s = 1"));
        }
        r = r.min(d / 3.0);
    }
    let f = |z: Complex64| dirichlet_l(z, chi);
    let at = |r: f64| -> Result<(Complex64, f64)> {
        let d = cauchy_derivatives(f, s, r, k)?;
        Ok((d[k], d[0].norm()))
    };
    let l = dirichlet_l(s, chi)?;
    let (dk, _) = at(r)?;
    let (dk_half, _) = at(r / 2.0)?;
    let scale = dk.norm().max(1.0);
    if l.norm() < 1e-10 * scale {
        return Err(LabError::ZeroOfL {
            at: format!("{s}"),
            modulus: l.norm(),
        });
    }
    Ok(LogDerivative {
        value: dk / l,
        error_estimate: ((dk - dk_half) / l).norm(),
        radius: r,
    })
}

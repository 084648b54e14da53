use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{prime_divisors, DirichletCharacter};
use crate::error::{pole, LabError, Result};
use crate::lfun::{dirichlet_l, zeta};

/// Dual-path value of Σ λ²_{1,ψ}(n) n^{−1−s}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RankinSelberg {
    /// Σ_{n ≤ X}
    pub brute: Complex64,
    /// brute minus the residue of D(1+s+w) X^w / w at the pole w = −s
    pub corrected: Complex64,
    pub closed: Complex64,
    /// bound on |Σ_{n > X}|, from Σ_{n ≤ t} d(n)² ≤ t (1 + log t)³
    pub tail_bound: f64,
    pub x: u64,
}

/// λ_{1,ψ}(n) = Σ_{d | n} ψ(d) for n ≤ x (index 0 unused).
pub fn divisor_character_sums(psi: &DirichletCharacter, x: usize) -> Vec<f64> {
    let mut lam = vec![0.0; x + 1];
    for d in 1..=x {
        let v = psi.value(d as i64).re;
        if v != 0.0 {
            for m in (d..=x).step_by(d) {
                lam[m] += v;
            }
        }
    }
    lam
}

fn check_real(psi: &DirichletCharacter) -> Result<()> {
    if !psi.is_real() {
        return Err(LabError::InvalidArgument(
            "the Rankin–Selberg closed form needs a real character".into(),
        ));
    }
    Ok(())
}

/// ζ²(1+s) L²(1+s, ψ) / ζ(2+2s) · Π_{p | N} (1 + p^{−1−s})^{−1}.
pub fn rankin_selberg_closed(s: Complex64, psi: &DirichletCharacter) -> Result<Complex64> {
    check_real(psi)?;
    if s.norm() == 0.0 {
        return Err(pole("rankin_selberg_closed", "s = 0"));
    }
    let z = zeta(1.0 + s)?;
    let l = dirichlet_l(1.0 + s, psi)?;
    let mut v = z * z * l * l / zeta(2.0 + 2.0 * s)?;
    for p in prime_divisors(psi.modulus()) {
        v /= 1.0 + (-(1.0 + s) * (p as f64).ln()).exp();
    }
    Ok(v)
}

/// (1+σ) ∫_X^∞ (1 + log t)³ t^{−1−σ} dt in closed form.
fn tail_bound(sigma: f64, x: f64) -> f64 {
    let l = 1.0 + x.ln();
    let mut acc = 0.0;
    let mut fall = 1.0;
    for k in 0..=3 {
        acc += fall * l.powi(3 - k) / sigma.powi(k + 1);
        fall *= (3 - k) as f64;
    }
    (1.0 + sigma) * (-sigma * x.ln()).exp() * acc
}

pub fn rankin_selberg_series(s: Complex64, psi: &DirichletCharacter, x: u64) -> Result<RankinSelberg> {
    check_real(psi)?;
    if s.re < 0.2 {
        return Err(LabError::InvalidArgument(format!(
            "brute sum needs Re s ≥ 0.2, got {s}"
        )));
    }
    if x < 10 {
        return Err(LabError::InvalidArgument(format!("X = {x} is too small")));
    }
    let lam = divisor_character_sums(psi, x as usize);
    let e = -(1.0 + s);
    let brute: Complex64 = (1..=x as usize)
        .filter(|&n| lam[n] != 0.0)
        .map(|n| lam[n] * lam[n] * (e * (n as f64).ln()).exp())
        .sum();
    let closed = rankin_selberg_closed(s, psi)?;

    // partial sum = D(1+s) + Res_{w=−s} D(1+s+w) X^w / w + O(X^{−½−σ+ε})
    // ζ(2+2s+2w) reaches its pole at radius ½
    let r = 0.4f64.min(s.norm() / 2.0);
    let m = 128;
    let log_x = (x as f64).ln();
    let mut res = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
        let w = -s + z;
        res += rankin_selberg_closed(s + w, psi)? * (w * log_x).exp() / w * z;
    }
    res /= m as f64;
    Ok(RankinSelberg {
        brute,
        corrected: brute - res,
        closed,
        tail_bound: tail_bound(s.re, x as f64),
        x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::quadratic_character;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_term_dominates() {
        let psi = quadratic_character(5).unwrap();
        let rs = rankin_selberg_series(c(40.0, 0.0), &psi, 100).unwrap();
        assert!((rs.brute - 1.0).norm() < 1e-11);
        assert!((rs.closed - 1.0).norm() < 1e-11);
    }

    #[test]
    fn trivial_character_is_zeta_quotient() {
        let one = DirichletCharacter::trivial();
        let s = c(1.0, 0.0);
        let rs = rankin_selberg_series(s, &one, 100_000).unwrap();
        let want = zeta(c(2.0, 0.0)).unwrap().powi(4) / zeta(c(4.0, 0.0)).unwrap();
        assert!((rs.closed - want).norm() < 1e-12 * want.norm());
        assert!((rs.corrected - want).norm() < 1e-4 * want.norm(), "{rs:?}");
        assert!((rs.brute - want).norm() <= rs.tail_bound);
    }

    #[test]
    fn quadratic_five_within_tail() {
        let psi = quadratic_character(5).unwrap();
        for s in [c(1.0, 0.0), c(0.5, 2.0)] {
            let rs = rankin_selberg_series(s, &psi, 100_000).unwrap();
            assert!((rs.brute - rs.closed).norm() <= rs.tail_bound, "{rs:?}");
            assert!((rs.corrected - rs.closed).norm() < 1e-4 * rs.closed.norm(), "{rs:?}");
        }
    }

    #[test]
    fn lambda_is_multiplicative() {
        let psi = quadratic_character(13).unwrap();
        let lam = divisor_character_sums(&psi, 400);
        for (m, n) in [(3usize, 4usize), (5, 7), (9, 16), (2, 13)] {
            assert_eq!(lam[m * n], lam[m] * lam[n]);
        }
    }
}

use num_complex::Complex64;

use crate::error::{pole, LabError, Result};
use crate::quad::{exp_sinh, tanh_sinh};
use crate::special::{bessel_k, log_gamma};

const TOL: f64 = 1e-14;

fn k0_squared(y: f64) -> f64 {
    // K₀ underflows long before the exp-sinh nodes run out
    if y > 700.0 {
        return 0.0;
    }
    let k = bessel_k(0.0, y).expect("K₀ at positive argument");
    k * k
}

/// g(x) = ∫_x^∞ K₀(y)² dy.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(LabError::InvalidArgument(format!("g needs finite x ≥ 0, got {x}")));
    }
    let mut total = 0.0;
    let start = if x < 1.0 {
        total += tanh_sinh(k0_squared, x, 1.0, TOL).value;
        1.0
    } else {
        x
    };
    // K₀² ~ (π/2y) e^{−2y}
    total += exp_sinh(k0_squared, start, 0.5, TOL).value;
    Ok(total)
}

/// G(s) = 2^{s−2} Γ⁴((1+s)/2) / (s Γ(1+s)), the Mellin transform of g.
pub fn mellin_g(s: Complex64) -> Result<Complex64> {
    if s.norm() == 0.0 {
        return Err(pole("mellin_G", "s = 0"));
    }
    if s.re <= 0.0 {
        return Err(LabError::InvalidArgument(format!("mellin_G needs Re s > 0, got {s}")));
    }
    let lg = 4.0 * log_gamma((1.0 + s) / 2.0)? - log_gamma(1.0 + s)?;
    Ok((lg + (s - 2.0) * std::f64::consts::LN_2).exp() / s)
}

/// ∫₀^∞ g(x) x^{s−1} dx as the trapezoid rule in u = log x, which converges
/// geometrically because g(eᵘ) is analytic in |Im u| < π/2. The values g(eᵘ)
/// are accumulated right to left, one Gauss panel per step.
pub fn mellin_g_numeric(s: Complex64) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(LabError::InvalidArgument(format!(
            "Mellin integral diverges at Re s = {}",
            s.re
        )));
    }
    let h = 0.125;
    // left tail ≈ g(0) e^{u σ}/σ, right tail ≈ e^{−2eᵘ}
    let u_lo = (1e-14f64.ln() - 1.0) / s.re;
    let u_hi = 4.0;
    let steps = ((u_hi - u_lo) / h).ceil() as usize;
    let panel = crate::quad::gauss_legendre(16);
    let mut g = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (0..=steps).rev() {
        let u = u_hi - h * (steps - k) as f64;
        if k < steps {
            let (a, b) = (u.exp(), (u + h).exp());
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            g += panel
                .0
                .iter()
                .zip(&panel.1)
                .map(|(t, w)| w * half * k0_squared(mid + half * t))
                .sum::<f64>();
        }
        acc += g * (s * u).exp();
    }
    Ok(acc * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_at_zero_and_monotone() {
        assert!((g_function(0.0).unwrap() - PI * PI / 4.0).abs() < 1e-10);
        assert!(g_function(1.0).unwrap() > g_function(2.0).unwrap());
        assert!(g_function(-1.0).is_err());
    }

    #[test]
    fn g_asymptotic() {
        let x = 5.0;
        let asym = PI / (4.0 * x) * (-2.0 * x).exp();
        let r = g_function(x).unwrap() / asym;
        // leading term within its O(1/x) envelope; first correction −3/(4x)
        assert!((r - 1.0).abs() < 1.0 / x, "{r}");
        assert!((r - (1.0 - 0.75 / x)).abs() < 0.03, "{r}");
    }

    #[test]
    fn mellin_closed_form() {
        assert!((mellin_g(c(1.0, 0.0)).unwrap() - 0.5).norm() < 1e-14);
        let s = c(1e-7, 0.0);
        assert!(((s * mellin_g(s).unwrap()).re - PI * PI / 4.0).abs() < 1e-6);
        assert!(mellin_g(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn mellin_pair() {
        for s in [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)] {
            let num = mellin_g_numeric(s).unwrap();
            let closed = mellin_g(s).unwrap();
            assert!((num - closed).norm() < 1e-8, "s = {s}: {num} vs {closed}");
        }
    }
}

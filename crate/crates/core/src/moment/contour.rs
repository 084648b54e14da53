use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::context::PipelineContext;
use crate::arith::prime_divisors;
use crate::error::{pole, LabError, Result};
use crate::lfun::{cauchy_derivatives, dirichlet_l, laurent_at, zeta};
use crate::quad::adaptive_with_limit;
use crate::special::{digamma, log_gamma, stieltjes};

/// K(s) = Γ⁴((1+s)/2)/Γ(1+s) (πY)^{−s} L²(1+s, ψ)/ζ(2+2s) Π_{p|N}(1 + p^{−1−s})^{−1}.
pub fn k_function(s: Complex64, ctx: &PipelineContext) -> Result<Complex64> {
    let lg = 4.0 * log_gamma((1.0 + s) / 2.0)? - log_gamma(1.0 + s)? - s * (PI * ctx.y).ln();
    let l = dirichlet_l(1.0 + s, &ctx.psi)?;
    let mut v = lg.exp() * l * l / zeta(2.0 + 2.0 * s)?;
    for p in prime_divisors(ctx.n) {
        v /= 1.0 + (-(1.0 + s) * (p as f64).ln()).exp();
    }
    Ok(v)
}

/// H(s) = ζ²(1+s) K(s)/s, triple pole at s = 0.
pub fn integrand_h(s: Complex64, ctx: &PipelineContext) -> Result<Complex64> {
    if s.norm() == 0.0 {
        return Err(pole("integrand_H", "s = 0 (triple pole)"));
    }
    let z = zeta(1.0 + s)?;
    Ok(z * z * k_function(s, ctx)? / s)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueAtZero {
    pub value: Complex64,
    /// K(0), K′(0), K″(0)
    pub k: [Complex64; 3],
    /// 6 L²(1, ψ) N/ν(N)
    pub k0_closed: f64,
    /// K′(0)/K(0) from its itemized main terms −log Y + 2L′/L(1,ψ) + Σ p⁻¹log p/(1+p⁻¹)
    pub k_log_derivative_itemized: f64,
    /// the O(1) remainder: 2ψ(½) + γ − log π − 2ζ′(2)/ζ(2)
    pub k_log_derivative_constant: f64,
}

const K_RADIUS: f64 = 0.25;

/// Res_{s=0} H from ζ(1+s) = 1/s + γ₀ − γ₁s + …: with ζ² = s⁻² + 2γ₀s⁻¹ + (γ₀² − 2γ₁) + …,
/// the residue is (γ₀² − 2γ₁)K(0) + 2γ₀K′(0) + ½K″(0). K derivatives by Cauchy circles.
pub fn residue_at_zero(ctx: &PipelineContext) -> Result<ResidueAtZero> {
    let k = cauchy_derivatives(|s| k_function(s, ctx), Complex64::new(0.0, 0.0), K_RADIUS, 2)?;
    let (g0, g1) = (stieltjes(0)?, stieltjes(1)?);
    let value = (g0 * g0 - 2.0 * g1) * k[0] + 2.0 * g0 * k[1] + 0.5 * k[2];

    let one = Complex64::new(1.0, 0.0);
    let l = ctx.l_one;
    let dl = cauchy_derivatives(|s| dirichlet_l(s, &ctx.psi), one, 0.25, 1)?[1].re;
    let local: f64 = prime_divisors(ctx.n)
        .into_iter()
        .map(|p| {
            let pf = p as f64;
            pf.recip() * pf.ln() / (1.0 + pf.recip())
        })
        .sum();
    let itemized = -ctx.y.ln() + 2.0 * dl / l + local;
    let two = Complex64::new(2.0, 0.0);
    let zeta_log_derivative = cauchy_derivatives(zeta, two, 0.25, 1)?;
    let constant = 2.0 * digamma(Complex64::new(0.5, 0.0))?.re + crate::special::EULER_GAMMA
        - PI.ln()
        - 2.0 * (zeta_log_derivative[1] / zeta_log_derivative[0]).re;
    Ok(ResidueAtZero {
        value,
        k: [k[0], k[1], k[2]],
        k0_closed: 6.0 * l * l * ctx.n as f64 / ctx.nu as f64,
        k_log_derivative_itemized: itemized,
        k_log_derivative_constant: constant,
    })
}

/// Residue of H at 0 read off the Laurent expansion of H itself.
pub fn residue_by_laurent(ctx: &PipelineContext) -> Result<Complex64> {
    Ok(laurent_at(|s| integrand_h(s, ctx), Complex64::new(0.0, 0.0), 3, 8, K_RADIUS)?.residue())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShiftedIntegral {
    /// (1/2πi) ∫_{(−c)} H(s) ds
    pub value: Complex64,
    pub quadrature_error: f64,
    /// bound on the part beyond |Im s| = t_max
    pub tail_bound: f64,
    pub t_max: f64,
    /// log N (log log N)³/N · Y^c
    pub envelope: f64,
}

/// The line integral on Re s = −c. For real ψ, H(s̄) = conj H(s), so the
/// integral is (1/π) ∫₀^∞ Re H(−c + it) dt.
pub fn shifted_contour_integral(ctx: &PipelineContext) -> Result<ShiftedIntegral> {
    shifted_contour_integral_to(ctx, None)
}

pub fn shifted_contour_integral_to(ctx: &PipelineContext, t_max: Option<f64>) -> Result<ShiftedIntegral> {
    let h = |t: f64| integrand_h(Complex64::new(-ctx.c, t), ctx);
    let h0 = h(0.0)?.norm();
    // |H| decays like e^{−πt/2} times a power; stop where it is negligible
    let t_max = match t_max {
        Some(t) => t,
        None => {
            let mut t = 20.0;
            while h(t)?.norm() > 1e-17 * h0 {
                t += 10.0;
                if t > 200.0 {
                    return Err(LabError::BudgetExceeded {
                        what: "shifted contour truncation",
                        estimate: h(t)?.norm(),
                        target: 1e-17 * h0,
                    });
                }
            }
            t
        }
    };
    let failure = std::cell::Cell::new(None);
    let f = |t: f64| -> f64 {
        match h(t) {
            Ok(v) => v.re,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let r = adaptive_with_limit(f, 0.0, t_max, 1e-16 * h0, 1e-14, 4000);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    // ∫_{t_max}^∞ of a function decaying at rate π/2 − margin
    let tail_bound = h(t_max)?.norm() / (PI / 2.0 - 0.2) / PI;
    let nf = ctx.n as f64;
    let lln = nf.ln().ln().max(1.0);
    Ok(ShiftedIntegral {
        value: Complex64::new(r.value / PI, 0.0),
        quadrature_error: r.error / PI,
        tail_bound,
        t_max,
        envelope: nf.ln() * lln.powi(3) / nf * ctx.y.powf(ctx.c),
    })
}

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::par;
use crate::quad::cauchy_coefficient;

/// Truncated Laurent expansion Σ_{k ≥ −p} c_k (s − center)^k.
#[derive(Clone, Debug, Serialize)]
pub struct LaurentExpansion {
    pub center: Complex64,
    pub order_of_pole: u32,
    /// c_{−p}, c_{−p+1}, …
    pub coefficients: Vec<Complex64>,
    pub radius_hint: f64,
    /// Bound on |f(s) − truncated(s)| for |s − center| = radius_hint/2.
    pub remainder_bound: f64,
}

impl LaurentExpansion {
    pub fn coefficient(&self, power: i32) -> Complex64 {
        let idx = power + self.order_of_pole as i32;
        if idx < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients.get(idx as usize).copied().unwrap_or_default()
    }

    pub fn residue(&self) -> Complex64 {
        self.coefficient(-1)
    }

    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        let z = s - self.center;
        let p = self.order_of_pole as i32;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(-p)
    }
}

/// Laurent coefficients of `f` about `s0` from the trapezoid rule on the
/// circle of radius `radius`. `pole_order` must bound the true order.
pub fn laurent_at<F>(f: F, s0: Complex64, pole_order: u32, n_coeffs: usize, radius: f64) -> Result<LaurentExpansion>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
{
    let m = (4 * n_coeffs).max(64).next_power_of_two();
    let p = pole_order as i32;
    let samples = par::try_map_range(m, |k| -> Result<(Complex64, Complex64)> {
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
        let z = phase * radius;
        let v = f(s0 + z)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(LabError::ContourSingular(format!("non-finite sample at {}", s0 + z)));
        }
        Ok((phase, v * z.powi(p)))
    })?;
    let g_max = samples.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let coefficients = (0..n_coeffs as i32)
        .map(|k| cauchy_coefficient(&samples, radius, k))
        .collect();
    let half = radius / 2.0;
    let remainder_bound = g_max * 2f64.powi(1 - n_coeffs as i32) / half.powi(p);
    Ok(LaurentExpansion {
        center: s0,
        order_of_pole: pole_order,
        coefficients,
        radius_hint: radius,
        remainder_bound,
    })
}

/// f^{(k)}(s0) for k = 0..=k_max via Cauchy's formula.
pub fn cauchy_derivatives<F>(f: F, s0: Complex64, radius: f64, k_max: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
{
    let e = laurent_at(f, s0, 0, k_max + 1, radius)?;
    let mut fact = 1.0;
    Ok(e.coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= k as f64;
            }
            c * fact
        })
        .collect())
}

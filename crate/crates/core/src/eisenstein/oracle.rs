use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::model::EisensteinModel;
use crate::arith::gauss_sum;
use crate::error::{LabError, Result};
use crate::par;
use crate::special::log_gamma;

/// Truncated lattice sum with its reported tail.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatticeSum {
    pub value: Complex64,
    pub tail_bound: f64,
    pub rows: usize,
}

/// E*_{1,ψ}(z, s) from the defining double sum
/// F = Σ_{c ≡ 0 (N), d} ψ(d) y^s / |cz+d|^{2s}, divided by 2π^s τ(ψ) N^{−2s} / Γ(s).
///
/// For nontrivial ψ each row c = Nc′ is summed over whole periods of d
/// centred on −cx with half-width at least X; rows decay like e^{−2πc′y}.
/// For trivial ψ (level 1) the sum runs over the disc |cz+d| ≤ X and the
/// continuum tail π y^{s−1} X^{2−2s}/(s−1) is added and reported.
pub fn direct_series_oracle(z: Complex64, model: &EisensteinModel, x_trunc: f64) -> Result<LatticeSum> {
    if model.q1() != 1 {
        return Err(LabError::Unsupported("lattice oracle needs χ₁ trivial".into()));
    }
    let s = model.s;
    if s.re < 1.5 || x_trunc < 10.0 || z.im <= 0.0 {
        return Err(LabError::InvalidArgument(format!(
            "oracle needs Re s ≥ 1.5, X ≥ 10, Im z > 0 (s = {s}, X = {x_trunc})"
        )));
    }
    let psi = &model.chi2;
    let n = psi.modulus() as i64;
    let (x, y) = (z.re, z.im);
    let term = |c: i64, d: i64| -> Complex64 {
        let re = c as f64 * x + d as f64;
        let im = c as f64 * y;
        (-s * (re * re + im * im).ln()).exp()
    };
    let sigma = s.re;
    // ∫_{|w|>X} |w|^{−2σ} dA / y, times y^σ
    let tail_bound = PI * y.powf(sigma - 1.0) * x_trunc.powf(2.0 - 2.0 * sigma) / (sigma - 1.0);
    let ys = (s * y.ln()).exp();

    let (sum, rows, tail) = if n == 1 {
        let c_max = (x_trunc / y).floor() as i64;
        let rows = par::map_range(c_max as usize + 1, |ci| {
            let c = ci as i64;
            let im2 = (c as f64 * y).powi(2);
            let r2 = x_trunc * x_trunc - im2;
            if r2 < 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let half = r2.sqrt();
            let centre = -(c as f64) * x;
            let lo = (centre - half).ceil() as i64;
            let hi = (centre + half).floor() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for d in lo..=hi {
                if c == 0 && d == 0 {
                    continue;
                }
                acc += term(c, d);
            }
            // rows ±c contribute equally since |−cz−d| = |cz+d|
            if c == 0 {
                acc
            } else {
                2.0 * acc
            }
        });
        let correction = PI * ((s - 1.0) * y.ln()).exp() * ((2.0 - 2.0 * s) * x_trunc.ln()).exp() / (s - 1.0);
        (par::pairwise_sum(&rows) + correction / ys, rows.len(), tail_bound)
    } else {
        let periods = (x_trunc / n as f64).ceil() as i64;
        let c_max = ((7.0 / y).ceil() as i64).max(1);
        let rows = par::map_range(c_max as usize + 1, |ci| {
            let c = ci as i64 * n;
            let centre = (-(c as f64) * x).round() as i64;
            let lo = centre - periods * n;
            let mut acc = Complex64::new(0.0, 0.0);
            for d in lo..lo + 2 * periods * n {
                if c == 0 && d == 0 {
                    continue;
                }
                let v = psi.value(d);
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                acc += v * term(c, d);
            }
            // ψ even: the row −c equals the row c
            if c == 0 {
                acc
            } else {
                2.0 * acc
            }
        });
        // ψ has mean zero over a period, so each row's cut-off is bounded by
        // N · sup|∂_d|cz+d|^{−2s}| beyond the window, and the last row by its decay
        let edge = periods as f64 * n as f64;
        let per_row = n as f64 * 2.0 * s.norm() * edge.powf(-2.0 * sigma - 1.0);
        let t = y.powf(sigma) * (per_row * 2.0 * rows.len() as f64 + (-2.0 * PI * c_max as f64 * y).exp());
        (par::pairwise_sum(&rows), rows.len(), t)
    };

    let nf = n as f64;
    let completion = 2.0 * (s * PI.ln()).exp() * gauss_sum(psi) * (-2.0 * s * nf.ln()).exp() / log_gamma(s)?.exp();
    Ok(LatticeSum {
        value: sum * ys / completion,
        tail_bound: tail / completion.norm(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{quadratic_character, DirichletCharacter};
    use crate::eisenstein::eval_e_star;
    use crate::special::PrecisionBudget;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn level_one_value_at_i() {
        let one = DirichletCharacter::trivial();
        let m = EisensteinModel::new(one.clone(), one, c(2.0, 0.0)).unwrap();
        let a = direct_series_oracle(c(0.0, 1.0), &m, 200.0).unwrap();
        let b = direct_series_oracle(c(0.0, 1.0), &m, 400.0).unwrap();
        // F(i, 2) = Σ' (c² + d²)^{−2} = 4 ζ(2) β(2)
        let catalan = 0.915_965_594_177_219;
        let f = 4.0 * PI * PI / 6.0 * catalan;
        let want = f / (2.0 * PI * PI);
        assert!((a.value - want).norm() < 1e-7, "{} vs {want}", a.value);
        assert!((a.value - b.value).norm() < 1e-8);
        assert!(b.tail_bound < a.tail_bound);
        let e = eval_e_star(c(0.0, 1.0), &m, &PrecisionBudget::default()).unwrap();
        assert!((e - b.value).norm() < 1e-8, "{e} vs {}", b.value);
    }

    #[test]
    fn agrees_with_fourier_side() {
        let psi = quadratic_character(5).unwrap();
        let m = EisensteinModel::trivial_twist(psi, c(2.0, 0.0)).unwrap();
        let z = c(0.3, 1.1);
        let o = direct_series_oracle(z, &m, 2000.0).unwrap();
        let e = eval_e_star(z, &m, &PrecisionBudget::default()).unwrap();
        assert!((e - o.value).norm() <= 1e-8 * e.norm().max(1.0), "{e} vs {}", o.value);
    }

    #[test]
    fn rejects_outside_domain() {
        let psi = quadratic_character(5).unwrap();
        let m = EisensteinModel::trivial_twist(psi.clone(), c(1.2, 0.0)).unwrap();
        assert!(direct_series_oracle(c(0.0, 1.0), &m, 100.0).is_err());
        let m = EisensteinModel::new(psi, DirichletCharacter::trivial(), c(2.0, 0.0)).unwrap();
        assert!(matches!(
            direct_series_oracle(c(0.0, 1.0), &m, 100.0),
            Err(LabError::Unsupported(_))
        ));
    }
}

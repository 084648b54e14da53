use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::closed::RecipeSetup;
use super::state::{eps_power, RecipeTerm, ShiftState};
use crate::arith::{level_data, DirichletCharacter};
use crate::error::{LabError, Result};
use crate::lfun::{dirichlet_l, laurent_at};
use crate::special::PrecisionBudget;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitSettings {
    /// radius of the η contour
    pub eta: f64,
    /// η′ of the Richardson pair (η′, η′/2)
    pub eta_prime: f64,
    pub n_coeffs: usize,
}

impl Default for LimitSettings {
    fn default() -> Self {
        LimitSettings {
            eta: 1e-2,
            eta_prime: 1e-3,
            n_coeffs: 3,
        }
    }
}

/// Result of the three-step limit α → α₀ for every (ε₃, ε₄).
#[derive(Clone, Debug, Serialize)]
pub struct LimitPath {
    pub n: u64,
    pub t: f64,
    /// ordered (−,−), (−,+), (+,−), (+,+); `value` is the η⁰ coefficient of R
    pub terms: Vec<RecipeTerm>,
    /// |Σ_{ε₁,ε₂} Res_{η′=0} S| at η = `eta`, per term
    pub pole_residuals: Vec<f64>,
    /// max_{ε₁,ε₂} |Res_{η′=0} S|, the scale the residual is measured against
    pub pole_scales: Vec<f64>,
    /// η⁰ coefficients of the closed Laurent forms that end each case
    pub displayed: Vec<Complex64>,
    /// Σ of the η⁻¹ coefficients; cancels in the limit η → 0
    pub eta_pole_sum: Complex64,
    pub total: Complex64,
    pub total_displayed: Complex64,
}

struct Tables {
    ones: Vec<Complex64>,
    third: Vec<Complex64>,
    /// α₂ = η′/2^k, k = 0, 1, 2
    second: Vec<Vec<Complex64>>,
}

const PAIRS: [(i8, i8); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

fn alpha(t: f64, eta_p: f64, eta: Complex64) -> [Complex64; 4] {
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(eta_p, 0.0),
        Complex64::new(0.0, 2.0 * t),
        Complex64::new(0.0, -2.0 * t) + eta,
    ]
}

/// Σ_{ε₁,ε₂} S(ε, (0, η′/2^k, 2iT, −2iT+η)).
fn inner_sum(
    setup: &RecipeSetup,
    tb: &Tables,
    fourth: &[Complex64],
    e3: i8,
    e4: i8,
    k: usize,
    eta: Complex64,
    eta_p: f64,
) -> Result<(Complex64, [Complex64; 4])> {
    let ep = eta_p / (1 << k) as f64;
    let a = alpha(setup.t, ep, eta);
    let mut parts = [Complex64::new(0.0, 0.0); 4];
    let mut i = 0;
    for e1 in [-1i8, 1] {
        for e2 in [-1i8, 1] {
            let eps = [e1, e2, e3, e4];
            let f = setup.f_eps_tables(eps, [&tb.ones, &tb.second[k], &tb.third, fourth]);
            parts[i] = setup.s_with_f(&setup.state(eps, a), f)?;
            i += 1;
        }
    }
    Ok((parts.iter().sum(), parts))
}

/// R_{ε₃,ε₄}(η) = lim_{η′→0} Σ_{ε₁,ε₂} S, by Richardson on (η′, η′/2).
fn r_of_eta(setup: &RecipeSetup, tb: &Tables, e3: i8, e4: i8, eta: Complex64, eta_p: f64) -> Result<Complex64> {
    let fourth = setup.ratio_table(Complex64::new(0.0, -2.0 * setup.t) + eta)?;
    let (s0, _) = inner_sum(setup, tb, &fourth, e3, e4, 0, eta, eta_p)?;
    let (s1, _) = inner_sum(setup, tb, &fourth, e3, e4, 1, eta, eta_p)?;
    Ok(2.0 * s1 - s0)
}

/// Σ_{ε₁,ε₂} of the η′-residues at real η, each residue from a three-point
/// Richardson of η′·S. Returns (|Σ|, max |residue|).
fn pole_residual(setup: &RecipeSetup, tb: &Tables, e3: i8, e4: i8, eta: f64, eta_p: f64) -> Result<(f64, f64)> {
    let eta = Complex64::new(eta, 0.0);
    let fourth = setup.ratio_table(Complex64::new(0.0, -2.0 * setup.t) + eta)?;
    let mut scaled = Vec::new();
    for k in 0..3 {
        let (_, parts) = inner_sum(setup, tb, &fourth, e3, e4, k, eta, eta_p)?;
        let ep = eta_p / (1 << k) as f64;
        scaled.push(parts.map(|p| p * ep));
    }
    let res: Vec<Complex64> = (0..4)
        .map(|i| (8.0 * scaled[2][i] - 6.0 * scaled[1][i] + scaled[0][i]) / 3.0)
        .collect();
    let sum: Complex64 = res.iter().sum();
    Ok((sum.norm(), res.iter().map(|r| r.norm()).fold(0.0, f64::max)))
}

/// η⁰ coefficient of the closed form that ends each case: for cases 3 and 4
/// (6/(νπ))·Λ·(1/(ε₄η) + (ε₄−1) log N)(−2 log N) with Λ the ratio of
/// L-squares to |L(1+2iT, χ)|⁴; for cases 1 and 2 the value R(0) with
/// −2H(0) log N kept and the O(log log N) terms dropped.
fn displayed(setup: &RecipeSetup, tb: &Tables, e3: i8, e4: i8) -> Result<(Complex64, Complex64)> {
    let n = setup.n as f64;
    let nu = level_data(setup.n).nu as f64;
    let log_n = n.ln();
    let t = setup.t;
    let chi3 = eps_power(&setup.chi, e3);
    let chi4 = eps_power(&setup.chi.conj(), e4);
    let l3 = dirichlet_l(Complex64::new(1.0, 2.0 * t * e3 as f64), &chi3)?;
    let l4 = dirichlet_l(Complex64::new(1.0, -2.0 * t * e4 as f64), &chi4)?;
    let l_abs4 = setup.l_one.norm_sqr().powi(2);
    let lam = l3 * l3 * l4 * l4 / l_abs4;
    let state = setup.state([1, 1, e3, e4], ShiftState::alpha0(t));
    match state.case_label() {
        3 | 4 => {
            let pre = 6.0 / (nu * PI) * lam;
            let e4f = e4 as f64;
            Ok((pre * (-2.0 * log_n) / e4f, pre * (e4f - 1.0) * log_n * (-2.0 * log_n)))
        }
        _ => {
            let psi34 = chi3.mul(&chi4);
            let d = (e3 - e4) as f64 * 2.0 * t;
            let phase = Complex64::new(0.0, d * (n.ln() - PI.ln())).exp();
            let root_pow = if e3 > e4 {
                setup.root * setup.root
            } else {
                1.0 / (setup.root * setup.root)
            };
            let num = dirichlet_l(Complex64::new(1.0, d), &psi34)?;
            let den = dirichlet_l(Complex64::new(2.0, d), &psi34)?;
            let fourth = setup.ratio_table(Complex64::new(0.0, -2.0 * t))?;
            let h = setup.f_eps_tables([1, 1, e3, e4], [&tb.ones, &tb.ones, &tb.third, &fourth]);
            let r0 = phase / (8.0 * n * l_abs4) * root_pow * num * l3 * l3 * l4 * l4 / den * (-2.0 * h * log_n);
            Ok((Complex64::new(0.0, 0.0), r0))
        }
    }
}

/// The three-step evaluation: α = (0, η′, 2iT, −2iT+η); the ε₁, ε₂ sum
/// with η′ → 0 by Richardson; Laurent coefficients in η by a contour.
pub fn limit_path_evaluate(
    chi: &DirichletCharacter,
    t: f64,
    settings: LimitSettings,
    budget: &PrecisionBudget,
) -> Result<LimitPath> {
    let setup = RecipeSetup::new(chi, t, budget)?;
    let second = (0..3)
        .map(|k| setup.ratio_table(Complex64::new(settings.eta_prime / (1 << k) as f64, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let tb = Tables {
        ones: vec![Complex64::new(1.0, 0.0); setup.rule.len()],
        third: setup.ratio_table(Complex64::new(0.0, 2.0 * t))?,
        second,
    };
    let mut terms = Vec::new();
    let (mut residuals, mut scales, mut shown) = (Vec::new(), Vec::new(), Vec::new());
    let mut eta_pole_sum = Complex64::new(0.0, 0.0);
    for (e3, e4) in PAIRS {
        let state = setup.state([1, 1, e3, e4], ShiftState::alpha0(t));
        let (res, scale) = pole_residual(&setup, &tb, e3, e4, settings.eta, settings.eta_prime)?;
        if res > 1e-6 * scale.max(1.0) {
            return Err(LabError::CancellationFailure {
                what: format!("η′ pole for (ε₃, ε₄) = ({e3}, {e4})"),
                residual: res,
            });
        }
        let order = if state.case_label() >= 3 { 1 } else { 0 };
        let laurent = laurent_at(
            |eta| r_of_eta(&setup, &tb, e3, e4, eta, settings.eta_prime),
            Complex64::new(0.0, 0.0),
            order,
            settings.n_coeffs,
            settings.eta,
        )?;
        eta_pole_sum += laurent.coefficient(-1);
        let (_, d0) = displayed(&setup, &tb, e3, e4)?;
        terms.push(RecipeTerm {
            state,
            value: laurent.coefficient(0),
            case_label: state.case_label(),
            leading_coefficients: Some(laurent),
        });
        residuals.push(res);
        scales.push(scale);
        shown.push(d0);
    }
    Ok(LimitPath {
        n: setup.n,
        t,
        total: terms.iter().map(|r| r.value).sum(),
        total_displayed: shown.iter().sum(),
        terms,
        pole_residuals: residuals,
        pole_scales: scales,
        displayed: shown,
        eta_pole_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::quadratic_character;

    #[test]
    fn quadratic_five_at_zero() {
        let chi = quadratic_character(5).unwrap();
        let lp = limit_path_evaluate(&chi, 0.0, LimitSettings::default(), &PrecisionBudget::default()).unwrap();
        for (i, r) in lp.terms.iter().enumerate() {
            eprintln!(
                "{:?} case {} c-1 {} c0 {} disp {} res {:e} scale {:e}",
                &r.state.epsilon[2..],
                r.case_label,
                r.leading_coefficients.as_ref().unwrap().coefficient(-1),
                r.value,
                lp.displayed[i],
                lp.pole_residuals[i],
                lp.pole_scales[i]
            );
        }
        eprintln!(
            "total {} displayed {} pole {}",
            lp.total, lp.total_displayed, lp.eta_pole_sum
        );
        assert!(lp.pole_residuals.iter().all(|&r| r < 1e-6));
    }
}

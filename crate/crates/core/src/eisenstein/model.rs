use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{divisors, gauss_sum, DirichletCharacter};
use crate::error::{LabError, Result};
use crate::lfun::completed_lambda;
use crate::special::{bessel_k_complex, PrecisionBudget};

/// Lowest height evaluated by the Fourier expansion unless overridden.
pub const DEFAULT_Y_FLOOR: f64 = 0.05;
/// Largest Fourier index the expansion is allowed to reach.
pub const MAX_FOURIER_TERMS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletionMode {
    /// values of E*_{χ₁,χ₂}
    CompletedStar,
    /// values of E = τ(χ₂) q₂^s Λ⁻¹(2s, ψ) E*
    NewformNormalized,
}

/// E*_{χ₁,χ₂}(z, s) with its Fourier data.
#[derive(Debug)]
pub struct EisensteinModel {
    pub chi1: DirichletCharacter,
    pub chi2: DirichletCharacter,
    pub s: Complex64,
    pub completion_mode: CompletionMode,
    /// multiplies E* in evaluations (1 for the completed series)
    pub scalar: Complex64,
    pub y_floor: f64,
    /// λ(n, s) for n = 1, 2, …
    coeff_cache: RwLock<Arc<Vec<Complex64>>>,
}

impl Clone for EisensteinModel {
    fn clone(&self) -> Self {
        EisensteinModel {
            chi1: self.chi1.clone(),
            chi2: self.chi2.clone(),
            s: self.s,
            completion_mode: self.completion_mode,
            scalar: self.scalar,
            y_floor: self.y_floor,
            coeff_cache: RwLock::new(self.coeff_cache.read().expect("cache lock").clone()),
        }
    }
}

impl EisensteinModel {
    /// Requires χ₁, χ₂ primitive of coprime moduli with χ₁χ₂ even.
    pub fn new(chi1: DirichletCharacter, chi2: DirichletCharacter, s: Complex64) -> Result<Self> {
        if !chi1.is_primitive() || !chi2.is_primitive() {
            return Err(LabError::InvalidArgument(format!(
                "characters must be primitive: {} {}",
                chi1.label(),
                chi2.label()
            )));
        }
        if crate::arith::gcd(chi1.modulus(), chi2.modulus()) != 1 {
            return Err(LabError::InvalidArgument("moduli of χ₁, χ₂ must be coprime".into()));
        }
        if chi1.parity() * chi2.parity() != 1 {
            return Err(LabError::Unsupported(
                "odd χ₁χ₂ (only even nebentypus is modelled)".into(),
            ));
        }
        if chi1.modulus() == 1 && chi2.modulus() == 1 && (s - 0.5).norm() < 1e-12 {
            return Err(LabError::Pole {
                function: "EisensteinModel",
                at: "s = 1/2 with trivial characters".into(),
            });
        }
        Ok(EisensteinModel {
            chi1,
            chi2,
            s,
            completion_mode: CompletionMode::CompletedStar,
            scalar: Complex64::new(1.0, 0.0),
            y_floor: DEFAULT_Y_FLOOR,
            coeff_cache: RwLock::new(Arc::new(Vec::new())),
        })
    }

    /// E*_{1,ψ}(z, s) for a primitive even ψ mod N.
    pub fn trivial_twist(psi: DirichletCharacter, s: Complex64) -> Result<Self> {
        Self::new(DirichletCharacter::trivial(), psi, s)
    }

    pub fn with_y_floor(mut self, y_floor: f64) -> Self {
        self.y_floor = y_floor;
        self
    }

    pub fn q1(&self) -> u64 {
        self.chi1.modulus()
    }

    pub fn q2(&self) -> u64 {
        self.chi2.modulus()
    }

    pub fn level(&self) -> u64 {
        self.q1() * self.q2()
    }

    /// ψ = χ₁χ₂ as a primitive character mod q₁q₂.
    pub fn psi(&self) -> DirichletCharacter {
        self.chi1.mul(&self.chi2)
    }

    /// λ(n, s) for 1 ≤ n ≤ n_max, extending the shared cache as needed.
    pub fn coefficients(&self, n_max: usize) -> Arc<Vec<Complex64>> {
        {
            let c = self.coeff_cache.read().expect("cache lock");
            if c.len() >= n_max {
                return c.clone();
            }
        }
        let mut guard = self.coeff_cache.write().expect("cache lock");
        if guard.len() < n_max {
            let mut v: Vec<Complex64> = guard.as_ref().clone();
            let target = n_max.max(2 * v.len());
            for n in v.len() + 1..=target {
                v.push(divisor_sum(n as u64, &self.chi1, &self.chi2, self.s));
            }
            *guard = Arc::new(v);
        }
        guard.clone()
    }
}

fn divisor_sum(n: u64, chi1: &DirichletCharacter, chi2: &DirichletCharacter, s: Complex64) -> Complex64 {
    let e = s - 0.5;
    divisors(n)
        .into_iter()
        .map(|a| {
            let b = n / a;
            let w = chi1.value(a as i64) * chi2.value(b as i64).conj();
            if w == Complex64::new(0.0, 0.0) {
                w
            } else {
                w * (e * ((b as f64) / (a as f64)).ln()).exp()
            }
        })
        .sum()
}

/// λ_{χ₁,χ₂}(n, s) = χ₂(sgn n) Σ_{ab=|n|} χ₁(a) conj χ₂(b) (b/a)^{s−½}.
pub fn lambda_coeff(n: i64, model: &EisensteinModel) -> Result<Complex64> {
    if n == 0 {
        return Err(LabError::InvalidArgument("λ(0) is undefined".into()));
    }
    let v = model.coefficients(n.unsigned_abs() as usize)[n.unsigned_abs() as usize - 1];
    Ok(if n < 0 { v * model.chi2.value(-1) } else { v })
}

/// θ_{χ₁,χ₂}(s) = Λ(2s, χ₁χ₂)/τ(χ₂): the factor with E* = θ·E_{χ₁,χ₂},
/// fixed by matching the Fourier expansion against the lattice sum.
pub fn theta(chi1: &DirichletCharacter, chi2: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    let psi = chi1.mul(chi2);
    Ok(even_lambda(2.0 * s, &psi)? / gauss_sum(chi2))
}

/// Λ(w, ψ) for even primitive ψ, taken through Λ(w, ψ) = τ(ψ)/√q · Λ(1−w, ψ̄)
/// left of ½ so the Gamma factor never sits on a pole.
fn even_lambda(w: Complex64, psi: &DirichletCharacter) -> Result<Complex64> {
    if w.re >= 0.5 {
        return completed_lambda(w, psi);
    }
    let eps = gauss_sum(psi) / (psi.modulus() as f64).sqrt();
    Ok(eps * completed_lambda(1.0 - w, &psi.conj())?)
}

/// e*(y, s) = δ_{q₁=1} θ_{1,χ₂}(s)(q₂y)^s + δ_{q₂=1} θ_{1,χ̄₁}(1−s)(q₁y)^{1−s}.
pub fn constant_term(y: f64, model: &EisensteinModel) -> Result<Complex64> {
    let one = DirichletCharacter::trivial();
    let s = model.s;
    let mut v = Complex64::new(0.0, 0.0);
    if model.q1() == 1 {
        v += theta(&one, &model.chi2, s)? * (s * (model.q2() as f64 * y).ln()).exp();
    }
    if model.q2() == 1 {
        let w = 1.0 - s;
        v += theta(&one, &model.chi1.conj(), w)? * (w * (model.q1() as f64 * y).ln()).exp();
    }
    Ok(v)
}

/// Bound for K_ν(x) with Re ν = a: |K_ν| ≤ K_a ≤ √(π/2x) e^{−x} (1 − (a−½)/2x)^{−(a+½)}.
fn bessel_bound(a: f64, x: f64) -> f64 {
    let a = a.abs().max(0.5);
    let r = 1.0 - (a - 0.5) / (2.0 * x);
    if r <= 0.0 {
        return f64::INFINITY;
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() * r.powf(-(a + 0.5))
}

/// Smallest n_max whose certified Fourier tail is below the budget target,
/// with that tail bound.
pub fn fourier_cutoff(y: f64, model: &EisensteinModel, budget: &PrecisionBudget) -> Result<(usize, f64)> {
    let sigma = model.s.re;
    let p = (sigma - 0.5).abs();
    let a = sigma - 0.5;
    let limit = budget.max_terms.min(MAX_FOURIER_TERMS);
    let target = budget.target_abs_err / model.scalar.norm().max(1e-300);
    // |λ(n)| ≤ d(n) n^{|σ−½|} ≤ 2 n^{½+|σ−½|}; two terms ±n
    let term = |n: f64| 8.0 * y.sqrt() * n.powf(0.5 + p) * bessel_bound(a, 2.0 * PI * n * y);
    let mut tail = f64::INFINITY;
    for n in 1..=limit {
        let nf = n as f64;
        let ratio = (-2.0 * PI * y).exp() * ((nf + 2.0) / (nf + 1.0)).powf(1.0 + p);
        if ratio < 1.0 {
            tail = term(nf + 1.0) / (1.0 - ratio);
            if tail <= target {
                return Ok((n, tail * model.scalar.norm()));
            }
        }
    }
    Err(LabError::BudgetExceeded {
        what: "Fourier expansion of E*",
        estimate: tail * model.scalar.norm(),
        target: budget.target_abs_err,
    })
}

/// Raw E*(x + iy, s) for every x in `xs`, sharing the Bessel values.
pub fn eval_e_star_row(
    y: f64,
    xs: &[f64],
    model: &EisensteinModel,
    budget: &PrecisionBudget,
) -> Result<Vec<Complex64>> {
    fourier_row(y, xs, model, budget, true)
}

/// E* minus its constant term, summed directly so nothing cancels high in the cusp.
pub fn eval_nonconstant_row(
    y: f64,
    xs: &[f64],
    model: &EisensteinModel,
    budget: &PrecisionBudget,
) -> Result<Vec<Complex64>> {
    fourier_row(y, xs, model, budget, false)
}

fn fourier_row(
    y: f64,
    xs: &[f64],
    model: &EisensteinModel,
    budget: &PrecisionBudget,
    with_constant: bool,
) -> Result<Vec<Complex64>> {
    if y < model.y_floor {
        return Err(LabError::EvaluationFloor(format!(
            "Im z = {y} is below the Fourier floor {}",
            model.y_floor
        )));
    }
    let (n_max, _) = fourier_cutoff(y, model, budget)?;
    let lambda = model.coefficients(n_max);
    let nu = model.s - 0.5;
    let mut kb = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        kb.push(bessel_k_complex(nu, 2.0 * PI * n as f64 * y)?);
    }
    let e0 = if with_constant {
        constant_term(y, model)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let parity = model.chi2.value(-1);
    let pref = 2.0 * y.sqrt();
    Ok(xs
        .iter()
        .map(|&x| {
            let step = Complex64::from_polar(1.0, 2.0 * PI * x);
            let mut e = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, k) in kb.iter().enumerate() {
                // recompute the phase exactly every 64 steps to bound drift
                e = if (n + 1) % 64 == 0 {
                    Complex64::from_polar(1.0, 2.0 * PI * x * (n + 1) as f64)
                } else {
                    e * step
                };
                acc += lambda[n] * k * (e + parity * e.conj());
            }
            e0 + acc * pref
        })
        .collect())
}

/// Raw E*_{χ₁,χ₂}(z, s) by its Fourier expansion.
pub fn eval_e_star(z: Complex64, model: &EisensteinModel, budget: &PrecisionBudget) -> Result<Complex64> {
    Ok(eval_e_star_row(z.im, &[z.re], model, budget)?[0])
}

impl EisensteinModel {
    /// Value in the model's normalization (E* or E).
    pub fn evaluate(&self, z: Complex64, budget: &PrecisionBudget) -> Result<Complex64> {
        Ok(eval_e_star(z, self, budget)? * self.scalar)
    }
}

/// Attaches τ(χ₂) q₂^s Λ⁻¹(2s, ψ) so evaluations return E rather than E*.
pub fn newform_normalize(model: &EisensteinModel) -> Result<EisensteinModel> {
    let psi = model.psi();
    let lam = completed_lambda(2.0 * model.s, &psi)?;
    if lam.norm() == 0.0 {
        return Err(LabError::Pole {
            function: "newform_normalize",
            at: "Λ(2s, ψ) = 0".into(),
        });
    }
    let q2 = model.q2() as f64;
    let scalar = gauss_sum(&model.chi2) * (model.s * q2.ln()).exp() / lam;
    let mut out = model.clone();
    out.completion_mode = CompletionMode::NewformNormalized;
    out.scalar = scalar;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{character, divisor_count, gcd, quadratic_character};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad5(s: Complex64) -> EisensteinModel {
        EisensteinModel::trivial_twist(quadratic_character(5).unwrap(), s).unwrap()
    }

    /// χ₁ mod 3 and χ₂ mod 5, both odd, so χ₁χ₂ is even.
    fn mixed_pair() -> (DirichletCharacter, DirichletCharacter) {
        let chi1 = character(3, 1).unwrap();
        let chi2 = (0..4)
            .map(|i| character(5, i).unwrap())
            .find(|c| c.parity() == chi1.parity() && !c.is_real())
            .unwrap();
        (chi1, chi2)
    }

    #[test]
    fn coefficient_examples() {
        let m = quad5(c(0.5, 0.0));
        assert_eq!(lambda_coeff(1, &m).unwrap(), c(1.0, 0.0));
        assert_eq!(lambda_coeff(-1, &m).unwrap(), m.chi2.value(-1));
        assert!(lambda_coeff(6, &m).unwrap().norm() < 1e-15);
        assert!(lambda_coeff(0, &m).is_err());
    }

    #[test]
    fn multiplicativity() {
        let (chi1, chi2) = mixed_pair();
        let m = EisensteinModel::new(chi1, chi2, c(0.7, 1.3)).unwrap();
        let q = 15;
        for a in 1..=50u64 {
            for b in 1..=50u64 {
                if gcd(a, b) == 1 && gcd(a * b, q) == 1 {
                    let lhs = lambda_coeff((a * b) as i64, &m).unwrap();
                    let rhs = lambda_coeff(a as i64, &m).unwrap() * lambda_coeff(b as i64, &m).unwrap();
                    assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn hecke_bound_on_critical_line() {
        let m = quad5(c(0.5, 2.3));
        let lam = m.coefficients(10_000);
        for (i, v) in lam.iter().enumerate() {
            assert!(v.norm() <= divisor_count(i as u64 + 1) as f64 + 1e-12);
        }
    }

    #[test]
    fn constant_term_structure() {
        let (chi1, chi2) = mixed_pair();
        let m = EisensteinModel::new(chi1, chi2, c(2.0, 0.0)).unwrap();
        assert_eq!(constant_term(1.3, &m).unwrap(), c(0.0, 0.0));
        let one = DirichletCharacter::trivial();
        let trivial = EisensteinModel::new(one.clone(), one, c(2.0, 0.0)).unwrap();
        let y = 1.7;
        let z4 = PI.powi(4) / 90.0;
        // Λ(2 − 2s) = Λ(−2) = Λ(3) = π^{−3/2} Γ(3/2) ζ(3)
        let lam3 = PI.powf(-1.5) * 0.5 * PI.sqrt() * 1.202_056_903_159_594_2;
        let got = constant_term(y, &trivial).unwrap();
        assert!((got.re - (z4 / PI.powi(2) * y * y + lam3 / y)).abs() < 1e-12);
        assert!(EisensteinModel::new(
            DirichletCharacter::trivial(),
            DirichletCharacter::trivial(),
            c(0.5, 0.0)
        )
        .is_err());
    }

    #[test]
    fn periodicity_and_reality() {
        let m = quad5(c(2.0, 0.0));
        let b = PrecisionBudget::default();
        let z = c(0.3, 1.1);
        let a = eval_e_star(z, &m, &b).unwrap();
        let a1 = eval_e_star(z + 1.0, &m, &b).unwrap();
        assert!((a - a1).norm() < 1e-12 * a.norm());
        let on_axis = eval_e_star(c(0.0, 0.9), &m, &b).unwrap();
        assert!(on_axis.im.abs() < 1e-13 * on_axis.norm());
    }

    #[test]
    fn floor_and_budget() {
        let m = quad5(c(2.0, 0.0));
        let b = PrecisionBudget::default();
        assert!(matches!(
            eval_e_star(c(0.1, 0.01), &m, &b),
            Err(LabError::EvaluationFloor(_))
        ));
        let m = m.with_y_floor(1e-4);
        assert!(matches!(
            eval_e_star(c(0.1, 0.001), &m, &b),
            Err(LabError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn newform_scalar_modulus() {
        let m = quad5(c(0.5, 0.0));
        let nm = newform_normalize(&m).unwrap();
        let lam = crate::lfun::completed_lambda(c(1.0, 0.0), &m.psi()).unwrap();
        // |τ(χ₂) q₂^{1/2}| = q₂
        assert!(((nm.scalar * lam).norm() - 5.0).abs() < 1e-12);
        assert_eq!(nm.completion_mode, CompletionMode::NewformNormalized);
        let chi1 = quadratic_character(5).unwrap();
        let m = EisensteinModel::new(chi1, DirichletCharacter::trivial(), c(0.8, 0.0)).unwrap();
        let nm = newform_normalize(&m).unwrap();
        let lam = crate::lfun::completed_lambda(c(1.6, 0.0), &m.psi()).unwrap();
        assert!((nm.scalar - 1.0 / lam).norm() < 1e-14);
    }
}

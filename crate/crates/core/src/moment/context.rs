use crate::arith::{is_prime, level_data, quadratic_character, DirichletCharacter};
use crate::error::{LabError, Result};
use crate::lfun::{completed_lambda, dirichlet_l};
use crate::special::PrecisionBudget;
use crate::sum::AccumulatorMode;
use crate::Complex64;

pub const DEFAULT_C: f64 = 0.05;

/// Level, character, truncation height and left abscissa for one pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineContext {
    pub n: u64,
    pub psi: DirichletCharacter,
    pub y: f64,
    pub c: f64,
    /// ν(N) = N + 1
    pub nu: u64,
    /// L(1, ψ)
    pub l_one: f64,
    /// Fourier budget for E* inside the zones
    pub budget: PrecisionBudget,
}

impl PipelineContext {
    pub fn new(n: u64, y: f64) -> Result<Self> {
        Self::with_c(n, y, DEFAULT_C)
    }

    pub fn with_c(n: u64, y: f64, c: f64) -> Result<Self> {
        if !is_prime(n) {
            return Err(LabError::InvalidArgument(format!("level {n} is not prime")));
        }
        let psi = quadratic_character(n)
            .ok_or_else(|| LabError::InvalidArgument(format!("no quadratic character mod {n}")))?;
        if !psi.is_even() {
            return Err(LabError::InvalidArgument(format!(
                "the quadratic character mod {n} is odd (need N ≡ 1 mod 4)"
            )));
        }
        if !(y > 1.0) || !y.is_finite() {
            return Err(LabError::InvalidArgument(format!("Y must exceed 1, got {y}")));
        }
        if !(c > 0.0 && c < 3.0) {
            return Err(LabError::InvalidArgument(format!("c must lie in (0, 3), got {c}")));
        }
        // past Re s = −½ the line would cross zeros of ζ(2+2s) and the pole at s = −1
        if c >= 0.5 {
            return Err(LabError::Unsupported(format!(
                "c = {c} would move the contour past the poles of H at Re s ≤ −½"
            )));
        }
        let l_one = dirichlet_l(Complex64::new(1.0, 0.0), &psi)?.re;
        if l_one.abs() < 1e-12 {
            return Err(LabError::ZeroOfL {
                at: "s = 1".into(),
                modulus: l_one.abs(),
            });
        }
        Ok(PipelineContext {
            n,
            psi,
            y,
            c,
            nu: level_data(n).nu,
            l_one,
            budget: PrecisionBudget {
                target_abs_err: 1e-22,
                max_terms: 2000,
                accumulator_mode: AccumulatorMode::Compensated,
            },
        })
    }

    /// Λ(1, ψ) = √N L(1, ψ)
    pub fn lambda_one(&self) -> Result<f64> {
        Ok(completed_lambda(Complex64::new(1.0, 0.0), &self.psi)?.re)
    }
}

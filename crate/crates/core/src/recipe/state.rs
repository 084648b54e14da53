use num_complex::Complex64;
use serde::Serialize;

use crate::arith::DirichletCharacter;
use crate::lfun::LaurentExpansion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiKind {
    Complex,
    Quadratic,
}

impl ChiKind {
    pub fn of(chi: &DirichletCharacter) -> Self {
        if chi.is_real() {
            ChiKind::Quadratic
        } else {
            ChiKind::Complex
        }
    }
}

/// A sign vector ε and shift vector α near α₀ = (0, 0, 2iT, −2iT).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShiftState {
    pub epsilon: [i8; 4],
    pub alpha: [Complex64; 4],
    pub t: f64,
    pub n: u64,
    pub chi_kind: ChiKind,
}

impl ShiftState {
    pub fn alpha0(t: f64) -> [Complex64; 4] {
        [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 2.0 * t),
            Complex64::new(0.0, -2.0 * t),
        ]
    }

    /// ε_j α_j
    pub fn signed(&self, j: usize) -> Complex64 {
        self.alpha[j] * self.epsilon[j] as f64
    }

    pub fn case_label(&self) -> u8 {
        case_label(self.epsilon[2], self.epsilon[3], self.chi_kind, self.t)
    }
}

/// χ^{ε}: χ for ε = +1, χ̄ for ε = −1.
pub fn eps_power(chi: &DirichletCharacter, eps: i8) -> DirichletCharacter {
    if eps > 0 {
        chi.clone()
    } else {
        chi.conj()
    }
}

/// 1: ε₃ ≠ ε₄, complex χ. 2: ε₃ ≠ ε₄, quadratic, T ≠ 0.
/// 3: ε₃ ≠ ε₄, quadratic, T = 0. 4: ε₃ = ε₄.
pub fn case_label(eps3: i8, eps4: i8, kind: ChiKind, t: f64) -> u8 {
    match (eps3 == eps4, kind, t == 0.0) {
        (true, _, _) => 4,
        (false, ChiKind::Complex, _) => 1,
        (false, ChiKind::Quadratic, false) => 2,
        (false, ChiKind::Quadratic, true) => 3,
    }
}

/// One evaluated recipe term. For the limit path, `state` carries the
/// representative (ε₃, ε₄) with α = α₀ and `value` is the constant Laurent
/// coefficient of R_{ε₃,ε₄}(η).
#[derive(Clone, Debug, Serialize)]
pub struct RecipeTerm {
    pub state: ShiftState,
    pub value: Complex64,
    pub case_label: u8,
    pub leading_coefficients: Option<LaurentExpansion>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases() {
        assert_eq!(case_label(1, 1, ChiKind::Complex, 0.3), 4);
        assert_eq!(case_label(-1, -1, ChiKind::Quadratic, 0.0), 4);
        assert_eq!(case_label(1, -1, ChiKind::Complex, 0.0), 1);
        assert_eq!(case_label(-1, 1, ChiKind::Quadratic, 0.5), 2);
        assert_eq!(case_label(1, -1, ChiKind::Quadratic, 0.0), 3);
    }
}

//! Special functions: complex log-Gamma and Beta, K-Bessel of complex order,
//! Stieltjes constants, the functional-equation factor f(s, g), and the
//! Beta-product integral equal to 8π³.

mod bessel;
mod dbw;
mod gamma;
mod gamma_factor;
mod stieltjes;

pub use bessel::{bessel_k, bessel_k_complex, bessel_k_flagged, BesselK};
pub use dbw::{dbw_integral, dbw_integrand, DbwResult, DbwRule, WeightedDbw};
pub use gamma::{beta, digamma, gamma, log_beta, log_gamma, log_gamma_real};
pub use gamma_factor::{gamma_factor_f, gamma_ratio, GammaFactorSpec};
pub use stieltjes::{stieltjes, EULER_GAMMA};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::sum::AccumulatorMode;

/// Smallest absolute error the binary64 kernels are trusted to deliver in
/// standard accumulation.
pub const STANDARD_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub target_abs_err: f64,
    pub max_terms: usize,
    pub accumulator_mode: AccumulatorMode,
}

impl PrecisionBudget {
    pub fn new(target_abs_err: f64, max_terms: usize, mode: AccumulatorMode) -> Result<Self> {
        if !(target_abs_err > 0.0) {
            return Err(LabError::InvalidArgument(format!(
                "target_abs_err must be positive, got {target_abs_err}"
            )));
        }
        if mode == AccumulatorMode::Standard && target_abs_err < STANDARD_FLOOR {
            return Err(LabError::EvaluationFloor(format!(
                "target {target_abs_err:e} is below the standard-mode floor {STANDARD_FLOOR:e}"
            )));
        }
        Ok(PrecisionBudget {
            target_abs_err,
            max_terms,
            accumulator_mode: mode,
        })
    }
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            target_abs_err: 1e-9,
            max_terms: 20_000,
            accumulator_mode: AccumulatorMode::Compensated,
        }
    }
}

//! The recipe pipeline for the fourth moment in closed form: Gamma-ratio
//! weights, the collapsed Kuznetsov functional F_ε, the Ramanujan diagonal
//! identity, the shifted terms S(ε, α), the limit path α → α₀ with its
//! four-case Laurent analysis, and the level-aspect predictors.

mod closed;
mod limit;
mod predict;
mod state;

pub use closed::{f_eps, h_weight, quadruple_diagonal_sum, ramanujan_ratio, s_term, DiagonalSum, RecipeSetup};
pub use limit::{limit_path_evaluate, LimitPath, LimitSettings};
pub use predict::{
    auto_schedule, corollary_consistency, i2_estimate, i2_main, main_prediction, threshold_scan, I2Estimate,
    ThresholdRow,
};
pub use state::{case_label, eps_power, ChiKind, RecipeTerm, ShiftState};

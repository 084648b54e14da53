//! The truncated fourth-moment pipeline: the Mellin pair g/G, the
//! Rankin–Selberg series, the triple-pole contour integral, the cusp-zone
//! integral by three routes, the Cauchy cross term and the level sweep.

mod context;
mod contour;
mod mellin;
mod series;
mod zone;

pub use context::{PipelineContext, DEFAULT_C};
pub use contour::{
    integrand_h, k_function, residue_at_zero, residue_by_laurent, shifted_contour_integral,
    shifted_contour_integral_to, ResidueAtZero, ShiftedIntegral,
};
pub use mellin::{g_function, mellin_g, mellin_g_numeric};
pub use series::{divisor_character_sums, rankin_selberg_closed, rankin_selberg_series, RankinSelberg};
pub use zone::{
    cross_term, cross_term_parts, cuspzone_integral, route_agreement, saddle_line_integral, theorem0diff_report,
    theorem0diff_row, CrossTerm, Theorem0Row, ZoneRoute, ZoneValue,
};

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use super::{log_beta, PrecisionBudget};
use crate::error::{LabError, Result};
use crate::quad::gauss_legendre;
use crate::sum::Accumulator;

const PANEL: f64 = 0.5;
const T_MAX_LIMIT: f64 = 200.0;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DbwResult {
    pub value: f64,
    /// quadrature error estimate plus tail bound
    pub abs_error: f64,
    pub tail_bound: f64,
    pub t_max: f64,
    pub evaluations: usize,
}

/// t sinh(πt) ∏_{ε₁,ε₂=±} B(¼ + ε₁it/2 + ε₂iT, ¼ − ε₁it/2).
///
/// Sign flips of (ε₁, ε₂) conjugate the Beta factors, so the product is
/// |B(¼+it/2+iT, ¼−it/2)|²·|B(¼+it/2−iT, ¼−it/2)|² and the integrand is
/// non-negative and even in t.
pub fn dbw_integrand(t: f64, big_t: f64) -> Result<f64> {
    let t = t.abs();
    if t == 0.0 {
        return Ok(0.0);
    }
    let q = Complex64::new(0.25, 0.0);
    let half = Complex64::new(0.0, t / 2.0);
    let shift = Complex64::new(0.0, big_t);
    let b1 = log_beta(q + half + shift, q - half)?.re;
    let b2 = log_beta(q + half - shift, q - half)?.re;
    let log_sinh = PI * t + (-(-2.0 * PI * t).exp()).ln_1p() - std::f64::consts::LN_2;
    Ok((t.ln() + log_sinh + 2.0 * (b1 + b2)).exp())
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(24), gauss_legendre(12)))
}

/// ∫_ℝ of [`dbw_integrand`], truncated at the first t_max whose tail bound
/// meets a quarter of the budget. The integrand behaves like C e^{−πt}/t,
/// so the tail beyond t_max is at most 2f(t_max)/(π − 1/t_max).
pub fn dbw_integral(big_t: f64, budget: PrecisionBudget) -> Result<DbwResult> {
    let tail = |tm: f64| -> Result<f64> { Ok(2.0 * dbw_integrand(tm, big_t)? / (PI - 1.0 / tm)) };
    let mut t_max = 10.0;
    while tail(t_max)? > 0.25 * budget.target_abs_err {
        t_max += 5.0;
        if t_max > T_MAX_LIMIT {
            return Err(LabError::BudgetExceeded {
                what: "dbw_integral tail".into(),
                estimate: tail(T_MAX_LIMIT)?,
                target: budget.target_abs_err,
            });
        }
    }
    let panels = (t_max / PANEL).round() as usize;
    let evaluations = panels * 36;
    if evaluations > budget.max_terms {
        return Err(LabError::BudgetExceeded {
            what: "dbw_integral nodes".into(),
            estimate: evaluations as f64,
            target: budget.max_terms as f64,
        });
    }
    let ((x24, w24), (x12, w12)) = rules();
    let panel_values = crate::par::try_map_range(panels, |p| -> Result<(f64, f64)> {
        let c = (p as f64 + 0.5) * PANEL;
        let h = 0.5 * PANEL;
        let mut fine = 0.0;
        for (x, w) in x24.iter().zip(w24) {
            fine += w * dbw_integrand(c + h * x, big_t)?;
        }
        let mut coarse = 0.0;
        for (x, w) in x12.iter().zip(w12) {
            coarse += w * dbw_integrand(c + h * x, big_t)?;
        }
        Ok((fine * h, (fine - coarse).abs() * h))
    })?;
    let mut acc = Accumulator::new(budget.accumulator_mode);
    let mut quad_err = 0.0;
    for (v, e) in &panel_values {
        acc.add(*v);
        quad_err += e;
    }
    let tail_bound = tail(t_max)?;
    let abs_error = 2.0 * quad_err + tail_bound;
    Ok(DbwResult {
        value: 2.0 * acc.value(),
        abs_error,
        tail_bound,
        t_max,
        evaluations,
    })
}

/// Fixed node set for ∫_ℝ dbw_integrand(t)·h(t) dt with h even in t, so
/// one table of Beta products serves every weight. The same nodes are used
/// for every h, which keeps the quadrature error analytic in h's parameters.
#[derive(Clone, Debug)]
pub struct DbwRule {
    pub big_t: f64,
    pub t_max: f64,
    /// positive nodes; the integrand's evenness supplies the negative half
    pub nodes: Vec<f64>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
    tail_at_cut: f64,
}

/// Weighted integral from a [`DbwRule`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeightedDbw {
    pub value: Complex64,
    pub abs_error: f64,
    pub tail_bound: f64,
}

impl DbwRule {
    /// Nodes good to `budget.target_abs_err` for weights growing at most
    /// like (1 + t)^growth.
    pub fn new(big_t: f64, growth: f64, budget: &PrecisionBudget) -> Result<Self> {
        let tail = |tm: f64| -> Result<f64> {
            let rate = PI - (1.0 + growth.max(0.0)) / tm;
            Ok(2.0 * dbw_integrand(tm, big_t)? * (1.0 + tm).powf(growth.max(0.0)) / rate.max(1e-3))
        };
        let mut t_max = 10.0;
        while tail(t_max)? > 0.25 * budget.target_abs_err {
            t_max += 5.0;
            if t_max > T_MAX_LIMIT {
                return Err(LabError::BudgetExceeded {
                    what: "dbw rule tail",
                    estimate: tail(T_MAX_LIMIT)?,
                    target: budget.target_abs_err,
                });
            }
        }
        let panels = (t_max / PANEL).round() as usize;
        if panels * 36 > budget.max_terms {
            return Err(LabError::BudgetExceeded {
                what: "dbw rule nodes",
                estimate: (panels * 36) as f64,
                target: budget.max_terms as f64,
            });
        }
        let ((x24, w24), (x12, w12)) = rules();
        let mut nodes = Vec::with_capacity(panels * 36);
        let (mut fine, mut coarse) = (Vec::new(), Vec::new());
        for p in 0..panels {
            let c = (p as f64 + 0.5) * PANEL;
            let h = 0.5 * PANEL;
            for (x, w) in x24.iter().zip(w24) {
                nodes.push(c + h * x);
                fine.push(w * h);
                coarse.push(0.0);
            }
            for (x, w) in x12.iter().zip(w12) {
                nodes.push(c + h * x);
                fine.push(0.0);
                coarse.push(w * h);
            }
        }
        let base = crate::par::try_map(&nodes, |&t| dbw_integrand(t, big_t))?;
        for (k, b) in base.iter().enumerate() {
            fine[k] *= 2.0 * b;
            coarse[k] *= 2.0 * b;
        }
        Ok(DbwRule {
            big_t,
            t_max,
            nodes,
            fine,
            coarse,
            tail_at_cut: tail(t_max)?,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ dbw_integrand·h given h at [`Self::nodes`].
    pub fn integrate(&self, h: &[Complex64]) -> WeightedDbw {
        assert_eq!(h.len(), self.nodes.len());
        let mut fine = Complex64::new(0.0, 0.0);
        let mut coarse = Complex64::new(0.0, 0.0);
        for k in 0..h.len() {
            fine += h[k] * self.fine[k];
            coarse += h[k] * self.coarse[k];
        }
        WeightedDbw {
            value: fine,
            abs_error: (fine - coarse).norm() + self.tail_at_cut,
            tail_bound: self.tail_at_cut,
        }
    }
}

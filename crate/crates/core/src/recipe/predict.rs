use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::state::ChiKind;
use crate::arith::{level_data, DirichletCharacter};
use crate::error::Result;
use crate::geometry::volume;
use crate::lfun::log_derivative;
use crate::report::MomentReport;

fn nu(n: u64) -> f64 {
    level_data(n).nu as f64
}

/// (24/π) log²N / ν(N) · (1 + δ_{quadratic} δ_{T=0}).
pub fn main_prediction(n: u64, t: f64, kind: ChiKind) -> f64 {
    let log_n = (n as f64).ln();
    let doubled = kind == ChiKind::Quadratic && t == 0.0;
    24.0 / PI * log_n * log_n / nu(n) * if doubled { 2.0 } else { 1.0 }
}

/// The main term of I₂, (24/π) log²N / ν(N).
pub fn i2_main(n: u64) -> f64 {
    main_prediction(n, 1.0, ChiKind::Complex)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct I2Estimate {
    pub main: f64,
    pub correction_band: f64,
    pub log_derivative_1: Complex64,
    pub log_derivative_2: Complex64,
}

/// I₂ main term and the size of its L′/L, L″/L corrections at 1 + 2iT:
/// (|L″/L| + log N log log N |L′/L|)/ν(N).
pub fn i2_estimate(n: u64, t: f64, psi: &DirichletCharacter) -> Result<I2Estimate> {
    let s = Complex64::new(1.0, 2.0 * t);
    let d1 = log_derivative(s, psi, 1)?.value;
    let d2 = log_derivative(s, psi, 2)?.value;
    let log_n = (n as f64).ln();
    let loglog = log_n.ln().max(0.0);
    Ok(I2Estimate {
        main: i2_main(n),
        correction_band: (d2.norm() + log_n * loglog * d1.norm()) / nu(n),
        log_derivative_1: d1,
        log_derivative_2: d2,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdRow {
    pub t: f64,
    /// x = 4T log N
    pub x: f64,
    /// e^{ix}/(4iT) + e^{−ix}/(−4iT) = sin(x)/(2T)
    pub bracket: f64,
    /// small-x regime, 2 log N
    pub small_x_reference: f64,
    /// large-x envelope 1/(2|T|)
    pub envelope: f64,
    /// bracket × log N/(4ν ζ(2)) with the displayed sign
    pub upndown_displayed: f64,
    /// bracket × 12 log N/(πν), whose T → 0 limit is (24/π) log²N/ν
    pub upndown_rescaled: f64,
}

/// T values k/log N for a fixed ladder of k.
pub fn auto_schedule(n: u64) -> Vec<f64> {
    let log_n = (n as f64).ln();
    [0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k / log_n)
        .collect()
}

pub fn threshold_scan(n: u64, schedule: &[f64]) -> Vec<ThresholdRow> {
    let log_n = (n as f64).ln();
    let zeta2 = PI * PI / 6.0;
    schedule
        .iter()
        .map(|&t| {
            let x = 4.0 * t * log_n;
            // sin(x)/(2T) = 2 log N · sinc(x)
            let bracket = if x.abs() < 1e-8 {
                2.0 * log_n * (1.0 - x * x / 6.0)
            } else {
                x.sin() / (2.0 * t)
            };
            ThresholdRow {
                t,
                x,
                bracket,
                small_x_reference: 2.0 * log_n,
                envelope: if t == 0.0 { f64::INFINITY } else { 1.0 / (2.0 * t.abs()) },
                upndown_displayed: -log_n / (4.0 * nu(n) * zeta2) * bracket,
                upndown_rescaled: 12.0 * log_n / (PI * nu(n)) * bracket,
            }
        })
        .collect()
}

/// (I₁ + I₂ main terms) / (4 log²N / Vol) against 2·3 or 2·2.
pub fn corollary_consistency(n: u64, t: f64, kind: ChiKind) -> MomentReport {
    let log_n = (n as f64).ln();
    let lhs = (main_prediction(n, t, kind) + i2_main(n)) / (4.0 * log_n * log_n / volume(n));
    let rhs = if kind == ChiKind::Quadratic && t == 0.0 {
        6.0
    } else {
        4.0
    };
    MomentReport::compare("corollary-two-cases", lhs.into(), rhs.into(), 1e-12)
        .note("N", n)
        .note("T", t)
        .note("kind", format!("{kind:?}").to_lowercase())
}

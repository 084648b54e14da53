use std::sync::OnceLock;

use crate::error::{LabError, Result};
use crate::sum::{sum_with, AccumulatorMode};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const CUTOFF: usize = 1000;
// B_{2j} for j = 1..8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Stieltjes constant γ_n = lim_M (Σ_{k≤M} logⁿk/k − log^{n+1}M/(n+1)),
/// n ∈ {0, 1}. Standard sign convention: γ₁ ≈ −0.0728.
pub fn stieltjes(n: u32) -> Result<f64> {
    static CACHE: OnceLock<[f64; 2]> = OnceLock::new();
    if n > 1 {
        return Err(LabError::Unsupported(format!("stieltjes({n}): only n = 0, 1")));
    }
    Ok(CACHE.get_or_init(|| [euler_maclaurin(0), euler_maclaurin(1)])[n as usize])
}

/// Euler–Maclaurin at cutoff M with eight correction terms:
/// γ_n = Σ_{k≤M} f(k) − log^{n+1}M/(n+1) − f(M)/2 − Σ_j B_{2j}/(2j)! f^{(2j−1)}(M)
/// where f(x) = logⁿx / x.
fn euler_maclaurin(n: u32) -> f64 {
    let m = CUTOFF as f64;
    let lm = m.ln();
    let partial = sum_with(
        AccumulatorMode::DoubleWord,
        (1..=CUTOFF).rev().map(|k| (k as f64).ln().powi(n as i32) / k as f64),
    );
    let main = lm.powi(n as i32 + 1) / (n as f64 + 1.0);
    let f_m = lm.powi(n as i32) / m;
    // For odd r: f^{(r)}(M) = −r!/M^{r+1} (n = 0) and
    // −r!(log M − H_r)/M^{r+1} (n = 1); r!/(r+1)! leaves 1/(2j).
    let mut correction = 0.0;
    let mut harmonic = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let r = 2 * j + 1;
        if n == 1 {
            harmonic += if r == 1 {
                1.0
            } else {
                1.0 / (r - 1) as f64 + 1.0 / r as f64
            };
        }
        let numer = if n == 0 { 1.0 } else { lm - harmonic };
        correction -= b / (r + 1) as f64 * numer / m.powi(r as i32 + 1);
    }
    partial - main - f_m / 2.0 - correction
}

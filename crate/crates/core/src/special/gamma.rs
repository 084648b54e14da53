use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{pole, Result};

// B_{2k} / (2k(2k−1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_TO: f64 = 12.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of log Γ(z): real on the positive axis and continuous
/// off the non-positive real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(pole("log_gamma", format!("{z}")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

fn stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + series
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

pub fn log_gamma_real(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

/// B(x, y) = Γ(x)Γ(y)/Γ(x+y), evaluated in log space.
pub fn beta(x: Complex64, y: Complex64) -> Result<Complex64> {
    Ok(log_beta(x, y)?.exp())
}

pub fn log_beta(x: Complex64, y: Complex64) -> Result<Complex64> {
    Ok(log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?)
}

/// ψ(z) = Γ′/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(pole("digamma", format!("{z}")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TO {
        shift += 1.0 / w;
        w += 1.0;
    }
    // B_{2k}/(2k)
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let inv2 = 1.0 / (w * w);
    let mut p = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for c in C {
        series += p * c;
        p *= inv2;
    }
    Ok(w.ln() - 0.5 / w - series - shift)
}

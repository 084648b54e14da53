use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// log of the smallest positive normal double; anything below is reported
/// as underflow.
const LOG_UNDERFLOW: f64 = -708.0;
/// Integrand is truncated once its log-magnitude is this far below the peak.
const TRUNCATE_DROP: f64 = 46.0;

/// K-Bessel value with an underflow marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselK {
    pub value: f64,
    pub underflow: bool,
}

/// K_{it}(x) for real t and x > 0. Underflow is returned as exact 0.
pub fn bessel_k(order_t: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_flagged(order_t, x)?.value)
}

pub fn bessel_k_flagged(order_t: f64, x: f64) -> Result<BesselK> {
    let (v, underflow) = k_complex(Complex64::new(0.0, order_t.abs()), x)?;
    Ok(BesselK { value: v.re, underflow })
}

/// K_ν(x) for complex order ν and x > 0.
pub fn bessel_k_complex(nu: Complex64, x: f64) -> Result<Complex64> {
    Ok(k_complex(nu, x)?.0)
}

fn k_complex(nu: Complex64, x: f64) -> Result<(Complex64, bool)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LabError::InvalidArgument(format!("bessel_k needs x > 0, got {x}")));
    }
    // K_ν = K_{−ν} and K_{ν̄} = conj K_ν, so reduce to Re ν ≥ 0, Im ν ≥ 0.
    let nu = if nu.re < 0.0 { -nu } else { nu };
    if nu.im < 0.0 {
        let (v, u) = contour(nu.conj(), x);
        return Ok((v.conj(), u));
    }
    Ok(contour(nu, x))
}

/// K_ν(x) = ½∫ exp(−x cosh u + νu) du along u = v + iφ, with φ chosen so the
/// path passes through (or near) the saddle of the oscillating phase.
fn contour(nu: Complex64, x: f64) -> (Complex64, bool) {
    let (a, t) = (nu.re, nu.im);
    let phi = if t == 0.0 {
        0.0
    } else {
        let d0 = (2.0 / t).min(1.0);
        if t < x * d0.cos() {
            (t / x).asin()
        } else {
            FRAC_PI_2 - d0
        }
    };
    let (sp, cp) = phi.sin_cos();
    let c = x * cp;
    let m = |v: f64| -c * v.cosh() + a * v - t * phi;
    let vstar = (a / c).asinh();
    let peak = m(vstar);
    // the path integral of e^{m − peak} is far below e^{30}
    if peak < LOG_UNDERFLOW - 30.0 {
        return (Complex64::new(0.0, 0.0), true);
    }
    let edge = |dir: f64| {
        let mut d = 1.0;
        while m(vstar + dir * d) > peak - TRUNCATE_DROP {
            d *= 2.0;
        }
        let (mut lo, mut hi) = (0.0, d);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if m(vstar + dir * mid) > peak - TRUNCATE_DROP {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let (left, right) = (edge(-1.0), edge(1.0));
    let g = |v: f64| {
        let (sh, ch) = (v.sinh(), v.cosh());
        let re = -x * ch * cp + a * v - t * phi - peak;
        let im = -x * sh * sp + t * v + a * phi;
        Complex64::from_polar(re.exp(), im)
    };
    let mut h = (left + right) / 32.0;
    let mut sum = g(vstar);
    let mut scale = sum.norm();
    let (mut kl, mut kr) = ((left / h).ceil() as i64, (right / h).ceil() as i64);
    for k in 1..=kr {
        let v = g(vstar + k as f64 * h);
        sum += v;
        scale += v.norm();
    }
    for k in 1..=kl {
        let v = g(vstar - k as f64 * h);
        sum += v;
        scale += v.norm();
    }
    let mut estimate = sum * h;
    let mut last_diff = f64::INFINITY;
    for _ in 0..16 {
        h *= 0.5;
        kl *= 2;
        kr *= 2;
        let mut extra = Complex64::new(0.0, 0.0);
        let mut k = -kl + 1;
        while k <= kr {
            let v = g(vstar + k as f64 * h);
            extra += v;
            scale += v.norm();
            k += 2;
        }
        sum += extra;
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        // trapezoid error squares each halving; a diff that stops shrinking is roundoff
        if diff <= 1e-15 * scale * h || (diff <= 1e-13 * scale * h && diff > 0.25 * last_diff) {
            break;
        }
        last_diff = diff;
    }
    let half = estimate * 0.5;
    let log_mag = peak + half.norm().ln();
    if log_mag < LOG_UNDERFLOW {
        return (Complex64::new(0.0, 0.0), true);
    }
    (half * peak.exp(), false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // reference values from an independent arbitrary-precision evaluation
    const TABLE: [(f64, f64, f64, f64, f64); 10] = [
        (0.0, 0.0, 1.0, 0.421_024_438_240_708_33, 0.0),
        (0.0, 10.0, 1.0, 1.129_455_082_168_180_2e-7, 0.0),
        (0.0, 3.0, 0.001, -0.012_442_388_380_987_928, 0.0),
        (0.0, 5.0, 2.0, -0.000_346_337_880_806_571_43, 0.0),
        (1.5, 2.0, 3.0, 0.017_456_476_790_175_606, 0.021_433_408_494_825_379),
        (0.5, 7.0, 0.5, -3.474_021_423_184_737_9e-5, -2.613_936_016_476_508_4e-5),
        (0.0, 10.0, 50.0, 1.262_850_692_276_652e-23, 0.0),
        (0.0, 2.5, 10.0, 1.317_699_796_865_085_6e-5, 0.0),
        (0.0, 1.0, 0.001, 0.443_354_677_906_757_41, 0.0),
        (0.0, 0.0, 50.0, 3.410_167_749_789_495_5e-23, 0.0),
    ];

    #[test]
    fn reference_table() {
        for (a, t, x, re, im) in TABLE {
            let v = bessel_k_complex(Complex64::new(a, t), x).unwrap();
            let want = Complex64::new(re, im);
            assert!(
                (v - want).norm() <= 1e-10 * want.norm(),
                "ν={a}+{t}i x={x}: {v} vs {want}"
            );
        }
    }

    #[test]
    fn cosine_integral_at_order_zero() {
        // K_0(x) = ∫₀^∞ e^{−x cosh u} du
        for x in [0.5, 1.0, 3.0] {
            let r = crate::quad::adaptive(|u: f64| (-x * u.cosh()).exp(), 0.0, 12.0, 1e-15, 1e-15);
            let k = bessel_k(0.0, x).unwrap();
            assert!((k - r.value).abs() < 1e-12 * k, "{x}");
        }
    }

    #[test]
    fn half_order_closed_form() {
        for x in [0.01, 0.7, 5.0, 40.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let v = bessel_k_complex(Complex64::new(0.5, 0.0), x).unwrap();
            assert!((v.re - exact).abs() < 1e-12 * exact && v.im.abs() < 1e-12 * exact);
            let v = bessel_k_complex(Complex64::new(1.5, 0.0), x).unwrap();
            let exact = exact * (1.0 + 1.0 / x);
            assert!((v.re - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn large_argument_asymptotic() {
        let x = 10.0;
        let asym = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 - 1.0 / (8.0 * x));
        let k = bessel_k(0.0, x).unwrap();
        assert!((k - asym).abs() < 1e-3 * k);
    }

    #[test]
    fn order_symmetry_is_exact() {
        for (t, x) in [(0.3, 1.0), (7.0, 0.2), (2.0, 30.0)] {
            assert_eq!(bessel_k(t, x).unwrap(), bessel_k(-t, x).unwrap());
        }
        let nu = Complex64::new(0.8, 3.0);
        assert_eq!(bessel_k_complex(nu, 2.0).unwrap(), bessel_k_complex(-nu, 2.0).unwrap());
        assert_eq!(
            bessel_k_complex(nu.conj(), 2.0).unwrap(),
            bessel_k_complex(nu, 2.0).unwrap().conj()
        );
    }

    #[test]
    fn ode_residual() {
        // x²K″ + xK′ − (x² − t²)K = 0 for K = K_{it}
        let x = 2.0;
        let h = 1e-3;
        for t in [0.0, 1.0, 4.0, 9.0] {
            let k = |x| bessel_k(t, x).unwrap();
            let (k0, kp, km) = (k(x), k(x + h), k(x - h));
            let d2 = (kp - 2.0 * k0 + km) / (h * h);
            let d1 = (kp - km) / (2.0 * h);
            let res = x * x * d2 + x * d1 - (x * x - t * t) * k0;
            let scale = (x * x * d2).abs() + (x * d1).abs() + ((x * x - t * t) * k0).abs();
            assert!(res.abs() <= 1e-6 * scale, "t={t}: {res} / {scale}");
        }
    }

    #[test]
    fn underflow_flag() {
        let r = bessel_k_flagged(1.0, 800.0).unwrap();
        assert!(r.underflow && r.value == 0.0);
        assert!(!bessel_k_flagged(1.0, 600.0).unwrap().underflow);
        assert!(bessel_k(1.0, 0.0).is_err());
    }

    #[test]
    fn grid_accuracy_against_recurrence() {
        // K_{ν+1} = K_{ν−1} + (2ν/x) K_ν holds for complex ν
        for &t in &[0.0, 0.5, 3.0, 10.0] {
            for &x in &[1e-3, 0.1, 1.0, 7.0, 25.0, 50.0] {
                let nu = Complex64::new(0.0, t);
                let km = bessel_k_complex(nu - 1.0, x).unwrap();
                let k0 = bessel_k_complex(nu, x).unwrap();
                let kp = bessel_k_complex(nu + 1.0, x).unwrap();
                let rhs = km + k0 * nu * 2.0 / x;
                assert!((kp - rhs).norm() <= 1e-10 * kp.norm(), "t={t} x={x}");
            }
        }
    }
}

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{pole, LabError, Result};

const DEPTH: usize = 20;

/// B_{2j}/(2j)! for j = 1..=20.
fn bernoulli_scaled() -> &'static [f64; DEPTH] {
    static TABLE: OnceLock<[f64; DEPTH]> = OnceLock::new();
    TABLE.get_or_init(|| {
        const B: [(f64, f64); DEPTH] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
            (-23749461029.0, 870.0),
            (8615841276005.0, 14322.0),
            (-7709321041217.0, 510.0),
            (2577687858367.0, 6.0),
            (-26315271553053477373.0, 1919190.0),
            (2929993913841559.0, 6.0),
            (-261082718496449122051.0, 13530.0),
        ];
        let mut out = [0.0; DEPTH];
        let mut fact = 1.0;
        for (j, (n, d)) in B.iter().enumerate() {
            let k = 2 * (j + 1);
            fact *= ((k - 1) * k) as f64;
            out[j] = n / d / fact;
        }
        out
    })
}

/// (e^z − 1)/z, accurate near z = 0.
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..20 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// ζ(s, a) − 1/(s − 1), analytic at s = 1. Combinations Σ c_a ζ(s, a) with
/// Σ c_a = 0 (non-principal characters) are formed from this without the
/// cancellation of two large pole terms.
pub(crate) fn hurwitz_regular(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(LabError::InvalidArgument(format!(
            "hurwitz_zeta needs a in (0, 1], got {a}"
        )));
    }
    // a short head keeps cancellation small when Re s < 0; twenty correction
    // terms already reach 1e-20 at this cut
    let m = 15usize.max(s.norm().ceil() as usize + 15);
    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..m {
        head += (-s * (k as f64 + a).ln()).exp();
    }
    let x = m as f64 + a;
    let lx = x.ln();
    // ((x^{1−s} − 1)/(s − 1)) = −log x · exprel((1 − s) log x)
    let integral = -lx * exprel((1.0 - s) * lx);
    let xs = (-s * lx).exp();
    let mut tail = xs * 0.5;
    // B_{2j}/(2j)! · s(s+1)…(s+2j−2) x^{−s−2j+1}
    let mut rising = s;
    let mut power = xs / x;
    let inv2 = 1.0 / (x * x);
    for (j, b) in bernoulli_scaled().iter().enumerate() {
        if j > 0 {
            let k = (2 * j) as f64;
            rising *= (s + (k - 1.0)) * (s + k);
            power *= inv2;
        }
        tail += rising * power * *b;
    }
    Ok(head + integral + tail)
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{−s}, a ∈ (0, 1].
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(pole("hurwitz_zeta", "s = 1"));
    }
    Ok(hurwitz_regular(s, a)? + 1.0 / (s - 1.0))
}

pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(pole("zeta", "s = 1"));
    }
    hurwitz_zeta(s, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn known_values() {
        assert!((zeta(c(2.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(c(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-14);
        // cancellation in the head sum costs a few digits for Re s < 0
        assert!((zeta(c(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-11);
        assert!((zeta(c(4.0, 0.0)).unwrap().re - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!(zeta(c(1.0, 0.0)).is_err());
        // first nontrivial zero
        assert!(zeta(c(0.5, 14.134_725_141_734_693)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn half_shift_identity() {
        // ζ(s, ½) = (2^s − 1) ζ(s), checked against direct summation at s = 3
        let v = hurwitz_zeta(c(3.0, 0.0), 0.5).unwrap();
        let direct: f64 =
            (0..200_000).map(|k| (k as f64 + 0.5).powi(-3)).sum::<f64>() + 1.0 / (2.0 * 200_000f64.powi(2));
        assert!((v.re - direct).abs() < 1e-10 * direct);
        assert!((v.re - 7.0 * 1.202_056_903_159_594_3).abs() < 1e-12);
        for s in [c(0.3, 4.0), c(-0.9, 1.0), c(12.0, -25.0), c(2.0, 29.0)] {
            let lhs = hurwitz_zeta(s, 0.5).unwrap();
            let rhs = (Complex64::from(2.0).powc(s) - 1.0) * zeta(s).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "{s}");
        }
        // further left the head sum cancels; absolute accuracy survives
        let s = c(-2.5, 1.0);
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        let rhs = (Complex64::from(2.0).powc(s) - 1.0) * zeta(s).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn multiplication_formula() {
        // Σ_{r<m} ζ(s, (a+r)/m) = m^s ζ(s, a)
        for s in [c(2.5, 3.0), c(-0.5, 7.0), c(1.0 + 1e-4, 0.0)] {
            let (a, m) = (0.3, 3.0);
            let sum: Complex64 = (0..3).map(|r| hurwitz_zeta(s, (a + r as f64) / m).unwrap()).sum();
            let want = Complex64::from(m).powc(s) * hurwitz_zeta(s, a).unwrap();
            assert!((sum - want).norm() < 1e-10 * want.norm(), "{s}");
        }
    }

    #[test]
    fn regular_part_near_one() {
        // ζ(1 + ε) − 1/ε → γ₀ as ε → 0
        let r = hurwitz_regular(c(1.0, 0.0), 1.0).unwrap();
        assert!((r.re - crate::special::EULER_GAMMA).abs() < 1e-13);
    }
}

//! Quadrature rules shared by the special-function, L-function and moment
//! kernels: Gauss–Legendre, adaptive Gauss–Kronrod (7/15), double-exponential
//! rules for endpoint singularities and half-lines, and the trapezoid rule on
//! circles for Cauchy integrals.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Scalar values a quadrature rule can accumulate.
pub trait Scalar:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    x.into_iter().zip(w).map(|(x, w)| (c + h * x, h * w)).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<V: Scalar, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod 7/15 on [a, b].
pub fn adaptive<V: Scalar, F: Fn(f64) -> V>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral<V> {
    adaptive_with_limit(f, a, b, abs_tol, rel_tol, 2000)
}

pub fn adaptive_with_limit<V: Scalar, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral<V> {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let total = parts.iter().fold(V::default(), |acc, p| acc + p.2);
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.magnitude()) || parts.len() >= max_intervals {
            return Integral {
                value: total,
                error: err,
                evaluations: evals,
            };
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evals += 30;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Adaptive integration over consecutive panels [p₀,p₁], [p₁,p₂], ….
pub fn adaptive_panels<V: Scalar, F: Fn(f64) -> V>(f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Integral<V> {
    let mut out = Integral {
        value: V::default(),
        error: 0.0,
        evaluations: 0,
    };
    let share = abs_tol / (breaks.len().max(2) - 1) as f64;
    for w in breaks.windows(2) {
        let r = adaptive(&f, w[0], w[1], share, rel_tol);
        out.value = out.value + r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    }
    out
}

/// Tanh–sinh rule on [a, b]; tolerant of integrable endpoint singularities.
/// Nodes near `b` are formed as `b − d`, so a singularity at `b` written as a
/// function of `b − x` loses digits; put it at `a` when that matters.
/// Step is halved until two successive levels agree to `tol` (relative).
pub fn tanh_sinh<V: Scalar, F: Fn(f64) -> V>(f: F, a: f64, b: f64, tol: f64) -> Integral<V> {
    let h2 = 0.5 * (b - a);
    // nodes past the point where b − a underflows are dropped individually
    let tmax = 6.5;
    let node = |t: f64| -> Option<V> {
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // distance from the nearer endpoint, computed without cancellation
        let d = (-u.abs()).exp() / u.cosh();
        if w < 1e-300 || d * h2 == 0.0 {
            return None;
        }
        let xp = if u > 0.0 { b - h2 * d } else { a + h2 * d };
        if xp <= a || xp >= b {
            return None;
        }
        Some(f(xp) * (w * h2))
    };
    double_exponential_levels(node, tmax, tol)
}

/// Exp–sinh rule on [a, ∞) for integrands decaying at least exponentially;
/// tolerant of an integrable singularity at `a`.
pub fn exp_sinh<V: Scalar, F: Fn(f64) -> V>(f: F, a: f64, scale: f64, tol: f64) -> Integral<V> {
    let node = |t: f64| -> Option<V> {
        let e = (0.5 * PI * t.sinh()).exp();
        let x = scale * e;
        let w = scale * e * 0.5 * PI * t.cosh();
        if !x.is_finite() || x == 0.0 || !w.is_finite() {
            return None;
        }
        let v = f(a + x);
        Some(v * w)
    };
    double_exponential_levels(node, 4.5, tol)
}

fn double_exponential_levels<V: Scalar, G: Fn(f64) -> Option<V>>(node: G, tmax: f64, tol: f64) -> Integral<V> {
    let mut h = 0.5;
    let mut evals = 0;
    let mut sum = node(0.0).unwrap_or_default();
    evals += 1;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        for s in [t, -t] {
            if let Some(v) = node(s) {
                sum = sum + v;
                evals += 1;
            }
        }
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..9 {
        h *= 0.5;
        let mut extra = V::default();
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            for s in [t, -t] {
                if let Some(v) = node(s) {
                    extra = extra + v;
                    evals += 1;
                }
            }
            k += 2;
        }
        sum = sum + extra;
        let next = sum * h;
        let diff = (next - estimate).magnitude();
        estimate = next;
        if diff <= tol * estimate.magnitude().max(1e-300) {
            return Integral {
                value: estimate,
                error: diff,
                evaluations: evals,
            };
        }
    }
    Integral {
        value: estimate,
        error: f64::NAN,
        evaluations: evals,
    }
}

/// Samples of `f` at `m` equispaced points of the circle |s − center| = r,
/// returned with the unit-circle phases.
pub fn circle_samples<F: Fn(Complex64) -> Complex64>(
    f: F,
    center: Complex64,
    radius: f64,
    m: usize,
) -> Vec<(Complex64, Complex64)> {
    (0..m)
        .map(|k| {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
            (phase, f(center + phase * radius))
        })
        .collect()
}

/// Taylor/Laurent coefficient c_k = (1/2πi)∮ f(s)(s − s₀)^{−k−1} ds from
/// circle samples (trapezoid rule, spectrally accurate).
pub fn cauchy_coefficient(samples: &[(Complex64, Complex64)], radius: f64, k: i32) -> Complex64 {
    let m = samples.len() as f64;
    let sum: Complex64 = samples.iter().map(|(phase, v)| v * phase.powi(-k)).sum();
    sum / m * radius.powi(-k)
}

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::Serialize;

/// Integer 2×2 matrix acting on the upper half plane by Möbius maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    pub const S: Mat2 = Mat2::new(0, -1, 1, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn translation(k: i64) -> Self {
        Mat2::new(1, k, 0, 1)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        debug_assert_eq!(self.det(), 1);
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Reduce z to the standard domain |Re z| ≤ ½, |z| ≥ 1. Returns (z₀, g)
/// with z = g·z₀ and g ∈ SL₂(ℤ).
pub fn reduce(z: Complex64) -> (Complex64, Mat2) {
    // m maps z to the current point: w = m·z
    let mut m = Mat2::IDENTITY;
    let mut w = z;
    for _ in 0..10_000 {
        let k = (w.re + 0.5).floor() as i64;
        if k != 0 {
            w -= k as f64;
            m = Mat2::translation(-k) * m;
        }
        if w.norm_sqr() < 1.0 - 1e-15 {
            w = -1.0 / w;
            m = Mat2::S * m;
        } else {
            break;
        }
    }
    (w, m.inverse())
}

//! Summation with selectable accumulation: plain, Neumaier-compensated, or
//! double-word (error-free two-sum on a hi/lo pair).

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccumulatorMode {
    #[default]
    Standard,
    Compensated,
    DoubleWord,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[derive(Clone, Copy, Debug)]
pub struct Accumulator {
    mode: AccumulatorMode,
    hi: f64,
    lo: f64,
}

impl Accumulator {
    pub fn new(mode: AccumulatorMode) -> Self {
        Accumulator { mode, hi: 0.0, lo: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        match self.mode {
            AccumulatorMode::Standard => self.hi += x,
            AccumulatorMode::Compensated => {
                let t = self.hi + x;
                if self.hi.abs() >= x.abs() {
                    self.lo += (self.hi - t) + x;
                } else {
                    self.lo += (x - t) + self.hi;
                }
                self.hi = t;
            }
            AccumulatorMode::DoubleWord => {
                let (s, e) = two_sum(self.hi, x);
                let (h, l) = two_sum(s, e + self.lo);
                self.hi = h;
                self.lo = l;
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Sum an iterator with the given mode.
pub fn sum_with<I: IntoIterator<Item = f64>>(mode: AccumulatorMode, xs: I) -> f64 {
    let mut acc = Accumulator::new(mode);
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

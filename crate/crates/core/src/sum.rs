//! Compensated (Neumaier) accumulators for real and complex sums.

use num_complex::Complex64;
use std::iter::Sum;
use std::ops::AddAssign;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for Accumulator {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for Accumulator {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        iter.for_each(|v| acc.add(v));
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().sum::<Accumulator>().value()
}

/// Componentwise compensated complex sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexAccumulator {
    re: Accumulator,
    im: Accumulator,
}

impl ComplexAccumulator {
    pub const fn new() -> Self {
        Self { re: Accumulator::new(), im: Accumulator::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexAccumulator {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(values), 2.0);
        assert_eq!(values.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn many_tenths() {
        let s = compensated_sum(std::iter::repeat_n(0.1, 1_000_000));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn complex_components_independent() {
        let mut acc = ComplexAccumulator::new();
        acc += Complex64::new(1.0, 1e100);
        acc += Complex64::new(1e100, 1.0);
        acc += Complex64::new(-1e100, -1e100);
        assert_eq!(acc.value(), Complex64::new(1.0, 1.0));
    }
}

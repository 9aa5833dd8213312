//! Deterministic floating-point reduction helpers.
//!
//! Family sweeps produce one value per item in a fixed order; aggregation is
//! Kahan-compensated within an item and pairwise across items, so results do
//! not depend on how the items were scheduled across workers.

use crate::scalar::Real;

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T: Real> {
    sum: T,
    compensation: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), compensation: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = T>>(iter: I) -> T {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Pairwise sum of a slice, evaluation tree fixed by the slice order.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancellation() {
        // 1 + 1e-16 repeated: naive f64 sum stays at 1.
        let mut acc = KahanSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }

    #[test]
    fn pairwise_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=1025).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), (1025.0 * 1026.0) / 2.0);
    }

    #[test]
    fn pairwise_is_order_deterministic() {
        let xs: Vec<f64> = (0..997).map(|i| ((i * 2654435761u64 as usize) % 1000) as f64 * 1e-7).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

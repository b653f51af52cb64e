//! Adaptive truncation of bi-infinite sums with Gaussian-decaying terms.

use num_complex::Complex64;

/// Stop once the newest pair of terms falls below this fraction of the
/// accumulated absolute sum.
pub const RELATIVE_CUTOFF: f64 = 1e-14;

/// Largest distance from the summation centre that is ever included.
pub const MAX_EXTENT: i64 = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Estimated magnitude of everything left out (geometric bound on the
    /// decay of the last included terms).
    pub tail_bound: f64,
    /// Terms `center - extent ..= center + extent` were summed.
    pub extent: i64,
    /// True when [`MAX_EXTENT`] stopped the sum before the cutoff did.
    pub cap_reached: bool,
}

impl<T> SeriesValue<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SeriesValue<U> {
        SeriesValue {
            value: f(self.value),
            tail_bound: self.tail_bound,
            extent: self.extent,
            cap_reached: self.cap_reached,
        }
    }
}

/// Sums `term(n)` over all integers, walking outward from `center` in
/// symmetric pairs. Term magnitudes must be unimodal about `center`.
pub fn sum_outward(center: i64, mut term: impl FnMut(i64) -> Complex64) -> SeriesValue<Complex64> {
    let first = term(center);
    let mut sum = first;
    let mut abs_sum = first.norm();
    let mut prev_pair = abs_sum;
    let mut k = 0;
    let mut last_pair = abs_sum;
    let mut cap_reached = true;
    while k < MAX_EXTENT {
        k += 1;
        let a = term(center + k);
        let b = term(center - k);
        sum += a + b;
        let pair = a.norm() + b.norm();
        abs_sum += pair;
        prev_pair = last_pair;
        last_pair = pair;
        if pair <= RELATIVE_CUTOFF * abs_sum {
            cap_reached = false;
            break;
        }
    }
    let ratio = if prev_pair > 0.0 {
        last_pair / prev_pair
    } else {
        0.0
    };
    let tail_bound = if ratio < 1.0 {
        last_pair * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    SeriesValue {
        value: sum,
        tail_bound,
        extent: k,
        cap_reached,
    }
}

/// Real-valued convenience wrapper around [`sum_outward`].
pub fn sum_outward_real(center: i64, mut term: impl FnMut(i64) -> f64) -> SeriesValue<f64> {
    sum_outward(center, |n| Complex64::new(term(n), 0.0)).map(|z| z.re)
}

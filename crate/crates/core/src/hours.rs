//! Clock-hour and within-cycle index arithmetic.

use crate::HOURS;

/// Clock hour of within-cycle index `k` for a reset at `reset_hour`.
pub fn clock_hour(reset_hour: usize, k: usize) -> usize {
    (reset_hour + k) % HOURS
}

/// Reorders a clock-hour profile so that index 0 is `reset_hour`:
/// `out[k] = profile[(reset_hour + k) mod 24]`.
pub fn rotate<T: Copy>(profile: &[T; HOURS], reset_hour: usize) -> [T; HOURS] {
    std::array::from_fn(|k| profile[clock_hour(reset_hour, k)])
}

/// Inverse of [`rotate`]: maps a within-cycle sequence back to clock hours.
pub fn unrotate<T: Copy>(within: &[T; HOURS], reset_hour: usize) -> [T; HOURS] {
    rotate(within, (HOURS - reset_hour % HOURS) % HOURS)
}

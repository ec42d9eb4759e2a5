//! Regret minimizers composed by the ICFR dynamics.

mod external;
mod internal;
mod stationary;

pub use external::ExternalRM;
pub use internal::InternalRM;
pub use stationary::{
    residual, stationary_distribution, StationaryError, POWER_ITERATION_CAP, STATIONARY_ACCEPT, STATIONARY_TARGET,
};

/// Inverse-CDF sampling over action index order; `u` is uniform in [0, 1).
pub fn sample_index(dist: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (a, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    // Rounding left the cumulative sum below `u`: take the last action with
    // positive mass.
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(dist.len() - 1)
}

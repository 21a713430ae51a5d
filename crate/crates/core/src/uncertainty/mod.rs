//! The ratio-to-decimal map `D_N`, its derivatives, and the intervals and
//! moment formulas built on it.
//!
//! For a top pair `(k, k+1)` with frequency ratio `r = q(k) / q(k+1)` the
//! decimal part of `t` is
//!
//! ```text
//! D_N(r) = (N/π) atan( sin(π/N) / (cos(π/N) + √r) )
//! ```
//!
//! which is exact on the true distribution and depends on `N` and `r` only.

mod moments;
pub mod special;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::AdjacentPair;
use crate::numeric::{cos_pi, sin_pi};

pub use moments::{ratio_moments, rbe_moments, MomentForm, MomentReport, RbeMoments};
pub use special::{beta_quantile, normal_quantile};

fn check_ratio(dim: usize, r: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ratio must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

/// `D_N(r)`, strictly decreasing from 1 to 0 over `r ∈ (0, ∞)`.
pub fn d_n(dim: usize, r: f64) -> Result<f64> {
    check_ratio(dim, r)?;
    let n = dim as f64;
    let step = 1.0 / n;
    Ok(n / PI * (sin_pi(step) / (cos_pi(step) + r.sqrt())).atan())
}

// With u = √r: dD/dr = -(N/π) sin(π/N) / (2u (u² + 2u cos(π/N) + 1)).
fn slope_denominator(u: f64, cos_step: f64) -> f64 {
    2.0 * u * (u * u + 2.0 * cos_step * u + 1.0)
}

/// `dD_N/dr`; negative for every `r > 0`.
pub fn d_n_prime(dim: usize, r: f64) -> Result<f64> {
    check_ratio(dim, r)?;
    let n = dim as f64;
    let step = 1.0 / n;
    let u = r.sqrt();
    Ok(-(n / PI) * sin_pi(step) / slope_denominator(u, cos_pi(step)))
}

/// `d²D_N/dr²`.
pub fn d_n_second(dim: usize, r: f64) -> Result<f64> {
    check_ratio(dim, r)?;
    let n = dim as f64;
    let step = 1.0 / n;
    let c = cos_pi(step);
    let u = r.sqrt();
    let h = slope_denominator(u, c);
    let dh = 6.0 * u * u + 8.0 * c * u + 2.0;
    Ok((n / PI) * sin_pi(step) * dh / (h * h) / (2.0 * u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    ConfidenceDelta,
    CredibleBeta,
}

/// An interval for `t` on the unwrapped scale `[k_lo, k_lo + 1]`; for the
/// wrapped pair `(N-1, 0)` the upper end may therefore reach `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// `1 - α`.
    pub level: f64,
    pub kind: IntervalKind,
    /// Set when either endpoint was pulled back into `[k_lo, k_lo + 1]`.
    pub clamped: bool,
}

impl Interval {
    fn clamped_to_pair(lo: f64, hi: f64, k_lo: usize, level: f64, kind: IntervalKind) -> Self {
        let floor = k_lo as f64;
        let ceil = floor + 1.0;
        let (clo, chi) = (lo.clamp(floor, ceil), hi.clamp(floor, ceil));
        Self {
            lo: clo,
            hi: chi,
            level,
            kind,
            clamped: clo != lo || chi != hi,
        }
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    Ok(())
}

/// Delta-method `100(1-α)%` confidence interval around the ratio-based
/// estimate, with plug-in frequencies.
///
/// The radius is `z_{α/2} |D'_N(r)| σ / √L` with `σ = (1 + r) √(r / s)`,
/// i.e. the square root of the ratio-estimator variance
/// `(1/L) r² (1/q_k + 1/q_{k+1})`.
pub fn delta_ci(pair: &AdjacentPair, shots: f64, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    if shots.is_nan() || shots <= 0.0 {
        return Err(Error::NoShots);
    }
    let z = -normal_quantile(alpha / 2.0)?;
    let center = pair.k_lo as f64 + d_n(pair.dim, pair.r)?;
    let sigma = (1.0 + pair.r) * (pair.r / pair.s).sqrt();
    let radius = z * d_n_prime(pair.dim, pair.r)?.abs() * sigma / shots.sqrt();
    Ok(Interval::clamped_to_pair(
        center - radius,
        center + radius,
        pair.k_lo,
        1.0 - alpha,
        IntervalKind::ConfidenceDelta,
    ))
}

/// Equal-tailed credible interval from the `Beta(√count_hi, √count_lo)`
/// posterior on the decimal part, shifted by `k_lo`.
pub fn beta_credible(count_lo: f64, count_hi: f64, k_lo: usize, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    if !(count_lo > 0.0 && count_hi > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "credible interval needs positive counts on both sides, got ({count_lo}, {count_hi})"
        )));
    }
    let (a, b) = (count_hi.sqrt(), count_lo.sqrt());
    let lo = beta_quantile(alpha / 2.0, a, b)?;
    let hi = beta_quantile(1.0 - alpha / 2.0, a, b)?;
    let floor = k_lo as f64;
    Ok(Interval::clamped_to_pair(
        floor + lo,
        floor + hi,
        k_lo,
        1.0 - alpha,
        IntervalKind::CredibleBeta,
    ))
}

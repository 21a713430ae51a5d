//! Maximum-likelihood estimation of `t` over the continuous range `(0, N)`.
//!
//! The log-likelihood
//!
//! ```text
//! ℓ(t) = Σ q(k) [2 ln|sin tπ| - 2 ln N - 2 ln|sin((t-k)π/N)|]
//! ```
//!
//! is undefined at integers and smooth on every open unit interval
//! `(m, m+1)`. Each interval is scanned on a uniform grid, the best grid point
//! is refined by golden-section search, and the result is polished by
//! bisection on the score equation
//! `cot(tπ) = (1/N) Σ q(k) cot((t-k)π/N)` when the refined bracket contains a
//! sign change.
//!
//! On the grid `ln|sin((t-k)π/N)|` only depends on `(m - k) mod N` and the grid
//! offset, so a table of `N × G` logarithms serves the whole scan.

use serde::{Deserialize, Serialize};

use super::{log_likelihood, top_adjacent_pair, Diagnostics, EstimateReport, Frequencies, Method};
use crate::error::{Error, Result};
use crate::numeric::{cot_pi, sin_pi};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const POLISH_WIDEN: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchScope {
    /// Every interval `(m, m+1)`, `m = 0..N`.
    Full,
    /// The intervals touching the top adjacent pair, `k_lo - 1 ..= k_lo + 1`
    /// cyclically. Falls back to `Full` when no pair can be resolved.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleConfig {
    /// Grid points per unit interval.
    pub grid: usize,
    /// Final bracket width of the golden-section stage.
    pub tolerance: f64,
    pub scope: SearchScope,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            tolerance: 1e-10,
            scope: SearchScope::Full,
        }
    }
}

struct Objective<'a> {
    dim: usize,
    q: &'a [f64],
    support: Vec<usize>,
    mass: f64,
}

impl Objective<'_> {
    fn value(&self, t: f64) -> f64 {
        let n = self.dim as f64;
        let shared = 2.0 * sin_pi(t).abs().ln() - 2.0 * n.ln();
        let mut acc = self.mass * shared;
        for &k in &self.support {
            acc -= 2.0 * self.q[k] * sin_pi((t - k as f64) / n).abs().ln();
        }
        acc
    }

    /// Positive where `ℓ` increases.
    fn score(&self, t: f64) -> f64 {
        let n = self.dim as f64;
        let mut acc = self.mass * cot_pi(t);
        for &k in &self.support {
            acc -= self.q[k] * cot_pi((t - k as f64) / n) / n;
        }
        acc
    }
}

fn intervals(freq: &Frequencies, scope: SearchScope) -> Vec<usize> {
    let dim = freq.dim();
    match (scope, top_adjacent_pair(freq)) {
        (SearchScope::Local, Ok(pair)) => {
            let mut ms: Vec<usize> = [dim - 1, 0, 1].iter().map(|d| (pair.k_lo + d) % dim).collect();
            ms.sort_unstable();
            ms.dedup();
            ms
        }
        _ => (0..dim).collect(),
    }
}

/// Returns the grid maximiser as `(m, i)`; ties keep the smallest `t`.
fn grid_search(obj: &Objective<'_>, ms: &[usize], grid: usize) -> (usize, usize) {
    let dim = obj.dim;
    let n = dim as f64;
    let offsets: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
    let shared: Vec<f64> = offsets
        .iter()
        .map(|&f| obj.mass * (2.0 * sin_pi(f).abs().ln() - 2.0 * n.ln()))
        .collect();
    let mut table = vec![0.0; dim * grid];
    for j in 0..dim {
        for (i, &f) in offsets.iter().enumerate() {
            table[j * grid + i] = sin_pi((j as f64 + f) / n).abs().ln();
        }
    }

    let mut best = (ms[0], 0);
    let mut best_value = f64::NEG_INFINITY;
    let mut row = vec![0.0; grid];
    for &m in ms {
        row.copy_from_slice(&shared);
        for &k in &obj.support {
            let j = (m + dim - k) % dim;
            let w = 2.0 * obj.q[k];
            for (r, &ln_sin) in row.iter_mut().zip(&table[j * grid..(j + 1) * grid]) {
                *r -= w * ln_sin;
            }
        }
        for (i, &v) in row.iter().enumerate() {
            if v > best_value {
                best_value = v;
                best = (m, i);
            }
        }
    }
    best
}

fn golden_section(obj: &Objective<'_>, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (obj.value(c), obj.value(d));
    let mut iterations = 0;
    while b - a > tol && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = obj.value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = obj.value(d);
        }
        iterations += 1;
    }
    (a, b, iterations)
}

/// Bisection on the score over `[a, b]`, if it changes sign from `+` to `-`.
fn polish(obj: &Objective<'_>, a: f64, b: f64) -> Option<(f64, usize)> {
    let (mut a, mut b) = (a, b);
    if !(obj.score(a) > 0.0 && obj.score(b) < 0.0) {
        return None;
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if obj.score(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    Some((0.5 * (a + b), iterations))
}

/// Maximum-likelihood estimate of `t`.
///
/// When the observed frequencies sit on a single outcome `k` the likelihood
/// has no interior maximum; the search then returns a point within
/// `tolerance` of `k` on the side of the lower interval.
pub fn mle(freq: &Frequencies, config: &MleConfig) -> Result<EstimateReport> {
    if config.grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid must have at least 2 points, got {}",
            config.grid
        )));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            config.tolerance
        )));
    }
    let q = freq.q();
    let support: Vec<usize> = (0..q.len()).filter(|&k| q[k] > 0.0).collect();
    let obj = Objective {
        dim: freq.dim(),
        q,
        mass: support.iter().map(|&k| q[k]).sum(),
        support,
    };

    let ms = intervals(freq, config.scope);
    let (m, i) = grid_search(&obj, &ms, config.grid);
    let step = 1.0 / config.grid as f64;
    let floor = m as f64;
    let centre = floor + (i as f64 + 0.5) * step;
    let lo = (centre - step).max(floor);
    let hi = (centre + step).min(floor + 1.0);
    let (a, b, mut iterations) = golden_section(&obj, lo, hi, config.tolerance);

    let mut t_hat = 0.5 * (a + b);
    let pa = (a - POLISH_WIDEN).max(lo.max(floor + f64::EPSILON * floor.max(1.0)));
    let pb = (b + POLISH_WIDEN).min(hi.min(floor + 1.0 - f64::EPSILON * (floor + 1.0)));
    if let Some((root, extra)) = polish(&obj, pa, pb) {
        if obj.value(root) >= obj.value(t_hat) - 1e-14 {
            t_hat = root;
        }
        iterations += extra;
    }
    if t_hat <= floor || t_hat >= floor + 1.0 {
        // Only reachable for degenerate data; keep strictly inside.
        t_hat = t_hat.clamp(floor + config.tolerance, floor + 1.0 - config.tolerance);
    }

    Ok(EstimateReport {
        method: Method::Mle,
        t_hat,
        interval: None,
        diagnostics: Diagnostics {
            pair: top_adjacent_pair(freq).ok(),
            shots: freq.shots(),
            iterations: Some(iterations),
            log_likelihood: Some(log_likelihood(freq, t_hat)?),
            mle_residual: Some(obj.score(t_hat) / obj.mass),
            ..Diagnostics::default()
        },
    })
}

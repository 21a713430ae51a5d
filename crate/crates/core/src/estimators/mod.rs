//! Estimators of the encoded value `t` from observed outcome frequencies.
//!
//! All estimators read a [`Frequencies`] view: the normalised proportions
//! `q(k)` together with the (possibly fractional) shot count they stand for.
//! Real measurement data enters through [`CountsHistogram::frequencies`];
//! [`Frequencies::exact`] feeds the true distribution in as if it had been
//! observed, which is how the closed forms are checked for exactness.
//!
//! Every estimator except maximum likelihood anchors on the top adjacent pair
//! `(k_lo, k_lo + 1 mod N)` returned by [`top_adjacent_pair`].

mod mle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cos_pi, is_integer, parity_sign};
use crate::sampler::CountsHistogram;
use crate::sinc::{FejerModel, FejerPmf, MAX_QUBITS};
use crate::uncertainty::{beta_credible, d_n, delta_ci, Interval};

pub use mle::{mle, MleConfig, SearchScope};

/// Normalised outcome proportions `q(k)` and the number of shots `L` behind
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    n: u32,
    shots: f64,
    q: Vec<f64>,
}

impl From<&CountsHistogram> for Frequencies {
    fn from(h: &CountsHistogram) -> Self {
        Self {
            n: h.n(),
            shots: h.shots() as f64,
            q: h.normalized(),
        }
    }
}

impl Frequencies {
    /// Normalises nonnegative `weights` to proportions.
    pub fn from_weights(n: u32, weights: &[f64], shots: f64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        let dim = 1usize << n;
        if weights.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        if !(shots > 0.0 && shots.is_finite()) {
            return Err(Error::NoShots);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::NoShots);
        }
        Ok(Self {
            n,
            shots,
            q: weights.iter().map(|w| w / total).collect(),
        })
    }

    /// The true distribution observed "perfectly" over `shots` shots.
    pub fn exact(pmf: &FejerPmf, shots: f64) -> Result<Self> {
        Self::from_weights(pmf.model.n(), &pmf.probs, shots)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn shots(&self) -> f64 {
        self.shots
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Count-scale value `q(k) L` (integral for measured histograms).
    pub fn count(&self, k: usize) -> f64 {
        self.q[k] * self.shots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Mle,
    Rbe,
    Coin,
    Interp,
    Identity,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Mle, Method::Rbe, Method::Coin, Method::Interp, Method::Identity];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Rbe => "RBE",
            Method::Coin => "COIN",
            Method::Interp => "INTERP",
            Method::Identity => "IDENTITY",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MLE" => Ok(Method::Mle),
            "RBE" => Ok(Method::Rbe),
            "COIN" => Ok(Method::Coin),
            "INTERP" => Ok(Method::Interp),
            "IDENTITY" => Ok(Method::Identity),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Cyclically adjacent outcomes `(k_lo, k_hi = k_lo + 1 mod N)` carrying the
/// two largest frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacentPair {
    pub dim: usize,
    pub k_lo: usize,
    pub k_hi: usize,
    /// True for the pair `(N-1, 0)`.
    pub wrapped: bool,
    /// `q(k_lo) / q(k_hi)`.
    pub r: f64,
    /// `q(k_lo) + q(k_hi)`.
    pub s: f64,
}

/// Locates the floor/ceiling pair of `t`.
///
/// The argmax (smallest index on ties) is paired with whichever cyclic
/// neighbour has the larger frequency; equal neighbours resolve to the right
/// one.
pub fn top_adjacent_pair(freq: &Frequencies) -> Result<AdjacentPair> {
    let q = freq.q();
    let dim = q.len();
    let mut argmax = 0;
    for (k, &v) in q.iter().enumerate() {
        if v > q[argmax] {
            argmax = k;
        }
    }
    let left = (argmax + dim - 1) % dim;
    let right = (argmax + 1) % dim;
    if q[left] <= 0.0 && q[right] <= 0.0 {
        return Err(Error::PairUnresolved { argmax });
    }
    let (k_lo, k_hi) = if q[right] >= q[left] {
        (argmax, right)
    } else {
        (left, argmax)
    };
    Ok(AdjacentPair {
        dim,
        k_lo,
        k_hi,
        wrapped: k_lo == dim - 1,
        r: q[k_lo] / q[k_hi],
        s: q[k_lo] + q[k_hi],
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub pair: Option<AdjacentPair>,
    pub shots: f64,
    pub iterations: Option<usize>,
    /// Log-likelihood at the optimum (MLE only).
    pub log_likelihood: Option<f64>,
    /// Score-equation residual `cot(t̂π) - (1/N) Σ q(k) cot((t̂-k)π/N)`.
    pub mle_residual: Option<f64>,
    /// Reconstructed right-hand side the interpolation-type estimators solve
    /// against.
    pub target: Option<f64>,
    /// The solution was pulled back onto the bracket `[k_lo, k_lo + 1]`.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub t_hat: f64,
    pub interval: Option<Interval>,
    pub diagnostics: Diagnostics,
}

fn wrap(t: f64, dim: usize) -> f64 {
    let t = t.rem_euclid(dim as f64);
    // rem_euclid can round up to dim itself.
    if t >= dim as f64 {
        0.0
    } else {
        t
    }
}

fn pair_report(method: Method, freq: &Frequencies, pair: AdjacentPair, decimal: f64) -> EstimateReport {
    EstimateReport {
        method,
        t_hat: wrap(pair.k_lo as f64 + decimal, pair.dim),
        interval: None,
        diagnostics: Diagnostics {
            pair: Some(pair),
            shots: freq.shots(),
            ..Diagnostics::default()
        },
    }
}

/// Ratio-based estimate `t̂ = k_lo + D_N(q(k_lo) / q(k_hi))`.
///
/// Exact on the true distribution, including the wrapped pair `(N-1, 0)`.
pub fn rbe(freq: &Frequencies) -> Result<EstimateReport> {
    let pair = top_adjacent_pair(freq)?;
    let decimal = d_n(pair.dim, pair.r)?;
    Ok(pair_report(Method::Rbe, freq, pair, decimal))
}

/// Coin approximation: the decimal part is the posterior mean of a
/// `Beta(√count(k_hi), √count(k_lo))` bias.
pub fn coin_estimate(freq: &Frequencies) -> Result<EstimateReport> {
    let pair = top_adjacent_pair(freq)?;
    let heads = freq.count(pair.k_hi).sqrt();
    let tails = freq.count(pair.k_lo).sqrt();
    Ok(pair_report(Method::Coin, freq, pair, heads / (heads + tails)))
}

/// Where the left-hand side of the interpolation equation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolationArgument {
    /// Solve `f(t̂/N) = S`. With the exact amplitudes
    /// `Σ_k f(k/N) c(k)` reproduces `f` at `t/N` (for `f = cos(xπ)` to
    /// rounding), so this form is exact on the true distribution.
    #[default]
    Scaled,
    /// Solve `f(t̂) = S`, evaluating `f` on the unscaled value.
    Literal,
}

/// Node function for [`interpolation_estimate`].
#[derive(Clone, Copy)]
pub struct InterpolationFn {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub argument: InterpolationArgument,
}

impl InterpolationFn {
    /// `x ↦ cos(xπ)`.
    pub fn cos_pi() -> Self {
        Self {
            name: "cos_pi",
            f: cos_pi,
            argument: InterpolationArgument::Scaled,
        }
    }

    pub fn with_argument(self, argument: InterpolationArgument) -> Self {
        Self { argument, ..self }
    }
}

impl Default for InterpolationFn {
    fn default() -> Self {
        Self::cos_pi()
    }
}

impl fmt::Debug for InterpolationFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InterpolationFn")
            .field("name", &self.name)
            .field("argument", &self.argument)
            .finish()
    }
}

/// Signed amplitudes recovered from frequencies with `⌊t⌋ = k_lo`.
fn signed_amplitudes(freq: &Frequencies, k_lo: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
    freq.q().iter().enumerate().map(move |(k, &q)| {
        let gap = k_lo as i64 - k as i64;
        let sgn = if gap < 0 { -1.0 } else { 1.0 };
        (k, parity_sign(gap) * sgn * q.sqrt())
    })
}

const MONOTONE_PROBES: usize = 64;

/// Interpolation-based estimate: computes `S = Σ_k f(k/N) ĉ(k)` and solves
/// `f(t̂/N) = S` (or `f(t̂) = S`, see [`InterpolationArgument`]) on
/// `[k_lo, k_lo + 1]` by bisection.
pub fn interpolation_estimate(freq: &Frequencies, func: &InterpolationFn) -> Result<EstimateReport> {
    let pair = top_adjacent_pair(freq)?;
    let dim = freq.dim() as f64;
    let f = func.f;
    let target: f64 = signed_amplitudes(freq, pair.k_lo)
        .map(|(k, c)| f(k as f64 / dim) * c)
        .sum();
    let scale = match func.argument {
        InterpolationArgument::Scaled => 1.0 / dim,
        InterpolationArgument::Literal => 1.0,
    };
    let f = |x: f64| (func.f)(x * scale);

    let (lo, hi) = (pair.k_lo as f64, pair.k_lo as f64 + 1.0);
    let probes: Vec<f64> = (0..=MONOTONE_PROBES)
        .map(|i| f(lo + i as f64 / MONOTONE_PROBES as f64))
        .collect();
    let increasing = probes.windows(2).all(|w| w[1] > w[0]);
    let decreasing = probes.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::UnsupportedFunction { lo, hi });
    }

    let residual = |x: f64| {
        let v = f(x) - target;
        if increasing {
            v
        } else {
            -v
        }
    };
    let mut report = pair_report(Method::Interp, freq, pair, 0.0);
    report.diagnostics.target = Some(target);
    let (t_hat, iterations, clamped) = if residual(lo) >= 0.0 {
        (lo, 0, residual(lo) > 0.0)
    } else if residual(hi) <= 0.0 {
        (hi, 0, residual(hi) < 0.0)
    } else {
        let (mut a, mut b) = (lo, hi);
        let mut iterations = 0;
        while b - a > 1e-12 {
            let mid = 0.5 * (a + b);
            if residual(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
            iterations += 1;
        }
        (0.5 * (a + b), iterations, false)
    };
    report.t_hat = wrap(t_hat, pair.dim);
    report.diagnostics.iterations = Some(iterations);
    report.diagnostics.clamped = clamped;
    Ok(report)
}

/// Estimate from the exact alternating node sums of the state,
///
/// ```text
/// Σ (-1)^k cos(kπ/N) c(k) =  cos(t (N-1)π/N)
/// Σ (-1)^k sin(kπ/N) c(k) = -sin(t (N-1)π/N)
/// ```
///
/// with `c(k)` rebuilt from `√q(k)` and the sign pattern fixed by `k_lo`. The
/// two sums pin the angle `t (N-1)π/N` modulo `2π`; the bracket
/// `[k_lo, k_lo + 1]` spans less than `π` of it, so at most one branch lands
/// inside.
pub fn identity_estimate(freq: &Frequencies) -> Result<EstimateReport> {
    let pair = top_adjacent_pair(freq)?;
    let dim = freq.dim() as f64;
    let (mut cos_sum, mut sin_sum) = (0.0, 0.0);
    for (k, c) in signed_amplitudes(freq, pair.k_lo) {
        let alt = parity_sign(k as i64) * c;
        let node = k as f64 / dim;
        cos_sum += alt * cos_pi(node);
        sin_sum += alt * crate::numeric::sin_pi(node);
    }
    // Angle in units of π, in (-1, 1].
    let phase = (-sin_sum).atan2(cos_sum) / std::f64::consts::PI;
    let rate = (dim - 1.0) / dim;
    let lo = pair.k_lo as f64;
    let branch = ((lo * rate - phase) / 2.0).ceil();
    let candidate = (phase + 2.0 * branch) / rate;

    let mut report = pair_report(Method::Identity, freq, pair, 0.0);
    report.diagnostics.target = Some(cos_sum);
    let t_hat = if candidate <= lo + 1.0 {
        candidate
    } else {
        // Pick the bracket end whose angle is closer to the measured one.
        let angular = |x: f64| {
            let d = (x * rate - phase).rem_euclid(2.0);
            d.min(2.0 - d)
        };
        report.diagnostics.clamped = true;
        if angular(lo) <= angular(lo + 1.0) {
            lo
        } else {
            lo + 1.0
        }
    };
    report.t_hat = wrap(t_hat, pair.dim);
    Ok(report)
}

fn require_non_integer(t: f64) -> Result<()> {
    if is_integer(t) {
        return Err(Error::IntegerValue(t));
    }
    Ok(())
}

/// `Σ_k q(k) log p_{N,t}(k)`, skipping outcomes with `q(k) = 0`.
pub fn log_likelihood(freq: &Frequencies, t: f64) -> Result<f64> {
    require_non_integer(t)?;
    let model = FejerModel::new(freq.n(), t)?;
    Ok(freq
        .q()
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > 0.0)
        .map(|(k, &q)| q * model.log_pmf_unchecked(k))
        .sum())
}

/// `D_KL(q ‖ p_{N,t})` with the `0 log 0 = 0` convention.
pub fn kl_divergence(q: &[f64], model: &FejerModel) -> Result<f64> {
    require_non_integer(model.t())?;
    if q.len() != model.dim() {
        return Err(Error::InvalidArgument(format!(
            "expected {} proportions, got {}",
            model.dim(),
            q.len()
        )));
    }
    Ok(q.iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, &v)| v * (v.ln() - model.log_pmf_unchecked(k)))
        .sum())
}

/// Shared settings for [`estimate`].
#[derive(Debug, Clone, Default)]
pub struct EstimatorConfig {
    pub mle: MleConfig,
    pub interpolation: InterpolationFn,
    /// When set, attach a delta-method interval to RBE and a Beta credible
    /// interval to COIN at level `1 - alpha`.
    pub alpha: Option<f64>,
}

/// Runs one estimator and, if configured, attaches its interval.
pub fn estimate(freq: &Frequencies, method: Method, config: &EstimatorConfig) -> Result<EstimateReport> {
    let mut report = match method {
        Method::Mle => mle(freq, &config.mle)?,
        Method::Rbe => rbe(freq)?,
        Method::Coin => coin_estimate(freq)?,
        Method::Interp => interpolation_estimate(freq, &config.interpolation)?,
        Method::Identity => identity_estimate(freq)?,
    };
    if let (Some(alpha), Some(pair)) = (config.alpha, report.diagnostics.pair) {
        report.interval = match method {
            Method::Rbe => Some(delta_ci(&pair, freq.shots(), alpha)?),
            Method::Coin => Some(beta_credible(
                freq.count(pair.k_lo),
                freq.count(pair.k_hi),
                pair.k_lo,
                alpha,
            )?),
            _ => None,
        };
    }
    Ok(report)
}

//! Seeded shot generation from an outcome distribution.
//!
//! Every shot consumes exactly one `u64` from a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. The top 53 bits become a uniform
//! `u ∈ [0, 1)` and the outcome is the first index whose cumulative
//! probability exceeds `u` (inverse CDF, binary search). The same
//! `(distribution, shots, seed)` therefore gives the same outcomes on every
//! platform. Independent batches use [`derive_seed`].

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Frequencies;
use crate::sinc::{FejerPmf, MAX_QUBITS};

/// Seed for the `index`-th independent batch derived from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

/// Outcome probabilities over `{0, …, N-1}`, possibly passed through the
/// readout-noise channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDistribution {
    pub n: u32,
    pub t: f64,
    pub noise: f64,
    pub probs: Vec<f64>,
}

impl From<&FejerPmf> for MeasurementDistribution {
    fn from(pmf: &FejerPmf) -> Self {
        Self {
            n: pmf.model.n(),
            t: pmf.model.t(),
            noise: 0.0,
            probs: pmf.probs.clone(),
        }
    }
}

impl MeasurementDistribution {
    pub fn dim(&self) -> usize {
        self.probs.len()
    }
}

/// Mixes the distribution with the uniform one: `(1 - ε) p(k) + ε / N`.
pub fn apply_readout_noise(pmf: &FejerPmf, noise: f64) -> Result<MeasurementDistribution> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::NoiseOutOfRange(noise));
    }
    let uniform = noise / pmf.dim() as f64;
    let probs = pmf.probs.iter().map(|&p| (1.0 - noise) * p + uniform).collect();
    Ok(MeasurementDistribution {
        n: pmf.model.n(),
        t: pmf.model.t(),
        noise,
        probs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDescriptor {
    pub t: f64,
    pub noise: f64,
    pub seed: u64,
}

/// Ordered per-shot outcomes (the measurement memory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub n: u32,
    pub outcomes: Vec<usize>,
    /// Present when the record was simulated rather than ingested.
    pub descriptor: Option<SampleDescriptor>,
}

fn uniform_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `shots` i.i.d. outcomes.
pub fn sample_shots(dist: &MeasurementDistribution, shots: usize, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let mut cumulative = Vec::with_capacity(dist.dim());
    let mut acc = 0.0;
    for &p in &dist.probs {
        acc += p;
        cumulative.push(acc);
    }
    let last_support = dist
        .probs
        .iter()
        .rposition(|&p| p > 0.0)
        .ok_or_else(|| Error::InvalidArgument("distribution has no support".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..shots)
        .map(|_| {
            let u = uniform_from_bits(rng.next_u64());
            let k = cumulative.partition_point(|&c| c <= u);
            k.min(last_support)
        })
        .collect();
    Ok(ShotRecord {
        n: dist.n,
        outcomes,
        descriptor: Some(SampleDescriptor {
            t: dist.t,
            noise: dist.noise,
            seed,
        }),
    })
}

/// Result of cutting a record into equal rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSplit {
    pub rounds: Vec<CountsHistogram>,
    /// Trailing shots that did not fill a round.
    pub dropped: usize,
}

impl ShotRecord {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn to_counts(&self) -> Result<CountsHistogram> {
        CountsHistogram::from_outcomes(self.n, &self.outcomes)
    }

    /// Tallies consecutive disjoint windows of `round_size` shots. A trailing
    /// partial window is dropped and logged.
    pub fn split_rounds(&self, round_size: usize) -> Result<RoundSplit> {
        if round_size == 0 {
            return Err(Error::InvalidRoundSize);
        }
        let chunks = self.outcomes.chunks_exact(round_size);
        let dropped = chunks.remainder().len();
        if dropped > 0 {
            log::warn!("dropping {dropped} trailing shots that do not fill a round of {round_size}");
        }
        let rounds = chunks
            .map(|chunk| CountsHistogram::from_outcomes(self.n, chunk))
            .collect::<Result<Vec<_>>>()?;
        Ok(RoundSplit { rounds, dropped })
    }
}

/// Outcome tallies for `L ≥ 1` shots over `{0, …, N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsHistogram {
    n: u32,
    counts: Vec<u64>,
}

impl CountsHistogram {
    pub fn new(n: u32, counts: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        let dim = 1usize << n;
        if counts.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} outcome counts, got {}",
                counts.len()
            )));
        }
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::NoShots);
        }
        Ok(Self { n, counts })
    }

    /// Sparse constructor; missing outcomes count zero.
    pub fn from_pairs(n: u32, pairs: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        let dim = 1usize << n;
        let mut counts = vec![0u64; dim];
        for (k, c) in pairs {
            if k >= dim {
                return Err(Error::IndexOutOfRange { index: k, dim });
            }
            counts[k] += c;
        }
        Self::new(n, counts)
    }

    pub fn from_outcomes(n: u32, outcomes: &[usize]) -> Result<Self> {
        Self::from_pairs(n, outcomes.iter().map(|&k| (k, 1)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Normalised view `q(k) = counts[k] / L`.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.shots() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn frequencies(&self) -> Frequencies {
        Frequencies::from(self)
    }

    pub fn merge(&mut self, other: &CountsHistogram) -> Result<()> {
        if other.n != self.n {
            return Err(Error::InvalidArgument(format!(
                "cannot merge histograms over {} and {} qubits",
                self.n, other.n
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }
}

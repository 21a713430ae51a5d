use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sincd::sinc::{check_identities, verify_identities};
use sincd::FejerModel;

use crate::config::VerifyConfig;

pub const THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub n: u32,
    pub samples: usize,
    pub max_residual: f64,
    pub worst_identity: Option<String>,
    pub worst_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyFailure {
    pub n: u32,
    pub t: f64,
    pub identity: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub threshold: f64,
    pub seed: u64,
    pub per_n: Vec<VerifyRow>,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Uniform non-integer draws from `(0, dim)`.
pub fn random_t_values(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(count);
    while values.len() < count {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let t = u * dim as f64;
        if t.fract() != 0.0 {
            values.push(t);
        }
    }
    values
}

/// Runs the identity suite. `perturb` scales the largest probability by
/// `1 + perturb` before checking, as a negative control.
pub fn run_verify(config: &VerifyConfig, perturb: Option<f64>) -> anyhow::Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut per_n = Vec::new();
    let mut failures = Vec::new();
    for &n in &config.n_values {
        let dim = 1usize << n;
        let t_values = match &config.t_values {
            Some(v) => v.clone(),
            None => random_t_values(&mut rng, dim, config.samples),
        };
        let mut row = VerifyRow {
            n,
            samples: t_values.len(),
            max_residual: 0.0,
            worst_identity: None,
            worst_t: None,
        };
        for &t in &t_values {
            let model = FejerModel::new(n, t)?;
            let report = match perturb {
                None => verify_identities(&model)?,
                Some(delta) => {
                    let mut probs = model.pmf().probs;
                    let top = (0..dim).fold(0, |best, k| if probs[k] > probs[best] { k } else { best });
                    probs[top] *= 1.0 + delta;
                    check_identities(&model, &model.amplitude_coeffs(), &probs)?
                }
            };
            for e in &report.entries {
                if e.residual.is_nan() || e.residual > row.max_residual {
                    row.max_residual = e.residual;
                    row.worst_identity = Some(e.name.clone());
                    row.worst_t = Some(t);
                }
            }
            failures.extend(report.failures(THRESHOLD).map(|e| VerifyFailure {
                n,
                t,
                identity: e.name.clone(),
                residual: e.residual,
            }));
        }
        per_n.push(row);
    }
    Ok(VerifyReport {
        threshold: THRESHOLD,
        seed: config.seed,
        per_n,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n_values: Vec<u32>, samples: usize) -> VerifyConfig {
        VerifyConfig {
            n_values,
            samples,
            seed: 5,
            t_values: None,
        }
    }

    #[test]
    fn exact_model_passes() {
        let report = run_verify(&config(vec![1, 3, 5], 20), None).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        assert_eq!(report.per_n.len(), 3);
    }

    #[test]
    fn symmetric_point_passes() {
        let mut c = config(vec![3], 1);
        c.t_values = Some(vec![2.5]);
        assert!(run_verify(&c, None).unwrap().passed());
    }

    #[test]
    fn perturbed_pmf_fails() {
        let report = run_verify(&config(vec![3], 5), Some(1e-3)).unwrap();
        assert!(!report.passed());
    }
}

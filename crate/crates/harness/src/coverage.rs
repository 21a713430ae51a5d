use serde::Serialize;
use sincd::estimators::top_adjacent_pair;
use sincd::sampler::{derive_seed, sample_shots};
use sincd::uncertainty::{beta_credible, delta_ci};
use sincd::{AdjacentPair, FejerModel, Frequencies, Interval};

use crate::config::CoverageConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub t: f64,
    pub shots: u64,
    pub reps: usize,
    pub level: f64,
    pub delta_coverage: f64,
    pub beta_coverage: f64,
    pub delta_mean_radius: f64,
    pub beta_mean_radius: f64,
    /// Repetitions where no adjacent pair could be formed; they count as
    /// misses for both intervals.
    pub unresolved: usize,
}

/// Interval radii evaluated at the expected counts `p(k) L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRow {
    pub t: f64,
    pub shots: u64,
    pub delta_radius: f64,
    pub beta_radius: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub seed: u64,
    pub coverage: Vec<CoverageRow>,
    pub radii: Vec<RadiusRow>,
}

/// `t` on the interval's unwrapped scale `[k_lo, k_lo + 1]`.
fn unwrapped(t: f64, pair: &AdjacentPair) -> f64 {
    if pair.wrapped && t < pair.k_lo as f64 {
        t + pair.dim as f64
    } else {
        t
    }
}

fn intervals(freq: &Frequencies, alpha: f64) -> sincd::Result<(AdjacentPair, Interval, Interval)> {
    let pair = top_adjacent_pair(freq)?;
    let delta = delta_ci(&pair, freq.shots(), alpha)?;
    let beta = beta_credible(freq.count(pair.k_lo), freq.count(pair.k_hi), pair.k_lo, alpha)?;
    Ok((pair, delta, beta))
}

pub fn run_coverage(config: &CoverageConfig) -> anyhow::Result<CoverageReport> {
    let mut coverage = Vec::new();
    for (i, &t) in config.t_values.iter().enumerate() {
        let pmf = FejerModel::new(config.n, t)?.pmf();
        let dist = (&pmf).into();
        let (mut delta_hits, mut beta_hits, mut unresolved) = (0usize, 0usize, 0usize);
        let (mut delta_radius, mut beta_radius) = (0.0, 0.0);
        for j in 0..config.reps {
            let seed = derive_seed(config.seed, (i * config.reps + j) as u64);
            let counts = sample_shots(&dist, config.shots as usize, seed)?.to_counts()?;
            match intervals(&counts.frequencies(), config.alpha) {
                Ok((pair, delta, beta)) => {
                    let target = unwrapped(t, &pair);
                    delta_hits += delta.contains(target) as usize;
                    beta_hits += beta.contains(target) as usize;
                    delta_radius += delta.radius();
                    beta_radius += beta.radius();
                }
                Err(e) => {
                    log::debug!("t={t} rep={j}: {e}");
                    unresolved += 1;
                }
            }
        }
        let reps = config.reps as f64;
        let resolved = (config.reps - unresolved).max(1) as f64;
        coverage.push(CoverageRow {
            t,
            shots: config.shots,
            reps: config.reps,
            level: 1.0 - config.alpha,
            delta_coverage: delta_hits as f64 / reps,
            beta_coverage: beta_hits as f64 / reps,
            delta_mean_radius: delta_radius / resolved,
            beta_mean_radius: beta_radius / resolved,
            unresolved,
        });
    }

    let mut radii = Vec::new();
    for &t in &config.t_values {
        let pmf = FejerModel::new(config.n, t)?.pmf();
        for &shots in &config.radius_shots {
            let freq = Frequencies::exact(&pmf, shots as f64)?;
            let (_, delta, beta) = intervals(&freq, config.alpha)?;
            radii.push(RadiusRow {
                t,
                shots,
                delta_radius: delta.radius(),
                beta_radius: beta.radius(),
                ratio: beta.radius() / delta.radius(),
            });
        }
    }
    Ok(CoverageReport {
        seed: config.seed,
        coverage,
        radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(t: f64, alpha: f64, reps: usize) -> CoverageConfig {
        CoverageConfig {
            n: 3,
            t_values: vec![t],
            shots: 1000,
            reps,
            alpha,
            seed: 11,
            radius_shots: vec![1000],
        }
    }

    #[test]
    fn delta_coverage_near_nominal() {
        let report = run_coverage(&config(4.2, 0.05, 300)).unwrap();
        let row = &report.coverage[0];
        assert!((0.90..=0.99).contains(&row.delta_coverage), "{row:?}");
        assert_eq!(row.unresolved, 0);
    }

    #[test]
    fn half_level_coverage_near_half() {
        let report = run_coverage(&config(4.2, 0.5, 400)).unwrap();
        let c = report.coverage[0].delta_coverage;
        // 400 reps: standard error 0.025.
        assert!((c - 0.5).abs() < 0.1, "coverage {c}");
    }

    #[test]
    fn wrapped_target_is_unwrapped() {
        let report = run_coverage(&config(7.6, 0.05, 100)).unwrap();
        assert!(report.coverage[0].delta_coverage > 0.85);
        let report = run_coverage(&config(0.3, 0.05, 100)).unwrap();
        assert!(report.coverage[0].delta_coverage > 0.85);
    }
}

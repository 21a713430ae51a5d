use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use sincd::estimators::{estimate, EstimatorConfig};
use sincd::sampler::{apply_readout_noise, derive_seed, sample_shots};
use sincd::{FejerModel, Method};

use crate::config::SweepConfig;

/// Distance between `a` and `b` on the circle of circumference `dim`.
pub fn cyclic_error(a: f64, b: f64, dim: usize) -> f64 {
    let d = (a - b).abs().rem_euclid(dim as f64);
    d.min(dim as f64 - d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t_true: f64,
    pub round: usize,
    pub method: Method,
    pub t_hat: Option<f64>,
    pub abs_err: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub shots: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub t: f64,
    pub rounds: usize,
    pub failures: usize,
    pub mean_abs_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub estimates: usize,
    pub failures: usize,
    pub mean_abs_err: Option<f64>,
    pub max_abs_err: Option<f64>,
    pub per_t: Vec<PointSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: u32,
    pub shots: u64,
    pub round_size: u64,
    pub seed: u64,
    pub noise: f64,
    pub alpha: f64,
    pub rows: usize,
    pub dropped_shots: usize,
    pub methods: BTreeMap<Method, MethodSummary>,
    /// Estimator failures, which the CSV only shows as empty `t_hat`.
    pub errors: Vec<RowError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub t: f64,
    pub round: usize,
    pub method: Method,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn run_sweep(config: &SweepConfig) -> anyhow::Result<SweepOutput> {
    let estimator = EstimatorConfig {
        alpha: Some(config.alpha),
        ..EstimatorConfig::default()
    };
    let mut rows = Vec::new();
    let mut dropped_shots = 0;
    for (i, &t) in config.t_values.iter().enumerate() {
        let seed = derive_seed(config.seed, i as u64);
        let model = FejerModel::new(config.n, t)?;
        let dist = apply_readout_noise(&model.pmf(), config.noise)?;
        let record = sample_shots(&dist, config.shots as usize, seed)?;
        let split = record.split_rounds(config.round_size as usize)?;
        dropped_shots += split.dropped;
        for (round, counts) in split.rounds.iter().enumerate() {
            let freq = counts.frequencies();
            for &method in &config.methods {
                let mut row = SweepRow {
                    t_true: t,
                    round,
                    method,
                    t_hat: None,
                    abs_err: None,
                    ci_lo: None,
                    ci_hi: None,
                    shots: counts.shots(),
                    seed,
                    error: None,
                };
                match estimate(&freq, method, &estimator) {
                    Ok(report) => {
                        row.t_hat = Some(report.t_hat);
                        row.abs_err = Some(cyclic_error(report.t_hat, t, model.dim()));
                        row.ci_lo = report.interval.map(|ci| ci.lo);
                        row.ci_hi = report.interval.map(|ci| ci.hi);
                    }
                    Err(e) => {
                        log::debug!("t={t} round={round} {method}: {e}");
                        row.error = Some(e.to_string());
                    }
                }
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| {
        a.t_true
            .total_cmp(&b.t_true)
            .then(a.round.cmp(&b.round))
            .then(a.method.cmp(&b.method))
    });

    let mut methods = BTreeMap::new();
    for &method in &config.methods {
        let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.method == method).collect();
        let errors: Vec<f64> = mine.iter().filter_map(|r| r.abs_err).collect();
        let mut per_t: Vec<PointSummary> = Vec::new();
        for row in &mine {
            if per_t.last().is_none_or(|p| p.t != row.t_true) {
                let at_t: Vec<&&SweepRow> = mine.iter().filter(|r| r.t_true == row.t_true).collect();
                let errs: Vec<f64> = at_t.iter().filter_map(|r| r.abs_err).collect();
                per_t.push(PointSummary {
                    t: row.t_true,
                    rounds: at_t.len(),
                    failures: at_t.len() - errs.len(),
                    mean_abs_err: mean(&errs),
                });
            }
        }
        methods.insert(
            method,
            MethodSummary {
                estimates: errors.len(),
                failures: mine.len() - errors.len(),
                mean_abs_err: mean(&errors),
                max_abs_err: errors.iter().copied().reduce(f64::max),
                per_t,
            },
        );
    }

    Ok(SweepOutput {
        summary: SweepSummary {
            n: config.n,
            shots: config.shots,
            round_size: config.round_size,
            seed: config.seed,
            noise: config.noise,
            alpha: config.alpha,
            rows: rows.len(),
            dropped_shots,
            methods,
            errors: rows
                .iter()
                .filter_map(|r| {
                    r.error.as_ref().map(|e| RowError {
                        t: r.t_true,
                        round: r.round,
                        method: r.method,
                        error: e.clone(),
                    })
                })
                .collect(),
        },
        rows,
    })
}

pub const CSV_HEADER: [&str; 9] = [
    "t_true", "round", "method", "t_hat", "abs_err", "ci_lo", "ci_hi", "shots", "seed",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.t_true.to_string(),
            r.round.to_string(),
            r.method.to_string(),
            opt(r.t_hat),
            opt(r.abs_err),
            opt(r.ci_lo),
            opt(r.ci_hi),
            r.shots.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

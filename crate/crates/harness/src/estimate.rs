use serde::Serialize;
use sincd::estimators::{estimate, EstimatorConfig, MleConfig, SearchScope};
use sincd::{CountsHistogram, EstimateReport, Method};

use crate::config::EstimateConfig;
use crate::counts::ingest_counts;

/// Largest register for which MLE scans every unit interval; above it only the
/// intervals around the top pair are searched.
pub const FULL_SCAN_MAX_QUBITS: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EstimateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateOutput {
    pub n: u32,
    pub shots: u64,
    pub alpha: f64,
    pub results: Vec<MethodResult>,
}

pub fn estimate_counts(counts: &CountsHistogram, methods: &[Method], alpha: f64) -> EstimateOutput {
    let scope = if counts.n() <= FULL_SCAN_MAX_QUBITS {
        SearchScope::Full
    } else {
        SearchScope::Local
    };
    let config = EstimatorConfig {
        alpha: Some(alpha),
        mle: MleConfig {
            scope,
            ..MleConfig::default()
        },
        ..EstimatorConfig::default()
    };
    let freq = counts.frequencies();
    let results = methods
        .iter()
        .map(|&method| match estimate(&freq, method, &config) {
            Ok(report) => MethodResult {
                method,
                report: Some(report),
                error: None,
            },
            Err(e) => MethodResult {
                method,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    EstimateOutput {
        n: counts.n(),
        shots: counts.shots(),
        alpha,
        results,
    }
}

pub fn run_estimate(config: &EstimateConfig) -> anyhow::Result<EstimateOutput> {
    let counts = ingest_counts(&config.counts)?;
    Ok(estimate_counts(&counts, &config.methods, config.alpha))
}

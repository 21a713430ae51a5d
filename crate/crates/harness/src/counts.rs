//! Counts JSON ingestion.
//!
//! ```json
//! {"n": 3, "shots": 3, "counts": {"5": 2, "6": 1}, "memory": [5, 6, 5]}
//! ```
//!
//! Missing outcomes count as zero. `memory` is optional; when present it must
//! hold exactly `shots` outcomes whose histogram equals `counts`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sincd::sinc::MAX_QUBITS;
use sincd::CountsHistogram;

#[derive(Debug, thiserror::Error)]
pub enum CountsError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: key `{key}`: {message}")]
    Invalid { path: String, key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsFile {
    pub n: u32,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<u64>>,
}

impl CountsFile {
    pub fn from_histogram(h: &CountsHistogram) -> Self {
        Self {
            n: h.n(),
            shots: h.shots(),
            counts: h
                .counts()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k.to_string(), c))
                .collect(),
            memory: None,
        }
    }

    pub fn validate(&self, path: &str) -> Result<CountsHistogram, CountsError> {
        let invalid = |key: &str, message: String| CountsError::Invalid {
            path: path.to_string(),
            key: key.to_string(),
            message,
        };
        if self.n == 0 || self.n > MAX_QUBITS {
            return Err(invalid("n", format!("must be in 1..={MAX_QUBITS}, got {}", self.n)));
        }
        if self.shots == 0 {
            return Err(invalid("shots", "must be at least 1".into()));
        }
        let dim = 1usize << self.n;
        let mut counts = vec![0u64; dim];
        for (key, &c) in &self.counts {
            let k: usize = key
                .parse()
                .ok()
                .filter(|_| key.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| invalid(&format!("counts.{key}"), "outcome is not a decimal integer".into()))?;
            if k >= dim {
                return Err(invalid(&format!("counts.{key}"), format!("outcome outside [0, {dim})")));
            }
            counts[k] = c;
        }
        let total: u64 = counts.iter().sum();
        if total != self.shots {
            return Err(invalid(
                "shots",
                format!("declared {} but counts sum to {total}", self.shots),
            ));
        }
        if let Some(memory) = &self.memory {
            if memory.len() as u64 != self.shots {
                return Err(invalid(
                    "memory",
                    format!("holds {} outcomes, expected {}", memory.len(), self.shots),
                ));
            }
            let mut tally = vec![0u64; dim];
            for (i, &m) in memory.iter().enumerate() {
                if m as usize >= dim {
                    return Err(invalid(
                        &format!("memory[{i}]"),
                        format!("outcome {m} outside [0, {dim})"),
                    ));
                }
                tally[m as usize] += 1;
            }
            if tally != counts {
                return Err(invalid("memory", "histogram does not match `counts`".into()));
            }
        }
        CountsHistogram::new(self.n, counts).map_err(|e| invalid("counts", e.to_string()))
    }
}

pub fn parse_counts(text: &str, path: &str) -> Result<CountsHistogram, CountsError> {
    let file: CountsFile = serde_json::from_str(text).map_err(|e| CountsError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.validate(path)
}

pub fn ingest_counts(path: &Path) -> Result<CountsHistogram, CountsError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CountsError::Io {
        path: display.clone(),
        source,
    })?;
    parse_counts(&text, &display)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CountsHistogram, CountsError> {
        parse_counts(text, "test.json")
    }

    #[test]
    fn accepts_the_schema() {
        let h = parse(r#"{"n":3,"shots":3,"counts":{"5":2,"6":1}}"#).unwrap();
        assert_eq!(h.shots(), 3);
        assert_eq!(h.counts()[5], 2);
        assert_eq!(h.counts()[0], 0);

        let h = parse(r#"{"n":3,"shots":3,"counts":{"5":2,"6":1},"memory":[5,6,5]}"#).unwrap();
        assert_eq!(h.shots(), 3);
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            (r#"{"n":3,"shots":4,"counts":{"5":2,"6":1}}"#, "shots"),
            (r#"{"n":3,"shots":1,"counts":{"8":1}}"#, "counts.8"),
            (r#"{"n":3,"shots":1,"counts":{"-1":1}}"#, "counts.-1"),
            (r#"{"n":3,"shots":0,"counts":{}}"#, "shots"),
            (r#"{"n":0,"shots":1,"counts":{"0":1}}"#, "n"),
            (r#"{"n":3,"shots":2,"counts":{"5":2},"memory":[5]}"#, "memory"),
            (r#"{"n":3,"shots":2,"counts":{"5":2},"memory":[5,6]}"#, "memory"),
        ];
        for (text, key) in cases {
            match parse(text) {
                Err(CountsError::Invalid { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("{\n\"n\": 3,\n\"shots\": x}") {
            Err(CountsError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse(r#"{"n":3,"shots":1,"counts":{"1":1},"N":6}"#),
            Err(CountsError::Parse { .. })
        ));
    }

    #[test]
    fn round_trips_through_histogram() {
        let h = CountsHistogram::from_pairs(3, [(2, 7), (3, 1)]).unwrap();
        let text = serde_json::to_string(&CountsFile::from_histogram(&h)).unwrap();
        assert_eq!(parse(&text).unwrap(), h);
    }
}

//! Side-by-side runs on one problem instance and initial point.

use std::io::Write;

use crate::config::{Algorithm, RunConfig};
use crate::error::HarnessError;
use crate::experiment::{execute, load_problem, write_outputs, RunResult, Written};
use crate::trace::{fmt_real, TraceRecord};

pub const THRESHOLDS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// First trace row at or below `threshold`.
pub fn first_below(records: &[TraceRecord], threshold: f64) -> Option<&TraceRecord> {
    records.iter().find(|r| r.grad_norm <= threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdHit {
    pub threshold: f64,
    /// `None` when the run never reached the threshold.
    pub iterations: Option<usize>,
    pub operator_evals: Option<u64>,
    pub jacobian_evals: Option<u64>,
    pub linear_solves: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct CompareEntry {
    /// Algorithm name, suffixed with `#i` when it appears more than once.
    pub label: String,
    pub algorithm: Algorithm,
    pub hits: Vec<ThresholdHit>,
    pub result: RunResult,
}

impl CompareEntry {
    pub fn iterations_to(&self, threshold: f64) -> Option<usize> {
        first_below(&self.result.records, threshold).map(|r| r.iter)
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub entries: Vec<CompareEntry>,
}

impl CompareReport {
    pub fn entry(&self, algorithm: Algorithm) -> Option<&CompareEntry> {
        self.entries.iter().find(|e| e.algorithm == algorithm)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "label",
            "algorithm",
            "threshold",
            "iterations",
            "operator_evals",
            "jacobian_evals",
            "linear_solves",
        ])?;
        let cell = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        for e in &self.entries {
            for h in &e.hits {
                w.write_record([
                    e.label.clone(),
                    e.algorithm.name().to_string(),
                    fmt_real(h.threshold),
                    cell(h.iterations.map(|v| v as u64)),
                    cell(h.operator_evals),
                    cell(h.jacobian_evals),
                    cell(h.linear_solves),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn hits(records: &[TraceRecord]) -> Vec<ThresholdHit> {
    THRESHOLDS
        .iter()
        .map(|&threshold| {
            let r = first_below(records, threshold);
            ThresholdHit {
                threshold,
                iterations: r.map(|r| r.iter),
                operator_evals: r.map(|r| r.operator_evals),
                jacobian_evals: r.map(|r| r.jacobian_evals),
                linear_solves: r.map(|r| r.linear_solves),
            }
        })
        .collect()
}

/// Runs every configuration concurrently on the shared problem.
///
/// All members must name the same problem source and initial-point seed.
pub fn compare_report(configs: &[RunConfig]) -> Result<CompareReport, HarnessError> {
    if configs.len() < 2 {
        return Err(HarnessError::TooFewConfigs(configs.len()));
    }
    let first = &configs[0];
    for (index, c) in configs.iter().enumerate().skip(1) {
        if c.problem != first.problem {
            return Err(HarnessError::Mismatched {
                index,
                reason: format!("problem {:?} vs {:?}", c.problem, first.problem),
            });
        }
        if c.seed != first.seed {
            return Err(HarnessError::Mismatched {
                index,
                reason: format!("seed {} vs {}", c.seed, first.seed),
            });
        }
    }
    let problem = load_problem(&first.problem)?;

    let results: Vec<RunResult> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(|| execute(c, &problem))).collect();
        handles.into_iter().map(|h| h.join().expect("member run panicked")).collect()
    });

    let entries = configs
        .iter()
        .zip(results)
        .enumerate()
        .map(|(i, (c, result))| {
            let algorithm = c.algorithm();
            let repeated = configs.iter().filter(|o| o.algorithm() == algorithm).count() > 1;
            let label = if repeated {
                format!("{algorithm}#{i}")
            } else {
                algorithm.to_string()
            };
            CompareEntry {
                label,
                algorithm,
                hits: hits(&result.records),
                result,
            }
        })
        .collect();
    Ok(CompareReport { entries })
}

/// Writes each member's trace files, one after another.
pub fn write_member_outputs(configs: &[RunConfig], report: &CompareReport) -> Result<Vec<Written>, HarnessError> {
    let problem = load_problem(&configs[0].problem)?;
    configs
        .iter()
        .zip(&report.entries)
        .map(|(c, e)| write_outputs(c, &problem, &e.result))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_str_config(text).unwrap()
    }

    #[test]
    fn single_config_is_rejected() {
        let err = compare_report(&[cfg("algo=lfcr")]).unwrap_err();
        assert!(matches!(err, HarnessError::TooFewConfigs(1)));
    }

    #[test]
    fn mismatched_problems_are_rejected() {
        let err = compare_report(&[cfg("algo=lfcr\nn=4"), cfg("algo=eg\neta=0.1\nn=5")]).unwrap_err();
        assert!(matches!(err, HarnessError::Mismatched { index: 1, .. }));
        let err = compare_report(&[cfg("algo=lfcr\nn=4"), cfg("algo=lfcr\nn=4\nseed=2")]).unwrap_err();
        assert!(matches!(err, HarnessError::Mismatched { index: 1, .. }));
    }

    #[test]
    fn table_has_one_row_per_threshold() {
        let report = compare_report(&[
            cfg("algo=lfcr\nn=4\nmax_iters=200\ngrad_tol=1e-7"),
            cfg("algo=lfcr\nn=4\nmax_iters=200\ngrad_tol=1e-7\nc=1/33"),
        ])
        .unwrap();
        assert_eq!(report.entries[0].label, "lfcr#0");
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 2 * THRESHOLDS.len());
        let reached = report.entries[0].hits.iter().filter(|h| h.iterations.is_some()).count();
        assert_eq!(reached, THRESHOLDS.len());
    }
}

//! Trace records and their CSV form.
//!
//! Every row starts with the schema tag so a single row identifies its
//! format. Reals are written with 17 significant digits; a cell is empty when
//! the column does not apply (no `λ` on EG rows, for example).

use std::io::Write;

use crate::config::Algorithm;

pub const SCHEMA: &str = "minimax-trace-v1";

pub const HEADER: [&str; 14] = [
    "schema",
    "wall_ms",
    "algorithm",
    "t",
    "k",
    "sub",
    "iter",
    "grad_norm",
    "curvature",
    "step_norm",
    "lambda",
    "operator_evals",
    "jacobian_evals",
    "linear_solves",
];

/// Index of the wall-clock column, the only nondeterministic field.
pub const WALL_COLUMN: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub wall_ms: f64,
    pub algorithm: Algorithm,
    /// Outer (distance-guess) index; 0 for single-loop methods.
    pub t: usize,
    pub k: usize,
    pub sub: usize,
    /// Cumulative iteration count used for iterations-to-threshold.
    pub iter: usize,
    pub grad_norm: f64,
    /// Current `H` or `M`.
    pub curvature: Option<f64>,
    pub step_norm: Option<f64>,
    pub lambda: Option<f64>,
    pub operator_evals: u64,
    pub jacobian_evals: u64,
    pub linear_solves: u64,
}

impl TraceRecord {
    pub fn key(&self) -> (usize, usize, usize) {
        (self.t, self.k, self.sub)
    }
}

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

fn row(r: &TraceRecord) -> [String; 14] {
    [
        SCHEMA.to_string(),
        format!("{:.3}", r.wall_ms),
        r.algorithm.name().to_string(),
        r.t.to_string(),
        r.k.to_string(),
        r.sub.to_string(),
        r.iter.to_string(),
        fmt_real(r.grad_norm),
        fmt_opt(r.curvature),
        fmt_opt(r.step_norm),
        fmt_opt(r.lambda),
        r.operator_evals.to_string(),
        r.jacobian_evals.to_string(),
        r.linear_solves.to_string(),
    ]
}

/// Keeps the first row, the last row and every row with `iter % stride == 0`.
pub fn decimate(records: &[TraceRecord], stride: usize) -> Vec<&TraceRecord> {
    let last = records.len().saturating_sub(1);
    records
        .iter()
        .enumerate()
        .filter(|(i, r)| stride <= 1 || *i == 0 || *i == last || r.iter % stride == 0)
        .map(|(_, r)| r)
        .collect()
}

pub fn write_csv<'a, W: Write>(out: W, records: impl IntoIterator<Item = &'a TraceRecord>) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Ordering and monotonicity violations of a trace, empty when valid.
pub fn check_trace(records: &[TraceRecord]) -> Vec<String> {
    let mut problems = Vec::new();
    for (i, w) in records.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if a.key() >= b.key() {
            problems.push(format!("row {}: key {:?} does not follow {:?}", i + 1, b.key(), a.key()));
        }
        if b.operator_evals < a.operator_evals || b.jacobian_evals < a.jacobian_evals || b.linear_solves < a.linear_solves {
            problems.push(format!("row {}: a counter decreased", i + 1));
        }
        if b.iter < a.iter {
            problems.push(format!("row {}: iteration count decreased", i + 1));
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, iter: usize, ops: u64) -> TraceRecord {
        TraceRecord {
            wall_ms: 0.5,
            algorithm: Algorithm::Eg,
            t: 0,
            k,
            sub: 0,
            iter,
            grad_norm: 0.1,
            curvature: None,
            step_norm: Some(1.0 / 3.0),
            lambda: None,
            operator_evals: ops,
            jacobian_evals: 0,
            linear_solves: 0,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec(0, 0, 1)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "minimax-trace-v1,0.500,eg,0,0,0,0,1.0000000000000001e-1,,3.3333333333333331e-1,,1,0,0"
        );
    }

    #[test]
    fn decimation_keeps_ends() {
        let rows: Vec<_> = (0..10).map(|k| rec(k, k, k as u64)).collect();
        let kept: Vec<usize> = decimate(&rows, 4).iter().map(|r| r.k).collect();
        assert_eq!(kept, vec![0, 4, 8, 9]);
        assert_eq!(decimate(&rows, 1).len(), 10);
    }

    #[test]
    fn trace_checks() {
        assert!(check_trace(&[rec(0, 0, 1), rec(1, 1, 3)]).is_empty());
        assert_eq!(check_trace(&[rec(1, 1, 1), rec(1, 2, 3)]).len(), 1);
        assert_eq!(check_trace(&[rec(0, 0, 3), rec(1, 1, 1)]).len(), 1);
    }
}

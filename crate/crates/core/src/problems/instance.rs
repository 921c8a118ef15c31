//! Plain-text instance files for [`CubicBilinearProblem`].
//!
//! ```text
//! # cubic-minimax instance
//! format=cubic-minimax-instance/1
//! kind=cubic_bilinear
//! n=2
//! rho=1.0000000000000000e1
//! b_seed=7
//! a=1.0000000000000000e0 0.0000000000000000e0
//! a=0.0000000000000000e0 1.0000000000000000e0
//! b=-3.1415926535897931e-1 2.7182818284590451e-1
//! ```
//!
//! One `a=` line per row of `A`, in order. Reals use 17 significant digits so
//! every value reads back bit-identically. `b_seed=none` marks a supplied `b`.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use super::{CubicBilinearProblem, ProblemError};

pub const FORMAT_TAG: &str = "cubic-minimax-instance/1";

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_row<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|v| fmt_real(*v)).collect::<Vec<_>>().join(" ")
}

pub fn write_instance<W: Write>(problem: &CubicBilinearProblem, mut out: W) -> Result<(), ProblemError> {
    let n = problem.n();
    writeln!(out, "# cubic-minimax instance")?;
    writeln!(out, "format={FORMAT_TAG}")?;
    writeln!(out, "kind=cubic_bilinear")?;
    writeln!(out, "n={n}")?;
    writeln!(out, "rho={}", fmt_real(problem.rho()))?;
    match problem.b_seed() {
        Some(seed) => writeln!(out, "b_seed={seed}")?,
        None => writeln!(out, "b_seed=none")?,
    }
    for row in problem.a().row_iter() {
        writeln!(out, "a={}", fmt_row(row.iter()))?;
    }
    writeln!(out, "b={}", fmt_row(problem.b().iter()))?;
    Ok(())
}

pub fn read_instance<R: BufRead>(input: R) -> Result<CubicBilinearProblem, ProblemError> {
    let mut format = None;
    let mut n: Option<usize> = None;
    let mut rho: Option<f64> = None;
    let mut b_seed: Option<Option<u64>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut b: Option<Vec<f64>> = None;

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| ProblemError::Parse { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
        let reals = |v: &str| -> Result<Vec<f64>, ProblemError> {
            v.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad real {t:?}: {e}"))))
                .collect()
        };
        match key.trim() {
            "format" => format = Some(value.trim().to_string()),
            "kind" => {
                if value.trim() != "cubic_bilinear" {
                    return Err(parse_err(format!("unsupported kind {:?}", value.trim())));
                }
            }
            "n" => n = Some(value.trim().parse().map_err(|e| parse_err(format!("bad n: {e}")))?),
            "rho" => rho = Some(value.trim().parse().map_err(|e| parse_err(format!("bad rho: {e}")))?),
            "b_seed" => {
                b_seed = Some(match value.trim() {
                    "none" => None,
                    s => Some(s.parse().map_err(|e| parse_err(format!("bad b_seed: {e}")))?),
                })
            }
            "a" => rows.push(reals(value)?),
            "b" => b = Some(reals(value)?),
            other => return Err(parse_err(format!("unknown key {other:?}"))),
        }
    }

    let missing = |what: &str| ProblemError::Parse {
        line: 0,
        message: format!("missing {what}"),
    };
    match format.as_deref() {
        Some(FORMAT_TAG) => {}
        Some(other) => {
            return Err(ProblemError::Parse {
                line: 0,
                message: format!("unsupported format {other:?}"),
            })
        }
        None => return Err(missing("format")),
    }
    let n = n.ok_or_else(|| missing("n"))?;
    let rho = rho.ok_or_else(|| missing("rho"))?;
    let b = b.ok_or_else(|| missing("b"))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(ProblemError::DimensionMismatch(format!(
            "instance declares n={n} but has {} rows of A and {} entries of b",
            rows.len(),
            b.len()
        )));
    }
    let a = DMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
    let problem = CubicBilinearProblem::new(rho, a, DVector::from_vec(b))?;
    Ok(problem.with_b_seed(b_seed.flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_cubic_bilinear, BSource};

    #[test]
    fn round_trip_is_bit_exact() {
        let mut a = DMatrix::identity(4, 4);
        a[(0, 3)] = 1.0 / 3.0;
        a[(2, 1)] = -std::f64::consts::PI;
        let p = make_cubic_bilinear(4, 10.0 / 7.0, a, BSource::Seed(9)).unwrap();
        let mut buf = Vec::new();
        write_instance(&p, &mut buf).unwrap();
        let q = read_instance(buf.as_slice()).unwrap();
        assert_eq!(q.rho().to_bits(), p.rho().to_bits());
        assert!(p.a().iter().zip(q.a().iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
        assert!(p.b().iter().zip(q.b().iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
        assert_eq!(q.b_seed(), Some(9));
        let mut again = Vec::new();
        write_instance(&q, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "format=cubic-minimax-instance/1\nn=1\nfoo=2\n";
        match read_instance(text.as_bytes()) {
            Err(ProblemError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_matrix_is_rejected() {
        let text = "format=cubic-minimax-instance/1\nn=2\nrho=1\nb_seed=none\na=1 0\nb=1 1\n";
        assert!(matches!(read_instance(text.as_bytes()), Err(ProblemError::DimensionMismatch(_))));
    }
}

//! CSV emission: `.` decimals, LF endings, 12 significant digits.

use std::io::Write;
use std::path::Path;

use bcgc::simulator::{SweepTable, TrainingTrace};
use bcgc::BlockAllocation;

use crate::error::CliError;

/// Rounds to 12 significant digits and prints without exponent noise.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

fn fmt_count(alloc: &BlockAllocation, level: usize) -> String {
    match alloc.integer_counts() {
        Some(c) => c[level].to_string(),
        None => fmt_num(alloc.counts()[level]),
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory csv writer")
}

/// `level,x_optimal,x_t,x_f`, one row per level.
pub fn solution_csv(
    optimal: &BlockAllocation,
    x_t: &BlockAllocation,
    x_f: &BlockAllocation,
) -> Vec<u8> {
    let mut w = writer();
    w.write_record(["level", "x_optimal", "x_t", "x_f"])
        .unwrap();
    for n in 0..optimal.n_levels() {
        w.write_record([
            n.to_string(),
            fmt_count(optimal, n),
            fmt_count(x_t, n),
            fmt_count(x_f, n),
        ])
        .unwrap();
    }
    finish(w)
}

/// `axis,value,scheme,mean_runtime,ci95_halfwidth,n_draws`.
pub fn sweep_csv(table: &SweepTable) -> Vec<u8> {
    let mut w = writer();
    w.write_record([
        "axis",
        "value",
        "scheme",
        "mean_runtime",
        "ci95_halfwidth",
        "n_draws",
    ])
    .unwrap();
    for row in &table.rows {
        w.write_record([
            row.axis.to_string(),
            fmt_num(row.value),
            row.scheme.clone(),
            fmt_num(row.estimate.mean),
            fmt_num(row.estimate.half_width_95),
            row.estimate.n_draws.to_string(),
        ])
        .unwrap();
    }
    finish(w)
}

/// `iteration,loss,runtime,gradient_rel_error`; the last row holds the final loss only.
pub fn training_csv(trace: &TrainingTrace) -> Vec<u8> {
    let mut w = writer();
    w.write_record(["iteration", "loss", "runtime", "gradient_rel_error"])
        .unwrap();
    for (i, loss) in trace.losses.iter().enumerate() {
        let runtime = trace
            .runtimes
            .get(i)
            .map(|&v| fmt_num(v))
            .unwrap_or_default();
        let err = trace
            .gradient_errors
            .get(i)
            .map(|&v| fmt_num(v))
            .unwrap_or_default();
        w.write_record([i.to_string(), fmt_num(*loss), runtime, err])
            .unwrap();
    }
    finish(w)
}

/// `check,passed,max_error,tolerance`.
pub fn checks_csv(checks: &[crate::commands::CheckResult]) -> Vec<u8> {
    let mut w = writer();
    w.write_record(["check", "passed", "max_error", "tolerance"])
        .unwrap();
    for c in checks {
        w.write_record([
            c.name.to_string(),
            c.passed.to_string(),
            fmt_num(c.max_error),
            fmt_num(c.tolerance),
        ])
        .unwrap();
    }
    finish(w)
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

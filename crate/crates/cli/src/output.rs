//! Fixed-format numbers for JSON reports and CSV files.
//!
//! Every float is written with 17 significant digits in scientific notation,
//! which round-trips any `f64` exactly and keeps reports byte-identical across
//! runs. JSON has no literal for non-finite values; they become the strings
//! `"inf"`, `"-inf"` and `"nan"`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nalgebra::DMatrix;
use serde_json::{json, Value};

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_f64(x)).expect("formatted float is valid JSON")
    } else {
        Value::String(fmt_f64(x))
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(m: &DMatrix<f64>) -> Value {
    let data: Vec<Value> = m
        .row_iter()
        .map(|r| Value::Array(r.iter().map(|&x| num(x)).collect()))
        .collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

/// 1-based copies of 0-based node lists.
pub fn one_based(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|i| i + 1).collect()
}

pub fn csv_path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}_{suffix}.csv"))
}

pub fn write_rows(path: &Path, header: Option<&[&str]>, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// One CSV record per matrix row.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<String>> {
    m.row_iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect()).collect()
}

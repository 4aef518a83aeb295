use std::io::Write;

use serde_json::Value;

use crate::{CliError, Common, Format};

/// Version of the JSON and CSV layouts written by this binary.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

/// A JSON object stamped with the schema version and command name.
pub fn json(command: &str, mut body: Value) -> String {
    if let Value::Object(map) = &mut body {
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
        map.insert("command".into(), command.into());
    }
    serde_json::to_string(&body).expect("JSON values serialize") + "\n"
}

/// Writes the finished output once, to `--out` or stdout.
pub fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn pick(common: &Common, json: impl FnOnce() -> String, csv: impl FnOnce() -> Result<String, CliError>) -> Result<String, CliError> {
    match common.format {
        Format::Json => Ok(json()),
        Format::Csv => csv(),
    }
}

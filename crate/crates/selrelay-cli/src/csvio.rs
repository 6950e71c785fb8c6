//! Fixed CSV schema shared by `sweep` (writer) and `slope` (reader).
//!
//! One row per (scheme, metric, N_R, SNR point, source). Numbers are
//! rendered as `%.10e`; inapplicable cells carry the literal `NA`. Output
//! is UTF-8 with LF line endings and is byte-identical across runs for a
//! fixed seed.

use crate::CliError;

pub const CSV_HEADER: &str =
    "scheme,metric,n_relays,gbar0_db,gbar1_db,rate,mode,source,value,stderr,trials,seed";

/// `%.10e` rendering (two-digit signed exponent, C style).
pub fn fmt_e10(x: f64) -> String {
    debug_assert!(x.is_finite());
    let raw = format!("{:.10e}", x);
    let (mantissa, exponent) = raw.split_once('e').expect("LowerExp always emits 'e'");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(rest) => ('-', rest),
        None => ('+', exponent),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

/// Optional-cell rendering.
pub fn cell_f64(value: Option<f64>) -> String {
    value.map(fmt_e10).unwrap_or_else(|| "NA".into())
}

pub fn cell_u64(value: Option<u64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_else(|| "NA".into())
}

/// One parsed data row (the reader side used by `slope`).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scheme: String,
    pub metric: String,
    pub n_relays: u32,
    pub gbar0_db: Option<f64>,
    pub gbar1_db: Option<f64>,
    pub rate: Option<f64>,
    pub mode: Option<String>,
    pub source: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

fn parse_opt_f64(field: &str, name: &str, line: u64) -> Result<Option<f64>, CliError> {
    if field == "NA" {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::Numeric(format!("line {line}: bad {name} value '{field}'")))
}

fn parse_opt_u64(field: &str, name: &str, line: u64) -> Result<Option<u64>, CliError> {
    if field == "NA" {
        return Ok(None);
    }
    field
        .parse::<u64>()
        .map(Some)
        .map_err(|_| CliError::Numeric(format!("line {line}: bad {name} value '{field}'")))
}

/// Strict reader: the header must match [`CSV_HEADER`] exactly and every
/// row must carry 12 well-formed fields. Errors name the offending line.
pub fn read_rows(path: &std::path::Path) -> Result<Vec<CsvRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| CliError::Numeric(format!("line 1: unreadable header: {e}")))?;
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(CliError::Numeric(format!(
                "line 1: header mismatch, expected '{CSV_HEADER}'"
            )));
        }
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(csv::Position::line)
                .unwrap_or_default();
            CliError::Numeric(format!("line {line}: malformed CSV record: {e}"))
        })?;
        let line = record.position().map(csv::Position::line).unwrap_or(0);
        if record.len() != 12 {
            return Err(CliError::Numeric(format!(
                "line {line}: expected 12 fields, found {}",
                record.len()
            )));
        }
        rows.push(CsvRow {
            scheme: record[0].to_string(),
            metric: record[1].to_string(),
            n_relays: record[2].parse().map_err(|_| {
                CliError::Numeric(format!("line {line}: bad n_relays value '{}'", &record[2]))
            })?,
            gbar0_db: parse_opt_f64(&record[3], "gbar0_db", line)?,
            gbar1_db: parse_opt_f64(&record[4], "gbar1_db", line)?,
            rate: parse_opt_f64(&record[5], "rate", line)?,
            mode: match &record[6] {
                "NA" => None,
                other => Some(other.to_string()),
            },
            source: record[7].to_string(),
            value: record[8].parse().map_err(|_| {
                CliError::Numeric(format!("line {line}: bad value '{}'", &record[8]))
            })?,
            stderr: parse_opt_f64(&record[9], "stderr", line)?,
            trials: parse_opt_u64(&record[10], "trials", line)?,
            seed: parse_opt_u64(&record[11], "seed", line)?,
        });
    }
    Ok(rows)
}

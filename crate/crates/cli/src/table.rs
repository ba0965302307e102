//! CSV emission (9 significant digits, LF, header row) and ingestion of
//! two-column spectra.

use std::path::Path;

use qnoise_core::FrequencyGrid;

use crate::error::{CliError, Result};

/// Scientific notation with 9 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // writing to a Vec cannot fail
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Parses `f_hz,psd_m2_per_hz` rows (header mandatory). Frequencies must be
/// strictly increasing and positive, PSDs finite and non-negative.
pub fn parse_two_column(text: &str, source: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| CliError::config(source, format!("unreadable header: {e}")))?;
    if header.len() != 2 {
        return Err(CliError::config(
            source,
            format!("expected 2 header columns (f_hz,psd_m2_per_hz), found {}", header.len()),
        ));
    }
    if header.get(0).and_then(|h| h.parse::<f64>().ok()).is_some() {
        return Err(CliError::config(source, "header row is mandatory"));
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::config(source, format!("line {line}: {e}")))?;
        if rec.len() != 2 {
            return Err(CliError::config(source, format!("line {line}: expected 2 columns")));
        }
        let num = |j: usize| -> Result<f64> {
            rec[j].parse::<f64>().map_err(|_| {
                CliError::config(source, format!("line {line}: `{}` is not a number", &rec[j]))
            })
        };
        let (f, psd) = (num(0)?, num(1)?);
        if !(f.is_finite() && f > 0.0) {
            return Err(CliError::config(source, format!("line {line}: frequency must be > 0")));
        }
        if !(psd.is_finite() && psd >= 0.0) {
            return Err(CliError::config(source, format!("line {line}: PSD must be >= 0")));
        }
        if let Some(&(prev, _)) = out.last() {
            if f <= prev {
                return Err(CliError::config(
                    source,
                    format!("line {line}: frequencies must be strictly increasing"),
                ));
            }
        }
        out.push((f, psd));
    }
    if out.is_empty() {
        return Err(CliError::config(source, "no data rows"));
    }
    Ok(out)
}

pub fn read_two_column(path: &Path, source: &str) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{source}: reading {}: {e}", path.display())))?;
    parse_two_column(&text, source)
}

/// Relative distance within which a grid point is taken to be a data node
/// (half a unit in the 9th significant digit).
const NODE_RTOL: f64 = 5e-9;

/// Log-log linear interpolation of `data` onto `grid`; segments touching a
/// zero PSD fall back to linear interpolation. Grid points matching a node to
/// 9 significant digits take the node value. Grid points outside the data
/// range are an error.
pub fn interpolate_loglog(data: &[(f64, f64)], grid: &FrequencyGrid, source: &str) -> Result<Vec<f64>> {
    let (lo, hi) = (data[0].0, data[data.len() - 1].0);
    let near = |a: f64, b: f64| (a - b).abs() <= NODE_RTOL * b;
    grid.iter()
        .map(|f| {
            let j = data.partition_point(|&(x, _)| x < f);
            if let Some(&(_, y)) = data.get(j).filter(|p| near(p.0, f)) {
                return Ok(y);
            }
            if let Some(&(_, y)) = j.checked_sub(1).and_then(|i| data.get(i)).filter(|p| near(p.0, f)) {
                return Ok(y);
            }
            if f < lo || f > hi {
                return Err(CliError::config(
                    source,
                    format!("grid frequency {f} Hz lies outside the data range [{lo}, {hi}] Hz (no extrapolation)"),
                ));
            }
            let (x1, y1) = data[j];
            let (x0, y0) = data[j - 1];
            if y0 > 0.0 && y1 > 0.0 {
                let t = (f / x0).ln() / (x1 / x0).ln();
                Ok((y0.ln() + t * (y1 / y0).ln()).exp())
            } else {
                let t = (f - x0) / (x1 - x0);
                Ok(y0 + t * (y1 - y0))
            }
        })
        .collect()
}

/// `f_hz,psd_m2_per_hz` table of a sampled spectrum.
pub fn two_column_csv(grid: &FrequencyGrid, values: &[f64]) -> String {
    let mut t = Table::new(["f_hz", "psd_m2_per_hz"]);
    for (f, v) in grid.iter().zip(values) {
        t.push(vec![fmt_num(f), fmt_num(*v)]);
    }
    t.to_csv()
}

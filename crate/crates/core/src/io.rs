//! Deterministic table emission: CSV/JSON serialization with round-trip
//! float formatting, content hashing, and converters from the result types.
//!
//! Every float is written with the shortest decimal representation that
//! parses back to the identical `f64` (Rust's `Display`), so identical data
//! always produces byte-identical files and hashes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capture::CaptureReport;
use crate::classical::{EnsembleResult, SectionPoint};
use crate::error::{Error, Result};
use crate::quantum::QuantumRunResult;
use crate::regime::{LifetimeRow, RegimeRow};

/// One table value. Integers and text are kept distinct from floats so the
/// CSV and JSON forms stay faithful to the source type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        match self {
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::UInt(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Float(v) => {
                out.push_str(&format_f64(*v));
            }
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    let _ = write!(out, "\"{}\"", s.replace('"', "\"\""));
                } else {
                    out.push_str(s);
                }
            }
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::UInt(v) => serde_json::Value::from(*v),
            Cell::Float(v) => {
                // JSON has no non-finite numbers; use string sentinels
                if v.is_finite() {
                    serde_json::Value::from(*v)
                } else {
                    serde_json::Value::from(format!("{v}"))
                }
            }
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

/// Shortest exact decimal for a float: plain notation in a readable range,
/// exponent notation outside it. Both forms parse back to the same bits.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e16) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Homogeneous rows under a fixed header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Config(format!(
                "row width {} does not match header width {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// CSV with `\n` line endings; empty tables serialize to a header-only
    /// file.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// JSON array of objects keyed by header name. serde_json's default map
    /// is a BTreeMap, so keys come out sorted.
    pub fn to_json(&self) -> String {
        let items: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.clone(), c.to_json()))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&items).expect("table is always serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Parse CSV produced by `to_csv`. Cells come back as `Float` when they
    /// parse as a number, otherwise `Text`; used for round-trip checks.
    pub fn from_csv(text: &str) -> Result<Table> {
        let mut lines = text.split('\n');
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Config("empty CSV input".into()))?;
        let header: Vec<String> = header_line.split(',').map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let cells = split_csv_line(line)?;
            if cells.len() != header.len() {
                return Err(Error::Config(format!(
                    "CSV row has {} cells, header has {}",
                    cells.len(),
                    header.len()
                )));
            }
            rows.push(
                cells
                    .into_iter()
                    .map(|(text, quoted)| {
                        if quoted {
                            return Cell::Text(text);
                        }
                        if let Ok(v) = text.parse::<i64>() {
                            return Cell::Int(v);
                        }
                        if let Ok(v) = text.parse::<u64>() {
                            return Cell::UInt(v);
                        }
                        if let Ok(v) = text.parse::<f64>() {
                            return Cell::Float(v);
                        }
                        Cell::Text(text)
                    })
                    .collect(),
            );
        }
        Ok(Table { header, rows })
    }
}

fn split_csv_line(line: &str) -> Result<Vec<(String, bool)>> {
    let mut cells = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        let mut cell = String::new();
        let mut quoted = false;
        if chars.peek() == Some(&'"') {
            quoted = true;
            chars.next();
            loop {
                match chars.next() {
                    Some('"') => {
                        if chars.peek() == Some(&'"') {
                            chars.next();
                            cell.push('"');
                        } else {
                            break;
                        }
                    }
                    Some(c) => cell.push(c),
                    None => return Err(Error::Config("unterminated CSV quote".into())),
                }
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c == ',' {
                    break;
                }
                cell.push(c);
                chars.next();
            }
        }
        cells.push((cell, quoted));
        match chars.next() {
            Some(',') => continue,
            None => break,
            Some(c) => return Err(Error::Config(format!("unexpected character {c:?} in CSV"))),
        }
    }
    Ok(cells)
}

/// Hex SHA-256 of the byte content.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Serialize and write the table; returns the content hash of what was
/// written.
pub fn write_table(table: &Table, format: OutputFormat, path: &Path) -> Result<String> {
    let content = table.render(format);
    std::fs::write(path, content.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(content_hash(content.as_bytes()))
}

/// Write any serializable report as pretty JSON (sorted keys come from the
/// struct field order; reports use stable derives). Returns the content hash.
pub fn write_json_report<T: Serialize>(report: &T, path: &Path) -> Result<String> {
    let mut content = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?;
    content.push('\n');
    std::fs::write(path, content.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(content_hash(content.as_bytes()))
}

// ---- converters from result types to tables ------------------------------

/// `mu,N_I,ell_phi,regime`
pub fn regime_table(rows: &[RegimeRow]) -> Table {
    let mut t = Table::new(&["mu", "N_I", "ell_phi", "regime"]);
    for r in rows {
        t.rows.push(vec![
            Cell::Float(r.mu),
            Cell::Float(r.n_i),
            Cell::Float(r.ell_phi),
            Cell::Text(r.regime.label()),
        ]);
    }
    t
}

/// `mu,t_I_years,mechanism`
pub fn lifetime_table(rows: &[LifetimeRow]) -> Table {
    let mut t = Table::new(&["mu", "t_I_years", "mechanism"]);
    for r in rows {
        t.rows.push(vec![
            Cell::Float(r.mu),
            Cell::Float(r.t_i_years),
            Cell::Text(r.mechanism.label()),
        ]);
    }
    t
}

/// `kicks,periods,surviving_fraction`
pub fn survival_table(result: &EnsembleResult) -> Table {
    let mut t = Table::new(&["kicks", "periods", "surviving_fraction"]);
    for &(kicks, periods, frac) in &result.survival_curve {
        t.rows.push(vec![
            Cell::UInt(kicks),
            Cell::Float(periods),
            Cell::Float(frac),
        ]);
    }
    t
}

/// `traj_id,kicks,periods`
pub fn escape_table(result: &EnsembleResult) -> Table {
    let mut t = Table::new(&["traj_id", "kicks", "periods"]);
    for (traj, kicks, periods) in result.escape_times() {
        t.rows.push(vec![
            Cell::UInt(traj as u64),
            Cell::UInt(kicks),
            Cell::Float(periods),
        ]);
    }
    t
}

/// `traj_id,w,phi`
pub fn section_table(points: &[SectionPoint]) -> Table {
    let mut t = Table::new(&["traj_id", "w", "phi"]);
    for p in points {
        t.rows.push(vec![
            Cell::UInt(p.traj as u64),
            Cell::Float(p.w),
            Cell::Float(p.phi),
        ]);
    }
    t
}

/// `iteration,p_ion`
pub fn ionization_table(result: &QuantumRunResult) -> Table {
    let mut t = Table::new(&["iteration", "p_ion"]);
    for &(it, p) in &result.ionization_curve {
        t.rows.push(vec![Cell::UInt(it), Cell::Float(p)]);
    }
    t
}

/// `N_phi,W` — sites indexed relative to the initial state.
pub fn distribution_table(result: &QuantumRunResult) -> Table {
    let mut t = Table::new(&["N_phi", "W"]);
    for (j, &w) in result.distribution.iter().enumerate() {
        let n_phi = j as i64 + result.n_low - result.n0;
        t.rows.push(vec![Cell::Int(n_phi), Cell::Float(w)]);
    }
    t
}

/// Capture report as a single-row JSON-friendly table is not useful; the
/// report serializes directly. Provided for the CSV format anyway.
pub fn capture_table(report: &CaptureReport) -> Table {
    let mut t = Table::new(&[
        "system",
        "mass_ratio",
        "sigma_at_vp_m2",
        "sigma_at_u_m2",
        "w_q",
        "halo_radius_rp",
        "m_cap_grams",
        "reduction_factor",
        "one_photon_energy_cut",
        "energy_cut_fraction",
        "accumulation_time_years",
    ]);
    t.rows.push(vec![
        Cell::Text(report.system.clone()),
        Cell::Float(report.mass_ratio),
        Cell::Float(report.sigma_at_vp_m2),
        Cell::Float(report.sigma_at_u_m2),
        Cell::Float(report.w_q),
        Cell::Float(report.halo_radius_rp),
        Cell::Float(report.m_cap_grams),
        Cell::Float(report.reduction_factor),
        Cell::Text(report.one_photon_energy_cut.to_string()),
        Cell::Float(report.energy_cut_fraction),
        Cell::Float(report.accumulation_time_years),
    ]);
    t
}

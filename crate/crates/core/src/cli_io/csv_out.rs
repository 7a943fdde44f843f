//! CSV tables plus a JSON metadata sidecar.
//!
//! Numbers are written with 12 significant digits, `,` separated, LF line
//! endings, always with a header row. Frequencies are `Ω/2π` in MHz.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::ConfigFile;
use crate::experiments::{PreviewTable, ScenarioSpec, SweepRecord};
use crate::propagator::{max_intermediate_population, TraceRecord};
use crate::pulses::mhz_from_angular;
use crate::{Error, Result};

/// A result ready for tabulation.
#[derive(Clone, Copy, Debug)]
pub enum Record<'a> {
    Trace(&'a TraceRecord),
    Sweep(&'a SweepRecord),
    Preview(&'a PreviewTable),
}

impl Record<'_> {
    pub fn slug(&self) -> &'static str {
        match self {
            Record::Trace(_) => "trace",
            Record::Sweep(r) => r.kind.slug(),
            Record::Preview(_) => "pulses",
        }
    }

    pub fn to_table(&self) -> Table {
        match self {
            Record::Trace(r) => Table {
                header: strings(&["t_us", "pop_0", "pop_m1", "pop_p1"]),
                rows: r
                    .times
                    .iter()
                    .zip(&r.populations)
                    .map(|(&t, p)| vec![fmt_g(t), fmt_g(p[0]), fmt_g(p[1]), fmt_g(p[2])])
                    .collect(),
            },
            Record::Sweep(r) => {
                let mut header = vec!["protocol".to_string()];
                header.extend(r.columns.iter().cloned());
                header.extend(strings(&["efficiency", "max_intermediate"]));
                let mut rows = Vec::with_capacity(r.series.len() * r.points.len());
                for s in &r.series {
                    for (i, point) in r.points.iter().enumerate() {
                        let mut row = vec![s.protocol.name().to_string()];
                        row.extend(point.iter().map(|&v| fmt_g(v)));
                        row.push(fmt_g(s.efficiency[i]));
                        row.push(fmt_g(s.max_intermediate[i]));
                        rows.push(row);
                    }
                }
                Table { header, rows }
            }
            Record::Preview(r) => Table {
                header: strings(&[
                    "t_us",
                    "omega_s_mhz_over_2pi",
                    "omega_p_mhz_over_2pi",
                    "abs_omega_a_mhz_over_2pi",
                ]),
                rows: (0..r.times.len())
                    .map(|i| {
                        vec![
                            fmt_g(r.times[i]),
                            fmt_g(mhz_from_angular(r.omega_s[i])),
                            fmt_g(mhz_from_angular(r.omega_p[i])),
                            r.abs_omega_a
                                .as_ref()
                                .map_or_else(String::new, |a| fmt_g(mhz_from_angular(a[i]))),
                        ]
                    })
                    .collect(),
            },
        }
    }

    fn summary(&self) -> serde_json::Value {
        match self {
            Record::Trace(r) => json!({
                "efficiency": r.efficiency,
                "max_intermediate": max_intermediate_population(r),
            }),
            Record::Sweep(r) => json!({ "shape": r.shape, "axes": r.axes }),
            Record::Preview(r) => json!({ "points": r.times.len() }),
        }
    }
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Text table as written to / read from disk.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric column; empty cells become `NaN`.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .map(|row| match row[idx].as_str() {
                "" => Some(f64::NAN),
                cell => cell.parse().ok(),
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => format(format!("{other:?}")),
        })?;
    let header = reader
        .headers()
        .map_err(|e| format(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| format(e.to_string()))
        })
        .collect::<Result<_>>()?;
    Ok(Table { header, rows })
}

/// `%.12g`-style formatting.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Rust's `e` formatting rounds correctly, including carries into the exponent.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub metadata: PathBuf,
}

/// Stable 12-hex-digit digest of the scenario, used in file names. Output
/// options are not part of it, so the same run gets the same name anywhere.
pub fn scenario_hash(slug: &str, spec: &ScenarioSpec) -> String {
    let mut hasher = Sha256::new();
    hasher.update(slug.as_bytes());
    hasher.update(serde_json::to_string(spec).unwrap_or_default().as_bytes());
    hasher.finalize()[..6]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `<slug>-<hash>.csv` and `<slug>-<hash>.meta.json` into `dir`.
pub fn emit_csv(
    dir: &Path,
    record: Record<'_>,
    spec: &ScenarioSpec,
    resolved: &ConfigFile,
) -> Result<EmittedFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let slug = record.slug();
    let stem = format!("{slug}-{}", scenario_hash(slug, spec));
    let table = record.to_table();
    let csv = dir.join(format!("{stem}.csv"));
    table.write(&csv)?;
    let meta = json!({
        "scenario": slug,
        "version": env!("CARGO_PKG_VERSION"),
        "columns": table.header,
        "config": resolved,
        "spec": spec,
        "summary": record.summary(),
    });
    let metadata = dir.join(format!("{stem}.meta.json"));
    let text = serde_json::to_string_pretty(&meta).expect("metadata is serializable") + "\n";
    fs::write(&metadata, text).map_err(|e| Error::io(&metadata, e))?;
    Ok(EmittedFiles { csv, metadata })
}

//! CSV artifacts, a gnuplot script and a digest manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const PLOT_SCRIPT: &str = "plot.gp";

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(file: impl Into<String>, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::invalid(format!("{}: {e}", self.file));
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner()
            .map_err(|e| Error::invalid(format!("{}: {e}", self.file)))
    }
}

/// One line of the plot: columns `x` and `y` (1-based) of `file`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub file: String,
    pub x: usize,
    pub y: usize,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotSpec {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<PlotSeries>,
}

impl PlotSpec {
    pub fn script(&self) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set key outside right\n");
        s.push_str("set grid\n");
        s.push_str(&format!("set title '{}'\n", self.title));
        s.push_str(&format!("set xlabel '{}'\n", self.xlabel));
        s.push_str(&format!("set ylabel '{}'\n", self.ylabel));
        let lines: Vec<String> = self
            .series
            .iter()
            .map(|p| {
                format!(
                    "'{}' using {}:{} skip 1 with linespoints title '{}'",
                    p.file, p.x, p.y, p.title
                )
            })
            .collect();
        s.push_str(&format!("plot {}\n", lines.join(", \\\n     ")));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Results {
    pub tables: Vec<CsvTable>,
    pub plot: Option<PlotSpec>,
    /// Extra text files, e.g. an aligned summary.
    pub texts: Vec<(String, String)>,
}

impl Results {
    pub fn is_empty(&self) -> bool {
        self.tables.is_empty() && self.texts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

fn write_file(dir: &Path, name: &str, data: &[u8]) -> Result<ManifestEntry> {
    let path = dir.join(name);
    fs::write(&path, data).map_err(|e| Error::io(&path, e))?;
    Ok(ManifestEntry {
        file: name.to_string(),
        bytes: data.len() as u64,
        sha256: hex(&Sha256::digest(data)),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes every table and text, the plot script when there is data to plot,
/// and `manifest.json` listing them (the manifest does not list itself).
pub fn write_outputs(results: &Results, out_dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut manifest = Manifest::default();
    for t in &results.tables {
        manifest.files.push(write_file(out_dir, &t.file, &t.bytes()?)?);
    }
    for (name, text) in &results.texts {
        manifest.files.push(write_file(out_dir, name, text.as_bytes())?);
    }
    if let Some(plot) = results.plot.as_ref().filter(|p| !p.series.is_empty()) {
        manifest
            .files
            .push(write_file(out_dir, PLOT_SCRIPT, plot.script().as_bytes())?);
    }
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    let path: PathBuf = out_dir.join(MANIFEST);
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Left-aligned text table.
pub fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header) + "\n";
    for r in rows {
        out += &line(r);
        out.push('\n');
    }
    out
}

//! CSV files written by the experiment driver.
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a cell gives
//! back the exact `f64` and reruns produce identical bytes.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Shortest representation that parses back to `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// File-name form of a number: `0.025` → `0.025`, `1e-6` → `1e-6`.
pub fn tag(x: f64) -> String {
    fmt_f64(x).replace('+', "")
}

/// Writes one CSV file with a header row.
pub struct CsvTable {
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvTable {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        self.writer.write_record(values.iter().map(|v| fmt_f64(*v)))?;
        Ok(())
    }

    /// A row whose cells are already formatted.
    pub fn raw(&mut self, cells: &[String]) -> Result<()> {
        self.writer.write_record(cells)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Writes `columns` side by side; all columns must have the same length.
pub fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    debug_assert_eq!(header.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut t = CsvTable::create(path, header)?;
    let mut buf = vec![0.0; columns.len()];
    for i in 0..rows {
        for (b, c) in buf.iter_mut().zip(columns) {
            *b = c[i];
        }
        t.row(&buf)?;
    }
    t.finish()
}

/// Output file names.
#[derive(Clone, Debug)]
pub struct OutputDir(pub PathBuf);

impl OutputDir {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self> {
        let p = path.into();
        fs::create_dir_all(&p)?;
        Ok(Self(p))
    }
    pub fn path(&self) -> &Path {
        &self.0
    }
    pub fn timeseries(&self) -> PathBuf {
        self.0.join("timeseries.csv")
    }
    pub fn profile(&self, t: f64) -> PathBuf {
        self.0.join(format!("profile_{}.csv", tag(t)))
    }
    pub fn convergence(&self) -> PathBuf {
        self.0.join("convergence.csv")
    }
    pub fn eps_sweep(&self) -> PathBuf {
        self.0.join("eps_sweep.csv")
    }
    pub fn stationary(&self, eps: f64) -> PathBuf {
        self.0.join(format!("stationary_{}.csv", tag(eps)))
    }
    pub fn ftilde(&self, station: f64) -> PathBuf {
        self.0.join(format!("ftilde_{}.csv", tag(station)))
    }
    pub fn selfsim(&self) -> PathBuf {
        self.0.join("selfsim.csv")
    }
    pub fn mass_sweep(&self) -> PathBuf {
        self.0.join("mass_sweep.csv")
    }
    pub fn refinements(&self) -> PathBuf {
        self.0.join("refinements.csv")
    }
    pub fn config(&self) -> PathBuf {
        self.0.join("config.txt")
    }
    pub fn sub(&self, name: &str) -> Result<Self> {
        Self::create(self.0.join(name))
    }
}

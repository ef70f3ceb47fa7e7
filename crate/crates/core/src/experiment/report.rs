//! CSV, JSON and aligned-text emission. Output bytes depend only on the
//! result values, so reruns of a fixed configuration produce identical files.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::bench::QuantRow;
use super::sweep::ExperimentResult;
use crate::error::{Error, Result};
use crate::stats::Table1Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Text => "txt",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "text" | "txt" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// A rectangular table of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (wd, c) in widths.iter_mut().zip(r) {
                *wd = (*wd).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &wd)| format!("{c:>wd$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(w, "{}", line(&self.header))?;
        for r in &self.rows {
            writeln!(w, "{}", line(r))?;
        }
        Ok(())
    }
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| fmt(x, prec)).unwrap_or_default()
}

fn fmt(x: f64, prec: usize) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.prec$}")
    }
}

pub fn sweep_table(result: &ExperimentResult) -> Table {
    let header = [
        "of", "architecture", "lattice", "quantizer", "channel", "snr_db", "bits", "algorithm",
        "n_trials", "successes", "recovery_rate", "mse", "mse_db", "master_seed", "error",
    ];
    let rows = result
        .cells
        .iter()
        .map(|c| {
            vec![
                format!("{}", c.of),
                c.architecture.clone(),
                c.lattice.clone(),
                c.quantizer.clone(),
                c.channel.clone(),
                opt(c.snr_db, 1),
                c.bits.map(|b| b.to_string()).unwrap_or_default(),
                c.algorithm.clone(),
                c.n_trials.to_string(),
                c.successes.to_string(),
                fmt(c.recovery_rate, 3),
                c.mse.map(|m| format!("{m:.6e}")).unwrap_or_default(),
                opt(c.mse_db, 3),
                c.master_seed.to_string(),
                c.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    Table { header: header.iter().map(|s| s.to_string()).collect(), rows }
}

pub fn table1_table(rows: &[Table1Row]) -> Table {
    let header = ["lattice", "n", "G", "G_std_err", "V_over_cube", "mse_ratio", "source"];
    Table {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.lattice.clone(),
                    r.n.to_string(),
                    fmt(r.g, 5),
                    r.g_std_err.map(|e| format!("{e:.1e}")).unwrap_or_default(),
                    if r.volume_ratio < 1e-3 { format!("{:.3e}", r.volume_ratio) } else { fmt(r.volume_ratio, 3) },
                    fmt(r.mse_ratio, 3),
                    if r.estimated { "estimated" } else { "constant, not estimated" }.into(),
                ]
            })
            .collect(),
    }
}

pub fn quant_table(rows: &[QuantRow]) -> Table {
    let header = ["lattice", "quantizer", "bits", "empirical_mse", "std_err", "predicted_mse", "ratio"];
    Table {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.lattice.clone(),
                    r.quantizer.clone(),
                    r.bits.to_string(),
                    format!("{:.6e}", r.empirical_mse),
                    format!("{:.2e}", r.std_err),
                    format!("{:.6e}", r.predicted_mse),
                    fmt(r.empirical_mse / r.predicted_mse, 4),
                ]
            })
            .collect(),
    }
}

/// Writes `table` (or `json` for the JSON format) to `w`.
pub fn emit<W: Write, T: Serialize + ?Sized>(
    table: &Table,
    json: &T,
    format: OutputFormat,
    mut w: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => table.write_csv(w),
        OutputFormat::Text => table.write_text(w),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, json)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

/// Writes a sweep result to `dir/<stem>.<ext>` and returns the path.
pub fn emit_tables(result: &ExperimentResult, dir: &Path, stem: &str, format: OutputFormat) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let file = fs::File::create(&path)?;
    emit(&sweep_table(result), result, format, std::io::BufWriter::new(file))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep_is_header_only() {
        let r = ExperimentResult { name: "x".into(), cells: vec![] };
        let mut buf = Vec::new();
        emit(&sweep_table(&r), &r, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("of,architecture,"));
    }

    #[test]
    fn aligned_text() {
        let t = Table {
            header: vec!["a".into(), "bbb".into()],
            rows: vec![vec!["1000".into(), "2".into()]],
        };
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "   a  bbb\n1000    2\n");
    }
}

//! Flat-file outputs: regret-curve CSV, summary JSON and trace files.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::Report;
use crate::base::trace::Trace;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,mean_regret,stderr";
pub const CURVE_FILE: &str = "curve.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRACE_FILE: &str = "trace.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}`; expected csv or json"))),
        }
    }
}

pub fn curve_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &report.curve {
        let _ = writeln!(out, "{},{},{}", p.t, p.mean_regret, p.stderr);
    }
    out
}

/// Summary with the config echo, checkpoints and bound comparisons.
pub fn summary_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the requested artifact into `dir` and returns its path.
pub fn emit_report(report: &Report, format: Format, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (name, body) = match format {
        Format::Csv => (CURVE_FILE, curve_csv(report)),
        Format::Json => (SUMMARY_FILE, summary_json(report)),
    };
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

/// Both the curve and the summary.
pub fn emit_all(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        emit_report(report, Format::Csv, dir)?,
        emit_report(report, Format::Json, dir)?,
    ])
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer(&mut w, trace).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Parses a curve CSV back into `(t, mean, stderr)` rows.
pub fn read_curve_csv(path: &Path) -> Result<Vec<(usize, f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let bad = |reason: String| Error::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(bad("missing header".into()));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(format!("expected 3 fields in `{line}`")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(e.to_string()));
            let t = f[0].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            Ok((t, num(f[1])?, num(f[2])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::runner::{replicate, run_experiment};

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
policy = "hwc"
horizon = 300
replications = 3
emit_curve = true
checkpoints = [100]
[params]
eta = 0.4
[env]
kind = "adversarial"
dim = 4
generator = { name = "random", lo = 0.0, hi = 1.0 }
"#,
        )
        .unwrap()
    }

    #[test]
    fn csv_header_and_checkpoint_consistency() {
        let dir = tempfile::tempdir().unwrap();
        let report = replicate(&cfg()).unwrap();
        let path = emit_report(&report, Format::Csv, dir.path()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next(), Some("t,mean_regret,stderr"));
        let rows = read_curve_csv(&path).unwrap();
        let cp = &report.checkpoints[0];
        let row = rows.iter().find(|r| r.0 == cp.t).unwrap();
        assert_eq!((row.1, row.2), (cp.mean_regret, cp.stderr));
        assert_eq!(rows.last().unwrap().0, 300);
    }

    #[test]
    fn summary_round_trips_through_config_parser() {
        let dir = tempfile::tempdir().unwrap();
        let report = replicate(&cfg()).unwrap();
        let path = emit_report(&report, Format::Json, dir.path()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        let back = ExperimentConfig::from_json_value(v["config"].clone()).unwrap();
        assert_eq!(back, cfg());
        assert_eq!(v["bounds"][0]["name"], "leader");
    }

    #[test]
    fn traces_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        write_trace(&run_experiment(&cfg()).unwrap(), &a).unwrap();
        write_trace(&run_experiment(&cfg()).unwrap(), &b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(read_trace(&a).unwrap(), run_experiment(&cfg()).unwrap());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}

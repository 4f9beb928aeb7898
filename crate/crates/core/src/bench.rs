//! Benchmark matrix: every mode against every instance, with per-cell
//! timeout and memory cap, CSV rows and PAR-2 scores.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{parse_ensemble, GuardTable};
use crate::run::{cmd_count, Mode, RunConfig, RunReport, Status};

pub const CSV_HEADER: [&str; 9] = [
    "mode", "instance", "trees", "depth", "guards", "time_s", "count", "estimate", "status",
];

fn default_gap() -> f64 {
    2.0
}
fn default_distance() -> usize {
    1
}
fn default_accuracy() -> f64 {
    0.1
}
fn default_precision() -> u32 {
    3
}
fn default_timeout() -> f64 {
    1800.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchMatrix {
    #[serde(default)]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub instances: Vec<PathBuf>,
    #[serde(default)]
    pub sensitive: Vec<usize>,
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default = "default_distance")]
    pub distance: usize,
    #[serde(default = "default_accuracy")]
    pub epsilon: f64,
    #[serde(default = "default_accuracy")]
    pub delta: f64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub memory_cap_mb: Option<u64>,
}

impl BenchMatrix {
    /// Reads a matrix file; relative instance paths resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut m: BenchMatrix =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad matrix file: {e}")))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in &mut m.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(m)
    }

    fn config(&self, mode: Mode, instance: &Path) -> RunConfig {
        RunConfig {
            model: instance.to_path_buf(),
            sensitive: self.sensitive.clone(),
            gap: self.gap,
            distance: self.distance,
            epsilon: self.epsilon,
            delta: self.delta,
            precision: self.precision,
            seed: self.seed,
            mode,
            timeout_secs: Some(self.timeout_secs),
            memory_cap_mb: self.memory_cap_mb,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mode: Mode,
    pub instance: String,
    pub trees: Option<usize>,
    pub depth: Option<usize>,
    pub guards: Option<usize>,
    pub time_s: f64,
    pub count: Option<String>,
    pub estimate: Option<f64>,
    pub status: Status,
}

impl BenchRow {
    pub fn from_report(instance: &Path, r: &RunReport) -> Self {
        let shape = std::fs::read(instance)
            .ok()
            .and_then(|b| parse_ensemble(&b).ok())
            .map(|e| {
                let depth = e.trees().iter().map(|t| t.depth()).max().unwrap_or(0);
                (e.trees().len(), depth, GuardTable::build(&e).num_vars())
            });
        BenchRow {
            mode: r.mode,
            instance: instance.display().to_string(),
            trees: shape.map(|s| s.0),
            depth: shape.map(|s| s.1),
            guards: shape.map(|s| s.2),
            time_s: r.time_ms as f64 / 1000.0,
            count: r.count.as_ref().map(|c| c.to_biguint().to_string()),
            estimate: r.estimate,
            status: r.status,
        }
    }

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            self.mode.to_string(),
            self.instance.clone(),
            opt(self.trees.map(|v| v.to_string())),
            opt(self.depth.map(|v| v.to_string())),
            opt(self.guards.map(|v| v.to_string())),
            format!("{:.3}", self.time_s),
            opt(self.count.clone()),
            opt(self.estimate.map(|v| v.to_string())),
            serde_json::to_value(self.status).unwrap().as_str().unwrap().to_string(),
        ]
    }
}

/// Mean over cells of the runtime, with every unsolved cell charged twice
/// the timeout.
pub fn par2(rows: &[BenchRow], timeout_secs: f64) -> BTreeMap<Mode, f64> {
    let mut acc: BTreeMap<Mode, (f64, usize)> = BTreeMap::new();
    for r in rows {
        let cost = if r.status == Status::Ok { r.time_s } else { 2.0 * timeout_secs };
        let e = acc.entry(r.mode).or_default();
        e.0 += cost;
        e.1 += 1;
    }
    acc.into_iter().map(|(m, (sum, n))| (m, sum / n as f64)).collect()
}

pub fn run_matrix(m: &BenchMatrix) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for instance in &m.instances {
        for &mode in &m.modes {
            let report = cmd_count(&m.config(mode, instance));
            rows.push(BenchRow::from_report(instance, &report));
        }
    }
    rows
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(std::io::Error::other)?;
    for r in rows {
        w.write_record(r.record()).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_par2(scores: &BTreeMap<Mode, f64>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "par2_s"]).map_err(std::io::Error::other)?;
    for (m, s) in scores {
        w.write_record([m.to_string(), format!("{s:.3}")])
            .map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mode: Mode, time_s: f64, status: Status) -> BenchRow {
        BenchRow {
            mode,
            instance: "x".into(),
            trees: None,
            depth: None,
            guards: None,
            time_s,
            count: None,
            estimate: None,
            status,
        }
    }

    #[test]
    fn par2_without_timeouts_is_mean_runtime() {
        let rows = vec![
            row(Mode::ExactAdd, 1.0, Status::Ok),
            row(Mode::ExactAdd, 2.0, Status::Ok),
            row(Mode::ExactAdd, 3.0, Status::Ok),
            row(Mode::XcountPepin, 0.5, Status::Ok),
            row(Mode::XcountPepin, 0.5, Status::Ok),
            row(Mode::XcountPepin, 2.0, Status::Ok),
        ];
        let s = par2(&rows, 10.0);
        assert_eq!(s[&Mode::ExactAdd], 2.0);
        assert_eq!(s[&Mode::XcountPepin], 1.0);
    }

    #[test]
    fn timeout_costs_twice_the_limit() {
        let rows = vec![row(Mode::ExactAdd, 10.0, Status::Timeout), row(Mode::ExactAdd, 4.0, Status::Ok)];
        assert_eq!(par2(&rows, 10.0)[&Mode::ExactAdd], 12.0);
    }

    #[test]
    fn empty_matrix_writes_header_only() {
        let m: BenchMatrix = serde_json::from_str("{}").unwrap();
        let rows = run_matrix(&m);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
        assert!(par2(&rows, 1.0).is_empty());
    }

    #[test]
    fn matrix_defaults() {
        let m: BenchMatrix = serde_json::from_str(r#"{"modes": ["oracle", "xcount-pepin"]}"#).unwrap();
        assert_eq!(m.modes, vec![Mode::Oracle, Mode::XcountPepin]);
        assert_eq!((m.gap, m.distance, m.precision, m.timeout_secs), (2.0, 1, 3, 1800.0));
    }
}

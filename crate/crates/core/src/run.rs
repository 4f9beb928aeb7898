//! One counting run: load a model, dispatch to a counting mode, and produce
//! a machine-readable report.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::dd::{DdError, Limits};
use crate::error::{Error, Result};
use crate::exact::{exact_count_with, ExactQuery};
use crate::model::{parse_ensemble, scale_gap, Ensemble, MAX_PRECISION};
use crate::oracle::{oracle_count, DEFAULT_REGION_CAP};
use crate::xcount::{xcount, MergeMode, XcountQuery};

/// Overrides the memory cap (in MiB) of every run when set.
pub const MEM_CAP_ENV: &str = "TREESENS_MEM_CAP_MB";

/// Share of the memory cap granted to diagram tables; the rest covers
/// table resizing, traversal memos and the process itself.
const DD_SHARE_OF_CAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Oracle,
    ExactAdd,
    XcountExactMerge,
    XcountPepin,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Oracle, Mode::ExactAdd, Mode::XcountExactMerge, Mode::XcountPepin];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Oracle => "oracle",
            Mode::ExactAdd => "exact-add",
            Mode::XcountExactMerge => "xcount-exact-merge",
            Mode::XcountPepin => "xcount-pepin",
        }
    }

    pub fn is_exact(self) -> bool {
        self != Mode::XcountPepin
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: PathBuf,
    pub sensitive: Vec<usize>,
    /// In model units; multiplied by `10^precision` before counting.
    pub gap: f64,
    pub distance: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub precision: u32,
    pub seed: u64,
    pub mode: Mode,
    pub timeout_secs: Option<f64>,
    pub memory_cap_mb: Option<u64>,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(model: impl Into<PathBuf>, sensitive: Vec<usize>, mode: Mode) -> Self {
        RunConfig {
            model: model.into(),
            sensitive,
            gap: 2.0,
            distance: 1,
            epsilon: 0.1,
            delta: 0.1,
            precision: 3,
            seed: 0,
            mode,
            timeout_secs: None,
            memory_cap_mb: None,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.precision > MAX_PRECISION {
            return bad(format!("precision must be at most {MAX_PRECISION}, got {}", self.precision));
        }
        if self.sensitive.is_empty() {
            return bad("the sensitive feature list is empty".into());
        }
        if !self.gap.is_finite() {
            return bad(format!("gap must be finite, got {}", self.gap));
        }
        if let Some(t) = self.timeout_secs {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("timeout must be positive, got {t}"));
            }
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    /// The configured cap, unless the environment overrides it.
    pub fn effective_memory_cap_mb(&self) -> Option<u64> {
        std::env::var(MEM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .or(self.memory_cap_mb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    ParseError,
    InvalidConfig,
    Timeout,
    MemoryCap,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::ParseError => 2,
            Status::InvalidConfig => 3,
            Status::Timeout => 4,
            Status::MemoryCap => 5,
        }
    }

    fn of(err: &Error) -> Status {
        match err {
            Error::Model(_) | Error::Io(_) => Status::ParseError,
            Error::Config(_) | Error::OracleCapExceeded { .. } | Error::GuardNotInTable { .. } => {
                Status::InvalidConfig
            }
            Error::Dd(DdError::Timeout) => Status::Timeout,
            Error::Dd(DdError::NodeLimit { .. } | DdError::MemoryLimit { .. }) => Status::MemoryCap,
            Error::Dd(_) => Status::Error,
        }
    }
}

/// An exact count: a JSON number when it fits 64 bits, a decimal string
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CountValue {
    Small(u64),
    Big(String),
}

impl From<&BigUint> for CountValue {
    fn from(c: &BigUint) -> Self {
        match c.to_u64() {
            Some(v) => CountValue::Small(v),
            None => CountValue::Big(c.to_string()),
        }
    }
}

impl CountValue {
    pub fn to_biguint(&self) -> BigUint {
        match self {
            CountValue::Small(v) => BigUint::from(*v),
            CountValue::Big(s) => s.parse().expect("count strings are decimal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    /// Exact count; absent for estimates and failed runs.
    pub count: Option<CountValue>,
    pub estimate: Option<f64>,
    /// `estimate` rounded to the nearest integer.
    pub estimate_rounded: Option<CountValue>,
    pub num_subproblems: Option<usize>,
    pub sat_subproblems: Option<usize>,
    pub thresh: Option<f64>,
    pub final_p: Option<f64>,
    pub seed: u64,
    pub time_ms: u64,
    pub status: Status,
    pub message: Option<String>,
    pub total_regions: Option<CountValue>,
    pub peak_bytes: usize,
    /// Resident-set high-water mark of the whole process, when known.
    #[serde(default)]
    pub peak_rss_kb: Option<u64>,
    pub config: RunConfig,
}

impl RunReport {
    fn empty(cfg: &RunConfig) -> Self {
        RunReport {
            mode: cfg.mode,
            count: None,
            estimate: None,
            estimate_rounded: None,
            num_subproblems: None,
            sat_subproblems: None,
            thresh: None,
            final_p: None,
            seed: cfg.seed,
            time_ms: 0,
            status: Status::Ok,
            message: None,
            total_regions: None,
            peak_bytes: 0,
            peak_rss_kb: None,
            config: cfg.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One line of prose for humans.
    pub fn summary(&self) -> String {
        match (self.status, &self.count, self.estimate) {
            (Status::Ok, Some(c), _) => format!("{}: count {} in {} ms", self.mode, c.to_biguint(), self.time_ms),
            (Status::Ok, None, Some(e)) => format!(
                "{}: estimate {e} (p = {}) in {} ms",
                self.mode,
                self.final_p.unwrap_or(1.0),
                self.time_ms
            ),
            _ => format!(
                "{}: {:?} after {} ms: {}",
                self.mode,
                self.status,
                self.time_ms,
                self.message.as_deref().unwrap_or("")
            ),
        }
    }
}

/// `VmHWM` of the current process (Linux only).
pub fn process_peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Reads a model file and quantizes it.
pub fn load_model(path: &std::path::Path, precision: u32) -> Result<Ensemble> {
    let bytes = std::fs::read(path)?;
    let e = parse_ensemble(&bytes)?;
    Ok(e.quantize_leaves(precision)?)
}

pub fn limits_for(cfg: &RunConfig, start: Instant) -> Limits {
    Limits {
        deadline: cfg.timeout_secs.map(|t| start + Duration::from_secs_f64(t)),
        max_nodes: None,
        max_bytes: cfg
            .effective_memory_cap_mb()
            .map(|mb| (mb as f64 * (1u64 << 20) as f64 * DD_SHARE_OF_CAP) as usize),
    }
}

fn dispatch(cfg: &RunConfig, start: Instant, report: &mut RunReport) -> Result<()> {
    cfg.validate()?;
    let e = load_model(&cfg.model, cfg.precision)?;
    let gap = scale_gap(cfg.gap, cfg.precision)
        .ok_or_else(|| Error::Config(format!("gap {} overflows at precision {}", cfg.gap, cfg.precision)))?;
    let limits = limits_for(cfg, start);
    report.total_regions = Some(CountValue::from(&BigUint::from(crate::GuardTable::build(&e).num_regions())));
    match cfg.mode {
        Mode::Oracle => {
            let r = oracle_count(&e, &cfg.sensitive, cfg.distance, gap, DEFAULT_REGION_CAP)?;
            report.count = Some(CountValue::Small(r.count));
            report.estimate = Some(r.count as f64);
        }
        Mode::ExactAdd => {
            let r = exact_count_with(&e, &ExactQuery::new(cfg.sensitive.clone(), cfg.distance, gap), limits)?;
            report.estimate = r.count.to_f64();
            report.count = Some(CountValue::from(&r.count));
            report.peak_bytes = r.peak_bytes;
            report.message = r.warning;
        }
        Mode::XcountExactMerge | Mode::XcountPepin => {
            let merge = if cfg.mode == Mode::XcountPepin { MergeMode::Pepin } else { MergeMode::Exact };
            let q = XcountQuery::new(cfg.sensitive.clone(), cfg.distance, gap)
                .merge(merge)
                .accuracy(cfg.epsilon, cfg.delta)
                .seed(cfg.seed)
                .jobs(cfg.jobs);
            let r = xcount(&e, &q, limits)?;
            report.count = r.count.as_ref().map(CountValue::from);
            report.estimate = Some(r.estimate);
            report.num_subproblems = Some(r.num_subproblems);
            report.sat_subproblems = Some(r.sat_subproblems);
            report.thresh = r.thresh;
            report.final_p = Some(r.final_p);
            report.peak_bytes = r.peak_bytes;
            report.message = r.warning;
        }
    }
    Ok(())
}

/// Runs one configuration. Failures are reported through `status`, never as
/// an `Err`.
pub fn cmd_count(cfg: &RunConfig) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::empty(cfg);
    if let Err(err) = dispatch(cfg, start, &mut report) {
        report.status = Status::of(&err);
        report.message = Some(err.to_string());
        report.count = None;
        report.estimate = None;
    }
    report.estimate_rounded = report
        .estimate
        .and_then(|v| BigUint::from_f64(v.round()))
        .map(|c| CountValue::from(&c));
    report.time_ms = start.elapsed().as_millis() as u64;
    report
}

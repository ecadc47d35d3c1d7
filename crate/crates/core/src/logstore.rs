//! Append-only execution log, one JSON object per line.
//!
//! The first line of a log is a version header:
//!
//! ```text
//! {"format":"cloudburst-log","version":1}
//! {"environment":"local","processors":16,"elapsed":2.5,"unit":"hours","timestamp":"2026-01-01T00:00:00Z"}
//! ```
//!
//! A single process writes; readers may run concurrently.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{fit_profile_in, FitReport, TimeUnit, TimingObservation};

/// Environment variable naming the default log file.
pub const LOG_PATH_ENV: &str = "CLOUDBURST_LOG";

pub const FORMAT_NAME: &str = "cloudburst-log";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub environment: String,
    pub processors: u32,
    pub elapsed: f64,
    pub unit: TimeUnit,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job_tag: Option<String>,
}

impl ExecutionRecord {
    pub fn new(environment: impl Into<String>, processors: u32, elapsed: f64, unit: TimeUnit) -> Result<Self> {
        let record = ExecutionRecord {
            environment: environment.into(),
            processors,
            elapsed,
            unit,
            timestamp: Utc::now(),
            job_tag: None,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn with_timestamp(mut self, timestamp: DateTime<Utc>) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.job_tag = Some(tag.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.environment.trim().is_empty() {
            return Err(Error::InvalidEnvironment { name: self.environment.clone(), reason: "empty name".into() });
        }
        self.observation().map(|_| ())
    }

    pub fn observation(&self) -> Result<TimingObservation<f64>> {
        TimingObservation::new(self.processors, self.elapsed, self.unit)
    }
}

/// Parses an RFC 3339 instant such as `2026-01-01T12:00:00Z`.
pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::parse("<timestamp>", format!("`{text}`: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogStore {
    path: PathBuf,
}

impl LogStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        LogStore { path: path.into() }
    }

    /// Store at `$CLOUDBURST_LOG`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(LOG_PATH_ENV).filter(|p| !p.is_empty()).map(|p| LogStore::new(PathBuf::from(p)))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends one record and syncs it to disk. Creates the file, with its
    /// header, on first use.
    pub fn append(&self, record: &ExecutionRecord) -> Result<()> {
        record.validate()?;
        let io = |e| Error::io(&self.path, e);
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(io)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path).map_err(io)?;
        let mut text = String::new();
        if file.metadata().map_err(io)?.len() == 0 {
            let header = Header { format: FORMAT_NAME.into(), version: FORMAT_VERSION };
            text.push_str(&serde_json::to_string(&header).expect("header serializes"));
            text.push('\n');
        } else {
            self.check_header()?;
        }
        text.push_str(&serde_json::to_string(record).expect("records serialize"));
        text.push('\n');
        file.write_all(text.as_bytes()).map_err(io)?;
        file.sync_data().map_err(io)
    }

    fn check_header(&self) -> Result<()> {
        let file = fs::File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let mut first = String::new();
        BufReader::new(file).read_line(&mut first).map_err(|e| Error::io(&self.path, e))?;
        let header: Header =
            serde_json::from_str(first.trim()).map_err(|e| Error::parse(&self.path, format!("bad header: {e}")))?;
        if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
            return Err(Error::parse(
                &self.path,
                format!("unsupported log format {} version {}", header.format, header.version),
            ));
        }
        Ok(())
    }

    /// All records in append order. A missing file is an empty log.
    pub fn scan(&self) -> Result<Vec<ExecutionRecord>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        self.check_header()?;
        let file = fs::File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate().skip(1) {
            let line = line.map_err(|e| Error::io(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ExecutionRecord =
                serde_json::from_str(&line).map_err(|e| Error::parse(&self.path, format!("line {}: {e}", n + 1)))?;
            out.push(record);
        }
        Ok(out)
    }

    pub fn count(&self) -> Result<usize> {
        Ok(self.scan()?.len())
    }

    pub fn observations(&self, environment: &str) -> Result<Vec<TimingObservation<f64>>> {
        self.scan()?.iter().filter(|r| r.environment == environment).map(ExecutionRecord::observation).collect()
    }

    /// Fits a profile, in hours, to every record of `environment`.
    pub fn refit(&self, environment: &str) -> Result<FitReport<f64>> {
        fit_profile_in(&self.observations(environment)?, TimeUnit::Hours)
    }
}

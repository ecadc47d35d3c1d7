//! CSV output of sweeps and sensitivity runs.
//!
//! Every file starts with a `# config-sha256: <hex>` line followed by a
//! header row. Numbers are written in Rust's shortest round-trip form, so
//! the raw file parses back to exactly the values it was written from.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use crate::advisor::Policy;
use crate::error::{Error, Result};

use super::aggregate::{aggregate_by_ratio, RatioRow};
use super::config::SweepPoint;
use super::run::{Decider, Decision, PolicyRun, SweepResult, POLICIES};
use super::sensitivity::{SensitivityRecord, SensitivityRow};

pub const RAW_FILE: &str = "sweep_raw.csv";
pub const DEADLINE_FILE: &str = "deadline_by_ratio.csv";
pub const BUDGET_FILE: &str = "budget_by_ratio.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity_table.csv";
pub const SENSITIVITY_RAW_FILE: &str = "sensitivity_raw.csv";

const FINGERPRINT_PREFIX: &str = "# config-sha256: ";

const RAW_HEADER: [&str; 14] = [
    "index",
    "deadline_hours",
    "budget",
    "queue_fraction",
    "setup_fraction",
    "price_ratio",
    "policy",
    "decider",
    "chosen",
    "feasible",
    "total_processors",
    "cost",
    "turnaround_hours",
    "relative_to_local",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn render(fingerprint: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let body = writer.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(format!("{FINGERPRINT_PREFIX}{fingerprint}\n{}", String::from_utf8(body).expect("csv output is utf-8")))
}

pub fn render_raw(fingerprint: &str, results: &[SweepResult]) -> Result<String> {
    let rows = results.iter().flat_map(|r| {
        r.runs.iter().flat_map(move |run| {
            run.decisions.iter().map(move |d| {
                let p = &r.point;
                vec![
                    r.index.to_string(),
                    p.deadline_hours.to_string(),
                    p.budget.to_string(),
                    p.queue_fraction.to_string(),
                    p.setup_fraction.to_string(),
                    p.price_ratio.to_string(),
                    run.policy.to_string(),
                    d.decider.to_string(),
                    d.chosen.clone(),
                    d.feasible.to_string(),
                    d.total_processors.to_string(),
                    d.cost.to_string(),
                    d.turnaround_hours.to_string(),
                    opt(d.relative_to_local),
                ]
            })
        })
    });
    render(fingerprint, &RAW_HEADER, rows)
}

const RATIO_HEADER: [&str; 14] = [
    "price_ratio",
    "decider",
    "points",
    "included",
    "excluded",
    "min",
    "q1",
    "median",
    "mean",
    "q3",
    "max",
    "feasible",
    "local_chosen",
    "local_fraction",
];

pub fn render_by_ratio(fingerprint: &str, rows: &[RatioRow]) -> Result<String> {
    let rows = rows.iter().map(|r| {
        let s = r.summary;
        vec![
            r.price_ratio.to_string(),
            r.decider.to_string(),
            r.points.to_string(),
            r.included().to_string(),
            r.excluded.to_string(),
            opt(s.map(|s| s.min)),
            opt(s.map(|s| s.q1)),
            opt(s.map(|s| s.median)),
            opt(s.map(|s| s.mean)),
            opt(s.map(|s| s.q3)),
            opt(s.map(|s| s.max)),
            r.feasible.to_string(),
            r.local_chosen.to_string(),
            opt(r.local_fraction()),
        ]
    });
    render(fingerprint, &RATIO_HEADER, rows)
}

pub fn render_sensitivity_table(fingerprint: &str, rows: &[SensitivityRow]) -> Result<String> {
    let header = [
        "error",
        "decision",
        "deadline_avg",
        "deadline_std",
        "deadline_size",
        "deadline_fraction",
        "budget_avg",
        "budget_std",
        "budget_size",
        "budget_fraction",
    ];
    let rows = rows.iter().map(|r| {
        let mut row = vec![r.error.to_string(), if r.same_decision { "same" } else { "different" }.to_string()];
        for cell in [&r.deadline, &r.budget] {
            row.extend([cell.avg.to_string(), cell.std.to_string(), cell.size.to_string(), cell.fraction.to_string()]);
        }
        row
    });
    render(fingerprint, &header, rows)
}

pub fn render_sensitivity_raw(fingerprint: &str, records: &[SensitivityRecord]) -> Result<String> {
    let header = ["index", "policy", "error", "accurate", "inaccurate", "same_decision", "relative_delta"];
    let rows = records.iter().map(|r| {
        vec![
            r.index.to_string(),
            r.policy.to_string(),
            r.error.to_string(),
            r.accurate.clone(),
            r.inaccurate.clone(),
            r.same_decision.to_string(),
            r.relative_delta.to_string(),
        ]
    });
    render(fingerprint, &header, rows)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the raw results and both per-ratio aggregates into `dir`.
pub fn write_sweep(dir: &Path, fingerprint: &str, results: &[SweepResult]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let deadline = aggregate_by_ratio(results, Policy::DeadlineAware)?;
    let budget = aggregate_by_ratio(results, Policy::BudgetAware)?;
    Ok(vec![
        write(dir, RAW_FILE, &render_raw(fingerprint, results)?)?,
        write(dir, DEADLINE_FILE, &render_by_ratio(fingerprint, &deadline)?)?,
        write(dir, BUDGET_FILE, &render_by_ratio(fingerprint, &budget)?)?,
    ])
}

pub fn write_sensitivity(
    dir: &Path,
    fingerprint: &str,
    records: &[SensitivityRecord],
    table: &[SensitivityRow],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write(dir, SENSITIVITY_RAW_FILE, &render_sensitivity_raw(fingerprint, records)?)?,
        write(dir, SENSITIVITY_FILE, &render_sensitivity_table(fingerprint, table)?)?,
    ])
}

/// Fingerprint stamped on the first line of an output file.
pub fn read_fingerprint(path: &Path) -> Result<String> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut first = String::new();
    std::io::BufReader::new(file).read_line(&mut first).map_err(|e| Error::io(path, e))?;
    first
        .trim_end()
        .strip_prefix(FINGERPRINT_PREFIX)
        .map(str::to_string)
        .ok_or_else(|| Error::parse(path, "missing config fingerprint line"))
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, path: &Path) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record.get(i).ok_or_else(|| Error::parse(path, format!("missing column {}", RAW_HEADER[i])))?;
    raw.parse().map_err(|e: T::Err| Error::parse(path, format!("column {}: {e}", RAW_HEADER[i])))
}

/// Parses a raw results file back into sweep results.
pub fn read_raw(path: &Path) -> Result<(String, Vec<SweepResult>)> {
    let fingerprint = read_fingerprint(path)?;
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = reader.headers()?.clone();
    if header.iter().ne(RAW_HEADER.iter().copied()) {
        return Err(Error::parse(path, "unexpected header"));
    }
    let mut results: Vec<SweepResult> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let index: usize = field(&record, 0, path)?;
        let point = SweepPoint {
            deadline_hours: field(&record, 1, path)?,
            budget: field(&record, 2, path)?,
            queue_fraction: field(&record, 3, path)?,
            setup_fraction: field(&record, 4, path)?,
            price_ratio: field(&record, 5, path)?,
        };
        let policy: Policy = field(&record, 6, path)?;
        let relative = record.get(13).unwrap_or("");
        let decision = Decision {
            decider: field::<Decider>(&record, 7, path)?,
            chosen: field(&record, 8, path)?,
            feasible: field(&record, 9, path)?,
            total_processors: field(&record, 10, path)?,
            cost: field(&record, 11, path)?,
            turnaround_hours: field(&record, 12, path)?,
            relative_to_local: if relative.is_empty() { None } else { Some(field(&record, 13, path)?) },
        };
        if results.last().map(|r| r.index) != Some(index) {
            results.push(SweepResult { index, point, runs: Vec::with_capacity(POLICIES.len()) });
        }
        let result = results.last_mut().expect("just pushed");
        if result.runs.last().map(|r| r.policy) != Some(policy) {
            result.runs.push(PolicyRun { policy, decisions: Vec::new() });
        }
        result.runs.last_mut().expect("just pushed").decisions.push(decision);
    }
    Ok((fingerprint, results))
}

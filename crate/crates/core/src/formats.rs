//! On-disk formats: profile TOML, observation CSV, price-table CSV.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{PriceRow, PriceTable};
use crate::error::{Error, Result};
use crate::profile::{ApplicationProfile, TimeUnit, TimingObservation};

/// Profile file:
///
/// ```toml
/// a = 1013.5
/// b = -1.58
/// time_unit = "hours"
/// fit_residual = 0.01      # optional
/// observed_p_range = [10, 40]   # optional
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub a: f64,
    pub b: f64,
    pub time_unit: TimeUnit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_p_range: Option<[u32; 2]>,
}

impl ProfileDoc {
    pub fn from_profile(profile: &ApplicationProfile<f64>, fit_residual: Option<f64>) -> Self {
        ProfileDoc {
            a: profile.a(),
            b: profile.b(),
            time_unit: profile.time_unit(),
            fit_residual,
            observed_p_range: profile.observed_range().map(|(lo, hi)| [lo, hi]),
        }
    }

    pub fn to_profile(&self) -> Result<ApplicationProfile<f64>> {
        let profile = ApplicationProfile::new(self.a, self.b, self.time_unit)?;
        match self.observed_p_range {
            Some([lo, hi]) => profile.with_observed_range(lo, hi),
            None => Ok(profile),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("<profile>", e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile documents always serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Deserialize)]
struct ObservationRow {
    processors: u32,
    elapsed: f64,
    #[serde(default)]
    unit: Option<String>,
}

/// Reads `processors,elapsed[,unit]` rows. Rows without a unit use `default_unit`.
pub fn parse_observations(input: impl Read, default_unit: TimeUnit) -> Result<Vec<TimingObservation<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize::<ObservationRow>() {
        let row = row?;
        let unit = match row.unit.as_deref().map(str::trim) {
            None | Some("") => default_unit,
            Some(u) => u.parse().map_err(|m: String| Error::parse("<observations>", m))?,
        };
        out.push(TimingObservation::new(row.processors, row.elapsed, unit)?);
    }
    Ok(out)
}

pub fn read_observations(path: &Path, default_unit: TimeUnit) -> Result<Vec<TimingObservation<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_observations(file, default_unit).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        Error::Csv(c) if !c.is_io_error() => Error::parse(path, c),
        other => other,
    })
}

#[derive(Deserialize)]
struct PriceCsvRow {
    cores: u32,
    cost_per_hour: f64,
}

/// Reads a `cores,cost_per_hour` table.
pub fn parse_price_table(input: impl Read, memory_per_core: &str) -> Result<PriceTable<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let rows = reader
        .deserialize::<PriceCsvRow>()
        .map(|r| r.map(|r| PriceRow { cores: r.cores, hourly_cost: r.cost_per_hour }).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    PriceTable::new(memory_per_core, rows)
}

pub fn read_price_table(path: &Path) -> Result<PriceTable<f64>> {
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_price_table(file, &label).map_err(|e| match e {
        Error::Csv(c) if !c.is_io_error() => Error::parse(path, c),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_doc_round_trip() {
        let doc = ProfileDoc { a: 1013.5, b: -1.58, time_unit: TimeUnit::Hours, fit_residual: Some(0.01), observed_p_range: Some([10, 40]) };
        let back = ProfileDoc::from_toml(&doc.to_toml()).unwrap();
        assert_eq!(back, doc);
        let p = back.to_profile().unwrap();
        assert_eq!(p.observed_range(), Some((10, 40)));
        assert_eq!(ProfileDoc::from_profile(&p, Some(0.01)), doc);
    }

    #[test]
    fn profile_doc_rejects_bad_exponent() {
        let doc = ProfileDoc::from_toml("a = 10.0\nb = 0.5\ntime_unit = \"minutes\"\n").unwrap();
        assert!(doc.to_profile().is_err());
        assert!(ProfileDoc::from_toml("a = 10.0\n").is_err());
    }

    #[test]
    fn observations_with_and_without_units() {
        let text = "processors,elapsed,unit\n10,60,minutes\n20,0.5,hours\n40,900,\n";
        let obs = parse_observations(text.as_bytes(), TimeUnit::Seconds).unwrap();
        assert_eq!(obs.len(), 3);
        assert_eq!(obs[0].elapsed_in(TimeUnit::Hours), 1.0);
        assert_eq!(obs[1].elapsed_in(TimeUnit::Minutes), 30.0);
        assert_eq!(obs[2].elapsed_in(TimeUnit::Minutes), 15.0);

        let bare = parse_observations("processors,elapsed\n1,3.0\n".as_bytes(), TimeUnit::Hours).unwrap();
        assert_eq!(bare[0].elapsed_in(TimeUnit::Hours), 3.0);
    }

    #[test]
    fn observations_reject_bad_rows() {
        assert!(parse_observations("processors,elapsed\n0,3.0\n".as_bytes(), TimeUnit::Hours).is_err());
        assert!(parse_observations("processors,elapsed\n4,-1\n".as_bytes(), TimeUnit::Hours).is_err());
        assert!(parse_observations("processors,elapsed,unit\n4,1,fortnights\n".as_bytes(), TimeUnit::Hours).is_err());
    }

    #[test]
    fn price_table_csv() {
        let table = parse_price_table("cores,cost_per_hour\n1,0.05\n2,0.10\n".as_bytes(), "x").unwrap();
        assert_eq!(table.rows().len(), 2);
        assert!(parse_price_table("cores,cost_per_hour\n2,0.05\n1,0.10\n".as_bytes(), "x").is_err());
    }
}

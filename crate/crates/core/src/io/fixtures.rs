//! Calibration and force fixtures: CSV readers and the bundled data sets.

use std::path::Path;

use serde::Deserialize;

use crate::design::{CalibrationDataset, CalibrationPoint, ForceFixture};
use crate::io::ConfigError;

/// Straight-line 2:1 transmission data ending at 44 N in, 22 N out.
pub const BUNDLED_TRANSMISSION: &str = include_str!("../../fixtures/transmission_2to1.csv");
/// Per-digit mean fingertip forces without input tensions.
pub const BUNDLED_FINGER_FORCES: &str = include_str!("../../fixtures/finger_forces.csv");

#[derive(Deserialize)]
struct PointRecord {
    #[serde(rename = "T_o")]
    tension: f64,
    #[serde(rename = "P_tip")]
    force: f64,
}

#[derive(Deserialize)]
struct ForceRecord {
    finger: String,
    #[serde(rename = "P_tip")]
    force: f64,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(source: &str, e: csv::Error) -> ConfigError {
    let line = e.position().map(|p| p.line());
    ConfigError::Parse {
        origin: source.to_string(),
        path: String::new(),
        line: line.map(|l| l as usize),
        message: e.to_string(),
    }
}

/// Parses `T_o,P_tip` rows.
pub fn parse_calibration(
    text: &str,
    label: &str,
    source: &str,
) -> Result<CalibrationDataset, ConfigError> {
    let mut points = Vec::new();
    for rec in reader(text).deserialize::<PointRecord>() {
        let rec = rec.map_err(|e| csv_error(source, e))?;
        points.push(CalibrationPoint {
            tension: rec.tension,
            force: rec.force,
        });
    }
    CalibrationDataset::new(label, points).map_err(|e| ConfigError::Invalid {
        field: format!("{source}: {}", field_of(&e)),
        message: e.to_string(),
    })
}

/// Parses `finger,P_tip` rows.
pub fn parse_finger_forces(text: &str, source: &str) -> Result<Vec<ForceFixture>, ConfigError> {
    reader(text)
        .deserialize::<ForceRecord>()
        .map(|r| {
            let r = r.map_err(|e| csv_error(source, e))?;
            Ok(ForceFixture {
                label: r.finger,
                force: r.force,
            })
        })
        .collect()
}

pub fn load_calibration(path: &Path, label: &str) -> Result<CalibrationDataset, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_calibration(&text, label, &path.display().to_string())
}

pub fn load_finger_forces(path: &Path) -> Result<Vec<ForceFixture>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_finger_forces(&text, &path.display().to_string())
}

fn field_of(e: &crate::ModelError) -> &'static str {
    match e {
        crate::ModelError::Domain { field, .. } => field,
        _ => "data",
    }
}

//! Run configuration: a JSON document plus command-line overrides.
//!
//! Lengths are millimetres, forces newtons and angles radians. Angle fields
//! also accept strings with an explicit unit, `"90 deg"` or `"1.2 rad"`.
//!
//! ```json
//! {
//!   "design":   { "segments": 3, "length_mm": 15, "depth_mm": 6, "loss": 0.70289,
//!                 "tip_length_mm": 7.5, "tip_inclination": 0 },
//!   "scenario": { "radius_mm": 45, "tension_n": 44 },
//!   "space":    { "depth_mm": { "min": 3, "max": 10, "steps": 8 } },
//!   "rom":      { "digit": "finger", "sd_multiplier": 1,
//!                 "limits": { "PIP": { "flexion": "101 deg" } } },
//!   "requirement": { "mass_kg": 1, "mu": 0.4, "safety_factor": 2, "contacts": 2 },
//!   "output":   { "csv": "out.csv", "json": "out.json" }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::design::{
    Axis, CountRange, DesignSpace, Digit, GripRequirement, NelderMeadSettings, RomLimits,
};
use crate::error::ModelError;
use crate::geometry::{GraspScenario, PhalangeDesign, SegmentGeometry, Tolerances};
use crate::io::ConfigError;
use crate::statics::StaticsOptions;

/// Loss coefficient that reproduces the 2:1 transmission of the bundled
/// calibration data for the default geometry and scenario.
pub const DEFAULT_LOSS: f64 = 0.702_893_221_7;
pub const DEFAULT_SEGMENTS: usize = 3;
pub const DEFAULT_LENGTH_MM: f64 = 15.0;
pub const DEFAULT_DEPTH_MM: f64 = 6.0;
pub const DEFAULT_RADIUS_MM: f64 = 45.0;
pub const DEFAULT_TENSION_N: f64 = 44.0;

/// An angle in radians, parsed from a number (radians) or `"<value> deg|rad"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "AngleRepr")]
pub struct Angle(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<AngleRepr> for Angle {
    type Error = String;

    fn try_from(r: AngleRepr) -> Result<Self, String> {
        match r {
            AngleRepr::Number(v) => Ok(Angle(v)),
            AngleRepr::Text(s) => parse_angle(&s).map(Angle),
        }
    }
}

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, unit) = if let Some(v) = t.strip_suffix("deg") {
        (v, "deg")
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, "rad")
    } else {
        return Err(format!(
            "angle {s:?} needs an explicit 'deg' or 'rad' suffix"
        ));
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("angle {s:?} has no numeric value"))?;
    Ok(if unit == "deg" { v.to_radians() } else { v })
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDesign {
    pub segments: Option<usize>,
    pub length_mm: Option<f64>,
    pub depth_mm: Option<f64>,
    pub loss: Option<f64>,
    pub tip_length_mm: Option<f64>,
    pub tip_inclination: Option<Angle>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub radius_mm: Option<f64>,
    #[serde(default)]
    pub flat: bool,
    pub tension_n: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCalibration {
    pub file: Option<PathBuf>,
    pub label: Option<String>,
    pub finger_forces: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    pub segments: Option<CountRange>,
    pub length_mm: Option<Axis>,
    pub depth_mm: Option<Axis>,
    pub loss: Option<Axis>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawJointLimit {
    pub flexion: Option<Angle>,
    pub flexion_sd: Option<Angle>,
    pub extension: Option<Angle>,
    pub extension_sd: Option<Angle>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRom {
    pub digit: Option<Digit>,
    pub sd_multiplier: Option<f64>,
    #[serde(default)]
    pub limits: std::collections::BTreeMap<String, RawJointLimit>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// The configuration document as written, before validation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub design: RawDesign,
    #[serde(default)]
    pub scenario: RawScenario,
    pub anchor_offset_mm: Option<f64>,
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub calibration: RawCalibration,
    #[serde(default)]
    pub space: RawSpace,
    pub optimizer: Option<NelderMeadSettings>,
    #[serde(default)]
    pub rom: RawRom,
    pub requirement: Option<GripRequirement>,
    #[serde(default)]
    pub output: RawOutput,
}

impl RawConfig {
    /// Parses a JSON document; errors carry the field path and line.
    pub fn from_json(text: &str, source: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::Parse {
                origin: source.to_string(),
                path,
                line: Some(inner.line()),
                message: inner.to_string(),
            }
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut raw = Self::from_json(&text, &path.display().to_string())?;
        // Relative paths resolve against the configuration file.
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for p in [
            &mut raw.calibration.file,
            &mut raw.calibration.finger_forces,
            &mut raw.output.csv,
            &mut raw.output.json,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(raw)
    }
}

/// ROM settings after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RomSettings {
    pub digit: Digit,
    pub sd_multiplier: f64,
    pub limits: RomLimits,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub design: PhalangeDesign,
    pub scenario: GraspScenario,
    pub statics: StaticsOptions,
    pub calibration_file: Option<PathBuf>,
    pub calibration_label: String,
    pub finger_forces_file: Option<PathBuf>,
    pub space: DesignSpace,
    pub optimizer: NelderMeadSettings,
    pub rom: RomSettings,
    pub requirement: GripRequirement,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

fn invalid(field: &str, e: ModelError) -> ConfigError {
    let message = match &e {
        ModelError::Domain { message, .. } => message.clone(),
        other => other.to_string(),
    };
    ConfigError::Invalid {
        field: field.to_string(),
        message,
    }
}

impl RunConfig {
    /// Checks every invariant and fills defaults.
    pub fn validate(raw: RawConfig) -> Result<Self, ConfigError> {
        let d = &raw.design;
        let segments = d.segments.unwrap_or(DEFAULT_SEGMENTS);
        let length = d.length_mm.unwrap_or(DEFAULT_LENGTH_MM);
        let depth = d.depth_mm.unwrap_or(DEFAULT_DEPTH_MM);
        let loss = d.loss.unwrap_or(DEFAULT_LOSS);
        let tip_inclination = d.tip_inclination.map_or(0.0, |a| a.0);
        let tip_length = d.tip_length_mm;

        if !(length.is_finite() && length > 0.0) {
            return Err(ConfigError::Invalid {
                field: "design.length_mm".into(),
                message: format!("must be finite and > 0, got {length}"),
            });
        }
        if !(depth.is_finite() && depth > 0.0) {
            return Err(ConfigError::Invalid {
                field: "design.depth_mm".into(),
                message: format!("must be finite and > 0, got {depth}"),
            });
        }
        let segment = SegmentGeometry::with_tip(
            length,
            depth,
            tip_length.unwrap_or(length / 2.0),
            tip_inclination,
        )
        .map_err(|e| {
            let field = match &e {
                ModelError::Domain {
                    field: "tip_inclination",
                    ..
                } => "design.tip_inclination",
                _ => "design.tip_length_mm",
            };
            invalid(field, e)
        })?;
        let design = PhalangeDesign::new(segments, segment, loss).map_err(|e| {
            let field = match &e {
                ModelError::Domain {
                    field: "segments", ..
                } => "design.segments",
                _ => "design.loss",
            };
            invalid(field, e)
        })?;

        let s = &raw.scenario;
        let tension = s.tension_n.unwrap_or(DEFAULT_TENSION_N);
        let scenario = if s.flat {
            GraspScenario::flat(tension).map_err(|e| invalid("scenario.tension_n", e))?
        } else {
            let radius = s.radius_mm.unwrap_or(DEFAULT_RADIUS_MM);
            if !(radius.is_finite() && radius > 0.0) {
                return Err(ConfigError::Invalid {
                    field: "scenario.radius_mm".into(),
                    message: format!("must be finite and > 0 (use \"flat\": true for an open hand), got {radius}"),
                });
            }
            GraspScenario::cylinder(radius, tension)
                .map_err(|e| invalid("scenario.tension_n", e))?
        };

        let tolerances = raw.tolerances.unwrap_or_default();
        for (name, v) in [
            (
                "tolerances.singular_denominator",
                tolerances.singular_denominator,
            ),
            ("tolerances.arcsin_clamp", tolerances.arcsin_clamp),
            ("tolerances.degenerate_lever", tolerances.degenerate_lever),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid {
                    field: name.into(),
                    message: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        let anchor_offset = raw.anchor_offset_mm.unwrap_or(0.0);
        if !anchor_offset.is_finite() {
            return Err(ConfigError::Invalid {
                field: "anchor_offset_mm".into(),
                message: "must be finite".into(),
            });
        }
        let statics = StaticsOptions {
            tolerances,
            anchor_offset,
        };

        let sp = &raw.space;
        let space = DesignSpace {
            segments: sp.segments.unwrap_or(CountRange::point(segments)),
            length: sp.length_mm.unwrap_or(Axis::point(length)),
            depth: sp.depth_mm.unwrap_or(Axis::point(depth)),
            loss: sp.loss.unwrap_or(Axis::point(loss)),
            tip_length,
            tip_inclination,
            scenario,
        };
        space.validate().map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .strip_prefix("invalid design space: ")
                .and_then(|m| m.split(':').next())
                .map(|f| match f {
                    "length" => "space.length_mm",
                    "depth" => "space.depth_mm",
                    "loss" => "space.loss",
                    "segments" => "space.segments",
                    _ => "space",
                })
                .unwrap_or("space");
            ConfigError::Invalid {
                field: field.into(),
                message: msg,
            }
        })?;

        let optimizer = raw.optimizer.unwrap_or_default();
        if optimizer.max_evaluations == 0 || !(optimizer.diameter_tol > 0.0) {
            return Err(ConfigError::Invalid {
                field: "optimizer".into(),
                message: "max_evaluations must be >= 1 and diameter_tol > 0".into(),
            });
        }

        let mut limits = RomLimits::default();
        let digit = raw.rom.digit.unwrap_or_default();
        for (name, o) in &raw.rom.limits {
            let table = match digit {
                Digit::Finger => &mut limits.finger[..],
                Digit::Thumb => &mut limits.thumb[..],
            };
            let joint = table
                .iter_mut()
                .find(|j| j.name.eq_ignore_ascii_case(name))
                .ok_or_else(|| ConfigError::Invalid {
                    field: format!("rom.limits.{name}"),
                    message: format!("unknown joint for digit {digit:?}"),
                })?;
            if let Some(a) = o.flexion {
                joint.flexion_deg = a.0.to_degrees();
            }
            if let Some(a) = o.flexion_sd {
                joint.flexion_sd_deg = a.0.to_degrees();
            }
            if let Some(a) = o.extension {
                joint.extension_deg = Some(a.0.to_degrees());
            }
            if let Some(a) = o.extension_sd {
                joint.extension_sd_deg = Some(a.0.to_degrees());
            }
        }
        limits.validate().map_err(|e| invalid("rom.limits", e))?;
        let sd_multiplier = raw.rom.sd_multiplier.unwrap_or(0.0);
        if !(sd_multiplier.is_finite() && sd_multiplier >= 0.0) {
            return Err(ConfigError::Invalid {
                field: "rom.sd_multiplier".into(),
                message: format!("must be >= 0, got {sd_multiplier}"),
            });
        }

        let requirement = raw.requirement.unwrap_or_default();
        requirement.force().map_err(|e| match &e {
            ModelError::Domain { field, .. } => invalid(&format!("requirement.{field}"), e.clone()),
            _ => invalid("requirement", e),
        })?;

        Ok(Self {
            design,
            scenario,
            statics,
            calibration_file: raw.calibration.file,
            calibration_label: raw
                .calibration
                .label
                .unwrap_or_else(|| "transmission".to_string()),
            finger_forces_file: raw.calibration.finger_forces,
            space,
            optimizer,
            rom: RomSettings {
                digit,
                sd_multiplier,
                limits,
            },
            requirement,
            csv: raw.output.csv,
            json: raw.output.json,
        })
    }
}

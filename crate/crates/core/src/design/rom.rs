//! Range-of-motion admissibility of a conformal configuration.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{conform, conform_angles, GraspScenario, PhalangeDesign, Tolerances};

/// Flexion/extension limits of one anatomical joint (degrees).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointLimit {
    pub name: String,
    pub flexion_deg: f64,
    pub flexion_sd_deg: f64,
    /// Stored negative; `None` where no extension limit is tabulated.
    pub extension_deg: Option<f64>,
    pub extension_sd_deg: Option<f64>,
}

impl JointLimit {
    fn new(name: &str, extension: Option<(f64, f64)>, flexion: (f64, f64)) -> Self {
        Self {
            name: name.to_string(),
            flexion_deg: flexion.0,
            flexion_sd_deg: flexion.1,
            extension_deg: extension.map(|e| e.0),
            extension_sd_deg: extension.map(|e| e.1),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.flexion_deg.is_finite() && self.flexion_deg > 0.0) {
            return Err(domain(
                "rom.flexion",
                format!(
                    "{}: flexion limit must be > 0, got {}",
                    self.name, self.flexion_deg
                ),
            ));
        }
        if let Some(e) = self.extension_deg {
            if !(e.is_finite() && e < 0.0) {
                return Err(domain(
                    "rom.extension",
                    format!("{}: extension limit must be < 0, got {e}", self.name),
                ));
            }
        }
        for sd in [Some(self.flexion_sd_deg), self.extension_sd_deg]
            .into_iter()
            .flatten()
        {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(domain(
                    "rom.sd",
                    format!("{}: standard deviation must be >= 0, got {sd}", self.name),
                ));
            }
        }
        Ok(())
    }
}

/// Anatomical limits for the fingers (MCP, PIP, DIP) and the thumb (MCP, IP).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RomLimits {
    pub finger: [JointLimit; 3],
    pub thumb: [JointLimit; 2],
}

impl Default for RomLimits {
    fn default() -> Self {
        Self {
            finger: [
                JointLimit::new("MCP", Some((-19.0, 6.9)), (90.0, 9.1)),
                JointLimit::new("PIP", Some((-7.0, 3.7)), (101.0, 8.3)),
                JointLimit::new("DIP", Some((-6.0, 4.1)), (84.0, 8.5)),
            ],
            thumb: [
                JointLimit::new("MCP", None, (60.0, 5.5)),
                JointLimit::new("IP", None, (88.0, 9.2)),
            ],
        }
    }
}

impl RomLimits {
    pub fn validate(&self) -> Result<()> {
        self.finger
            .iter()
            .chain(&self.thumb)
            .try_for_each(JointLimit::validate)
    }

    pub fn joints(&self, digit: Digit) -> &[JointLimit] {
        match digit {
            Digit::Finger => &self.finger,
            Digit::Thumb => &self.thumb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Digit {
    #[default]
    Finger,
    Thumb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointMapping {
    /// One orthosis segment per phalanx.
    OneSegmentPerPhalanx,
    /// Segment joints grouped proportionally onto the anatomical joints.
    ProportionalHeuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCheck {
    pub name: String,
    pub angle_deg: f64,
    pub limit_deg: f64,
    /// `limit − angle`; negative when the joint is over-flexed.
    pub margin_deg: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RomReport {
    pub digit: Digit,
    pub mapping: JointMapping,
    pub sd_multiplier: f64,
    pub joints: Vec<JointCheck>,
    /// Whether the chain can physically conform to the object.
    pub feasible: bool,
    pub reason: Option<String>,
    pub pass: bool,
}

/// Joint flexion estimates from segment rotations.
///
/// The knuckle takes `θ_1`; each further segment joint takes `|θ_k − θ_(k−1)|`.
/// Segment joint `k` of `n` is assigned to anatomical joint `⌊(k−1)·G/n⌋`.
pub fn joint_angles(theta: &[f64], segments: usize, joints: usize) -> Vec<f64> {
    let mut out = vec![0.0; joints];
    for k in 0..segments {
        let relative = if k == 0 {
            theta[0].abs()
        } else {
            (theta[k] - theta[k - 1]).abs()
        };
        out[k * joints / segments] += relative;
    }
    out
}

/// Compares the conformal joint angles against the flexion limits widened by
/// `sd_multiplier` standard deviations.
pub fn rom_check(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    limits: &RomLimits,
    digit: Digit,
    sd_multiplier: f64,
    tol: &Tolerances,
) -> Result<RomReport> {
    limits.validate()?;
    if !(sd_multiplier.is_finite() && sd_multiplier >= 0.0) {
        return Err(domain(
            "sd_multiplier",
            format!("must be >= 0, got {sd_multiplier}"),
        ));
    }
    let n = design.segments();
    let table = limits.joints(digit);
    let mapping = if n == table.len() {
        JointMapping::OneSegmentPerPhalanx
    } else {
        JointMapping::ProportionalHeuristic
    };
    let theta = conform_angles(design, scenario)?;
    let (feasible, reason) = match conform(design, scenario, tol) {
        Ok(_) => (true, None),
        Err(e) => (false, Some(e.to_string())),
    };
    let joints: Vec<JointCheck> = joint_angles(&theta, n, table.len())
        .into_iter()
        .zip(table)
        .map(|(angle, lim)| {
            let angle_deg = angle.to_degrees();
            let limit_deg = lim.flexion_deg + sd_multiplier * lim.flexion_sd_deg;
            JointCheck {
                name: lim.name.clone(),
                angle_deg,
                limit_deg,
                margin_deg: limit_deg - angle_deg,
                pass: angle_deg <= limit_deg,
            }
        })
        .collect();
    let pass = feasible && joints.iter().all(|j| j.pass);
    Ok(RomReport {
        digit,
        mapping,
        sd_multiplier,
        joints,
        feasible,
        reason,
        pass,
    })
}

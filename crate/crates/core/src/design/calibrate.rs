//! Fitting the loss coefficient to measured tension/force pairs.

use serde::Serialize;

use crate::design::search::golden_section;
use crate::error::{domain, ModelError, Result};
use crate::geometry::{GraspScenario, PhalangeDesign};
use crate::statics::{fingertip_force, StaticsOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    /// Input tension `T_o` (N).
    pub tension: f64,
    /// Measured fingertip force (N).
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationDataset {
    pub label: String,
    pub points: Vec<CalibrationPoint>,
}

impl CalibrationDataset {
    pub fn new(label: impl Into<String>, points: Vec<CalibrationPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain(
                "points",
                "calibration data needs at least one point",
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.tension.is_finite() && p.tension >= 0.0 && p.force.is_finite() && p.force >= 0.0)
            {
                return Err(domain(
                    "points",
                    format!(
                        "point {i} must be finite and non-negative, got ({}, {})",
                        p.tension, p.force
                    ),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }
}

/// Search settings for the loss fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationSettings {
    /// Lower end of the searched loss interval; the upper end is 1.
    pub min_loss: f64,
    /// Uniform scan points used to bracket the global minimum before refinement.
    pub scan_points: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            min_loss: 1e-6,
            scan_points: 64,
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub label: String,
    pub loss: f64,
    pub rms_residual: f64,
    /// Modelled fingertip force per newton of input tension at the fitted loss.
    pub transmission: f64,
    /// Best fit sits at `c = 1`; the data want more transmission than the geometry allows.
    pub at_upper_bound: bool,
    /// Only one informative point: the fit interpolates it exactly if it can.
    pub single_point: bool,
    pub points: usize,
    pub evaluations: usize,
    pub method: &'static str,
    pub settings: CalibrationSettings,
}

/// Modelled fingertip force per unit input tension for a given loss.
pub fn transmission_ratio(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    loss: f64,
    opts: &StaticsOptions,
) -> Result<f64> {
    let d = design.with_loss(loss)?;
    let s = scenario.with_tension(1.0)?;
    Ok(fingertip_force(&d, &s, opts)?.p_tip)
}

/// Least-squares fit of the loss coefficient on `(0, 1]`.
///
/// The model is linear in tension, so each candidate loss is evaluated once at
/// unit tension and the residuals are `T_k·ratio(c) − P_k`. A uniform scan
/// brackets the best cell and a golden-section search refines it.
pub fn calibrate_loss(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    data: &CalibrationDataset,
    opts: &StaticsOptions,
    settings: &CalibrationSettings,
) -> Result<CalibrationReport> {
    let informative = data.points.iter().filter(|p| p.tension > 0.0).count();
    if informative == 0 {
        return Err(ModelError::Unidentifiable(
            "every calibration point has zero input tension".into(),
        ));
    }
    let mut evaluations = 0usize;
    let mut failure: Option<ModelError> = None;
    let mut sse = |c: f64| -> f64 {
        evaluations += 1;
        match transmission_ratio(design, scenario, c, opts) {
            Ok(k) => data
                .points
                .iter()
                .map(|p| (p.tension * k - p.force).powi(2))
                .sum(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    };

    let lo = settings.min_loss;
    let hi = 1.0;
    let m = settings.scan_points.max(2);
    let grid: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&c| sse(c)).collect();
    let best_cell = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < values[b] { i } else { b });
    if !values[best_cell].is_finite() {
        return Err(failure.unwrap_or(ModelError::Unidentifiable(
            "model is infeasible for every loss coefficient".into(),
        )));
    }
    let a = grid[best_cell.saturating_sub(1)];
    let b = grid[(best_cell + 1).min(m - 1)];
    let refined = golden_section(&mut sse, a, b, settings.tolerance, settings.max_iterations);
    let (loss, best_sse) = if refined.value <= values[best_cell] {
        (refined.x, refined.value)
    } else {
        (grid[best_cell], values[best_cell])
    };

    let transmission = transmission_ratio(design, scenario, loss, opts)?;
    Ok(CalibrationReport {
        label: data.label.clone(),
        loss,
        rms_residual: (best_sse / data.points.len() as f64).sqrt(),
        transmission,
        at_upper_bound: loss >= 1.0 - 1e-9,
        single_point: informative == 1,
        points: data.points.len(),
        evaluations,
        method: "uniform scan + golden-section",
        settings: *settings,
    })
}

/// A published fingertip force without a matching input tension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceFixture {
    pub label: String,
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlausibilityRow {
    pub label: String,
    pub force: f64,
    /// Input tension the model needs to produce `force` at the given loss.
    pub required_tension: f64,
    pub plausible: bool,
}

/// For each target force, the input tension that reproduces it at `loss`.
pub fn plausibility(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    loss: f64,
    targets: &[ForceFixture],
    opts: &StaticsOptions,
) -> Result<Vec<PlausibilityRow>> {
    let k = transmission_ratio(design, scenario, loss, opts)?;
    Ok(targets
        .iter()
        .map(|t| {
            let required_tension = t.force / k;
            PlausibilityRow {
                label: t.label.clone(),
                force: t.force,
                required_tension,
                plausible: k > 0.0 && required_tension.is_finite() && required_tension >= 0.0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SegmentGeometry;

    fn setup() -> (PhalangeDesign, GraspScenario) {
        let d = PhalangeDesign::new(3, SegmentGeometry::new(15.0, 6.0).unwrap(), 0.8).unwrap();
        (d, GraspScenario::cylinder(45.0, 44.0).unwrap())
    }

    fn points(v: &[(f64, f64)]) -> Vec<CalibrationPoint> {
        v.iter()
            .map(|&(tension, force)| CalibrationPoint { tension, force })
            .collect()
    }

    #[test]
    fn recovers_generating_loss() {
        let (d, s) = setup();
        let opts = StaticsOptions::default();
        let k = transmission_ratio(&d, &s, 0.85, &opts).unwrap();
        let data = CalibrationDataset::new(
            "synthetic",
            points(&[(5.0, 5.0 * k), (20.0, 20.0 * k), (40.0, 40.0 * k)]),
        )
        .unwrap();
        let r = calibrate_loss(&d, &s, &data, &opts, &Default::default()).unwrap();
        assert!((r.loss - 0.85).abs() < 1e-6, "{r:?}");
        assert!(!r.single_point && !r.at_upper_bound);
    }

    #[test]
    fn straight_line_two_to_one() {
        let (d, s) = setup();
        let data =
            CalibrationDataset::new("fig2", points(&[(10.0, 5.0), (20.0, 10.0), (44.0, 22.0)]))
                .unwrap();
        let r = calibrate_loss(&d, &s, &data, &Default::default(), &Default::default()).unwrap();
        assert!((r.transmission - 0.5).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn single_point_flagged() {
        let (d, s) = setup();
        let data = CalibrationDataset::new("one", points(&[(44.0, 22.0)])).unwrap();
        let r = calibrate_loss(&d, &s, &data, &Default::default(), &Default::default()).unwrap();
        assert!(r.single_point);
        assert!((r.transmission - 0.5).abs() < 1e-9);
        assert!(r.rms_residual < 1e-6);
    }

    #[test]
    fn unreachable_ratio_hits_upper_bound() {
        let (d, s) = setup();
        let data = CalibrationDataset::new("strong", points(&[(10.0, 50.0)])).unwrap();
        let r = calibrate_loss(&d, &s, &data, &Default::default(), &Default::default()).unwrap();
        assert!(r.at_upper_bound);
        assert_eq!(r.loss, 1.0);
    }

    #[test]
    fn zero_tensions_unidentifiable() {
        let (d, s) = setup();
        let data = CalibrationDataset::new("zeros", points(&[(0.0, 0.0), (0.0, 1.0)])).unwrap();
        let err = calibrate_loss(&d, &s, &data, &Default::default(), &Default::default());
        assert!(matches!(err, Err(ModelError::Unidentifiable(_))));
    }

    #[test]
    fn dataset_validation() {
        assert!(CalibrationDataset::new("empty", vec![]).is_err());
        assert!(CalibrationDataset::new("neg", points(&[(-1.0, 2.0)])).is_err());
    }

    #[test]
    fn fixture_forces_are_plausible() {
        let (d, s) = setup();
        let targets: Vec<ForceFixture> = [("thumb", 31.2), ("index", 17.8), ("middle", 21.4)]
            .iter()
            .map(|&(l, f)| ForceFixture {
                label: l.into(),
                force: f,
            })
            .collect();
        let rows = plausibility(&d, &s, 0.8, &targets, &Default::default()).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.plausible && r.required_tension > r.force));
    }
}

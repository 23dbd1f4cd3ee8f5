//! Grid sweeps and bounded simplex optimization over segment count, length,
//! passage depth and loss.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::search::{nelder_mead_unit_box, NelderMeadSettings};
use crate::error::{ModelError, Result};
use crate::geometry::{GraspScenario, PhalangeDesign, SegmentGeometry};
use crate::statics::{fingertip_force, StaticsOptions};

/// A closed interval sampled at `steps` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    #[serde(default = "one")]
    pub steps: usize,
}

fn one() -> usize {
    1
}

impl Axis {
    pub fn point(v: f64) -> Self {
        Self {
            min: v,
            max: v,
            steps: 1,
        }
    }

    pub fn range(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 || self.min == self.max {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.max > self.min
    }

    fn normalize(self, v: f64) -> f64 {
        if self.is_continuous() {
            (v - self.min) / (self.max - self.min)
        } else {
            0.0
        }
    }

    fn denormalize(self, u: f64) -> f64 {
        if self.is_continuous() {
            (self.min + u * (self.max - self.min)).clamp(self.min, self.max)
        } else {
            self.min
        }
    }

    fn validate(&self, name: &str, lower_open: f64, upper: Option<f64>) -> Result<()> {
        let bad = |msg: String| Err(ModelError::InvalidSpace(format!("{name}: {msg}")));
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.min > self.max {
            return bad(format!("min {} exceeds max {}", self.min, self.max));
        }
        if self.steps == 0 {
            return bad("steps must be >= 1".into());
        }
        if !(self.min > lower_open) {
            return bad(format!("min must be > {lower_open}, got {}", self.min));
        }
        if let Some(u) = upper {
            if self.max > u {
                return bad(format!("max must be <= {u}, got {}", self.max));
            }
        }
        Ok(())
    }
}

/// Inclusive range of segment counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub fn point(n: usize) -> Self {
        Self { min: n, max: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSpace {
    pub segments: CountRange,
    pub length: Axis,
    pub depth: Axis,
    pub loss: Axis,
    /// Fixed tip length (mm); `None` keeps the default of half the segment length.
    pub tip_length: Option<f64>,
    pub tip_inclination: f64,
    pub scenario: GraspScenario,
}

impl DesignSpace {
    pub fn validate(&self) -> Result<()> {
        if self.segments.min == 0 || self.segments.min > self.segments.max {
            return Err(ModelError::InvalidSpace(format!(
                "segments: need 1 <= min <= max, got {}..{}",
                self.segments.min, self.segments.max
            )));
        }
        self.length.validate("length", 0.0, None)?;
        self.depth.validate("depth", 0.0, None)?;
        self.loss.validate("loss", 0.0, Some(1.0))?;
        if let Some(t) = self.tip_length {
            if !(t.is_finite() && t >= 0.0) {
                return Err(ModelError::InvalidSpace(format!(
                    "tip_length: must be >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn design(&self, point: &DesignPoint) -> Result<PhalangeDesign> {
        let tip = self.tip_length.unwrap_or(point.length / 2.0);
        let seg = SegmentGeometry::with_tip(point.length, point.depth, tip, self.tip_inclination)?;
        PhalangeDesign::new(point.segments, seg, point.loss)
    }

    /// Grid points in lexicographic order of (segments, length, depth, loss).
    pub fn grid(&self) -> Vec<DesignPoint> {
        let (ls, ds, cs) = (
            self.length.values(),
            self.depth.values(),
            self.loss.values(),
        );
        let mut out = Vec::new();
        for segments in self.segments.min..=self.segments.max {
            for &length in &ls {
                for &depth in &ds {
                    for &loss in &cs {
                        out.push(DesignPoint {
                            segments,
                            length,
                            depth,
                            loss,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignPoint {
    pub segments: usize,
    pub length: f64,
    pub depth: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub point: DesignPoint,
    pub p_tip: Option<f64>,
    pub transmission: Option<f64>,
    /// All three moment families act in flexion.
    pub sign_consistent: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn feasible(&self) -> bool {
        self.p_tip.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub scenario: GraspScenario,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Feasible row with the largest fingertip force; the first one wins ties.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.feasible())
            .fold(None, |best, r| match best {
                Some(b) if b.p_tip >= r.p_tip => Some(b),
                _ => Some(r),
            })
    }
}

fn evaluate(
    space: &DesignSpace,
    index: usize,
    point: DesignPoint,
    opts: &StaticsOptions,
) -> SweepRow {
    let outcome = space
        .design(&point)
        .and_then(|d| fingertip_force(&d, &space.scenario, opts));
    match outcome {
        Ok(sol) => SweepRow {
            index,
            point,
            p_tip: Some(sol.p_tip),
            transmission: sol.transmission(),
            sign_consistent: sol.signed_moments.is_consistent(1e-12),
            error: None,
        },
        Err(e) => SweepRow {
            index,
            point,
            p_tip: None,
            transmission: None,
            sign_consistent: false,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates the fingertip force on every grid point. Points are solved in
/// parallel and returned in grid order.
pub fn sweep(space: &DesignSpace, opts: &StaticsOptions) -> Result<SweepTable> {
    space.validate()?;
    let rows = space
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| evaluate(space, i, p, opts))
        .collect();
    Ok(SweepTable {
        scenario: space.scenario,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub best: DesignPoint,
    pub p_tip: f64,
    /// Fingertip force per newton of input tension at `best`; the searched objective.
    pub transmission: f64,
    pub seed: DesignPoint,
    pub seed_transmission: f64,
    pub free_parameters: Vec<&'static str>,
    pub grid_evaluations: usize,
    pub simplex_evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub settings: NelderMeadSettings,
}

/// Maximizes fingertip force over the continuous axes of `space`.
///
/// The model is linear in input tension, so the search maximizes the
/// transmission ratio at unit tension and the reported force is recomputed at
/// the scenario tension; the argmax therefore does not depend on tension. The
/// simplex starts from the best point of the coarse grid given by the axes'
/// `steps` and never returns anything worse than it.
pub fn optimize(
    space: &DesignSpace,
    opts: &StaticsOptions,
    settings: &NelderMeadSettings,
) -> Result<OptimizeReport> {
    space.validate()?;
    if space.segments.min != space.segments.max {
        return Err(ModelError::InvalidSpace(
            "optimize needs a fixed segment count (segments.min == segments.max)".into(),
        ));
    }
    let unit = DesignSpace {
        scenario: space.scenario.with_tension(1.0)?,
        ..space.clone()
    };
    let coarse = sweep(&unit, opts)?;
    let seed_row = coarse.best().ok_or(ModelError::NoFeasibleDesign)?;
    let seed = seed_row.point;
    let seed_transmission = seed_row.p_tip.expect("best row is feasible");

    let axes: Vec<(&'static str, Axis)> = [
        ("length", space.length),
        ("depth", space.depth),
        ("loss", space.loss),
    ]
    .into_iter()
    .filter(|(_, a)| a.is_continuous())
    .collect();

    let to_point = |u: &[f64]| -> DesignPoint {
        let mut p = seed;
        for ((name, axis), &v) in axes.iter().zip(u) {
            let x = axis.denormalize(v);
            match *name {
                "length" => p.length = x,
                "depth" => p.depth = x,
                _ => p.loss = x,
            }
        }
        p
    };
    let start: Vec<f64> = axes
        .iter()
        .map(|(name, axis)| {
            axis.normalize(match *name {
                "length" => seed.length,
                "depth" => seed.depth,
                _ => seed.loss,
            })
        })
        .collect();

    let objective = |u: &[f64]| -> f64 {
        let p = to_point(u);
        match unit
            .design(&p)
            .and_then(|d| fingertip_force(&d, &unit.scenario, opts))
        {
            Ok(sol) => -sol.p_tip,
            Err(_) => f64::INFINITY,
        }
    };
    let found = nelder_mead_unit_box(objective, &start, settings);

    let (best, transmission) = if -found.value > seed_transmission {
        (to_point(&found.x), -found.value)
    } else {
        (seed, seed_transmission)
    };
    let design = space.design(&best)?;
    let p_tip = fingertip_force(&design, &space.scenario, opts)?.p_tip;

    Ok(OptimizeReport {
        best,
        p_tip,
        transmission,
        seed,
        seed_transmission,
        free_parameters: axes.iter().map(|(n, _)| *n).collect(),
        grid_evaluations: coarse.rows.len(),
        simplex_evaluations: found.evaluations,
        converged: found.converged,
        restarts_used: found.restarts_used,
        settings: *settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> DesignSpace {
        DesignSpace {
            segments: CountRange::point(3),
            length: Axis::point(15.0),
            depth: Axis::point(6.0),
            loss: Axis::point(0.8),
            tip_length: None,
            tip_inclination: 0.0,
            scenario: GraspScenario::cylinder(45.0, 44.0).unwrap(),
        }
    }

    #[test]
    fn axis_values() {
        assert_eq!(Axis::point(2.0).values(), vec![2.0]);
        assert_eq!(Axis::range(0.0, 1.0, 3).values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Axis::range(1.0, 1.0, 5).values(), vec![1.0]);
    }

    #[test]
    fn one_point_sweep_matches_direct() {
        let s = space();
        let t = sweep(&s, &StaticsOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        let direct = fingertip_force(
            &s.design(&t.rows[0].point).unwrap(),
            &s.scenario,
            &StaticsOptions::default(),
        )
        .unwrap();
        assert_eq!(t.rows[0].p_tip, Some(direct.p_tip));
    }

    #[test]
    fn higher_loss_keeps_more_tension() {
        let mut s = space();
        s.loss = Axis::range(0.5, 1.0, 2);
        let t = sweep(&s, &StaticsOptions::default()).unwrap();
        let tn = |row: &SweepRow| {
            let d = s.design(&row.point).unwrap();
            crate::statics::tension_profile(&d, 44.0)
                .unwrap()
                .terminal_tension
        };
        assert!(tn(&t.rows[1]) > tn(&t.rows[0]));
    }

    #[test]
    fn grid_is_lexicographic() {
        let mut s = space();
        s.segments = CountRange { min: 2, max: 3 };
        s.length = Axis::range(10.0, 20.0, 2);
        s.loss = Axis::range(0.5, 1.0, 2);
        let g = s.grid();
        assert_eq!(g.len(), 8);
        assert_eq!((g[0].segments, g[0].length, g[0].loss), (2, 10.0, 0.5));
        assert_eq!((g[1].segments, g[1].length, g[1].loss), (2, 10.0, 1.0));
        assert_eq!((g[2].segments, g[2].length, g[2].loss), (2, 20.0, 0.5));
        assert_eq!(g[4].segments, 3);
    }

    #[test]
    fn best_prefers_first_on_ties() {
        let row = |index, p| SweepRow {
            index,
            point: DesignPoint {
                segments: 1,
                length: 1.0,
                depth: 1.0,
                loss: 1.0,
            },
            p_tip: p,
            transmission: None,
            sign_consistent: true,
            error: None,
        };
        let t = SweepTable {
            scenario: space().scenario,
            rows: vec![
                row(0, None),
                row(1, Some(2.0)),
                row(2, Some(2.0)),
                row(3, Some(1.0)),
            ],
        };
        assert_eq!(t.best().unwrap().index, 1);
    }

    #[test]
    fn degenerate_space_returns_point() {
        let s = space();
        let r = optimize(
            &s,
            &StaticsOptions::default(),
            &NelderMeadSettings::default(),
        )
        .unwrap();
        assert_eq!(r.best, r.seed);
        assert!(r.free_parameters.is_empty());
    }

    #[test]
    fn rejects_bad_spaces() {
        let mut s = space();
        s.loss = Axis::range(0.5, 1.2, 3);
        assert!(matches!(
            sweep(&s, &StaticsOptions::default()),
            Err(ModelError::InvalidSpace(_))
        ));
        let mut s = space();
        s.segments = CountRange { min: 2, max: 4 };
        assert!(optimize(
            &s,
            &StaticsOptions::default(),
            &NelderMeadSettings::default()
        )
        .is_err());
    }

    #[test]
    fn infeasible_everywhere_errors() {
        // The tip force line passes through the knuckle for every point.
        let mut s = space();
        s.segments = CountRange::point(1);
        s.tip_length = Some(0.0);
        s.tip_inclination = -std::f64::consts::FRAC_PI_2;
        s.scenario = GraspScenario::flat(10.0).unwrap();
        let t = sweep(&s, &StaticsOptions::default()).unwrap();
        assert!(!t.rows[0].feasible());
        assert!(t.rows[0].error.is_some());
        assert_eq!(
            optimize(
                &s,
                &StaticsOptions::default(),
                &NelderMeadSettings::default()
            ),
            Err(ModelError::NoFeasibleDesign)
        );
    }
}

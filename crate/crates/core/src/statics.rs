//! Closed-form cable statics: tension decay, kink and friction loads, the three
//! moment sums about the knuckle and the resulting fingertip force.
//!
//! Moments are reported flexion-positive (clockwise about `O` in the chain
//! frame). The fingertip force balances the sum of the three moment
//! magnitudes; [`SignedMoments`] keeps the signed values so configurations in
//! which one family acts against flexion can be detected.

use serde::{Deserialize, Serialize};

use crate::error::{domain, ModelError, Result};
use crate::geometry::{conform, Configuration, GraspScenario, PhalangeDesign, Tolerances, Vec2};

/// Tension along the cable and the friction lost at each passage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensionProfile {
    /// Tension entering each segment, `T_(0,1)..T_(n−1,n)`; the first entry is `T_o`.
    pub segment_tensions: Vec<f64>,
    /// Tension `T_n` left at the terminal anchor.
    pub terminal_tension: f64,
    /// Friction `f_1..f_n` taken up by each passage.
    pub frictions: Vec<f64>,
}

impl TensionProfile {
    pub fn input_tension(&self) -> f64 {
        self.segment_tensions[0]
    }
}

/// Propagates the input tension through `n` passages, each retaining `c`.
pub fn tension_profile(design: &PhalangeDesign, input_tension: f64) -> Result<TensionProfile> {
    if !(input_tension.is_finite() && input_tension >= 0.0) {
        return Err(domain(
            "input_tension",
            format!("must be finite and >= 0, got {input_tension}"),
        ));
    }
    let c = design.loss();
    if !(c > 0.0 && c <= 1.0) {
        return Err(domain("loss", format!("must lie in (0, 1], got {c}")));
    }
    let n = design.segments();
    let mut segment_tensions = Vec::with_capacity(n);
    let mut frictions = Vec::with_capacity(n);
    let mut tension = input_tension;
    for _ in 0..n {
        let next = c * tension;
        segment_tensions.push(tension);
        frictions.push(tension - next);
        tension = next;
    }
    Ok(TensionProfile {
        segment_tensions,
        terminal_tension: tension,
        frictions,
    })
}

/// Normal loads `F_i = 2c·T_(i−1,i)·sin((φ_(i+1) − φ_i)/2)`, with `φ_(n+1) = 0`.
///
/// Signed as written; the direction `(sin θ_i, cos θ_i)` carries the rest of
/// the orientation.
pub fn kink_forces(
    design: &PhalangeDesign,
    tensions: &TensionProfile,
    phi: &[f64],
) -> Result<Vec<f64>> {
    let n = design.segments();
    if phi.len() != n {
        return Err(ModelError::Shape {
            what: "cable angles",
            expected: n,
            got: phi.len(),
        });
    }
    if tensions.segment_tensions.len() != n {
        return Err(ModelError::Shape {
            what: "segment tensions",
            expected: n,
            got: tensions.segment_tensions.len(),
        });
    }
    let c = design.loss();
    Ok((0..n)
        .map(|i| {
            let next = phi.get(i + 1).copied().unwrap_or(0.0);
            2.0 * c * tensions.segment_tensions[i] * (0.5 * (next - phi[i])).sin()
        })
        .collect())
}

/// Options for the closed-form solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StaticsOptions {
    pub tolerances: Tolerances,
    /// Offset (mm) of the terminal anchor from the last passage, along the last segment axis.
    pub anchor_offset: f64,
}

impl Default for StaticsOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            anchor_offset: 0.0,
        }
    }
}

/// Inclination `β = θ_n − θ_tip` of the fingertip force line.
pub fn tip_angle(design: &PhalangeDesign, config: &Configuration) -> f64 {
    config.theta[design.segments() - 1] - design.segment().tip_inclination()
}

/// Unit direction `(sin β, cos β)` shared by the fingertip force and the terminal tension.
pub fn tip_direction(beta: f64) -> Vec2 {
    Vec2::new(beta.sin(), beta.cos())
}

/// Point at which the terminal tension acts.
pub fn terminal_anchor(config: &Configuration, anchor_offset: f64) -> Vec2 {
    let n = config.segments();
    config.holes[n - 1] + config.axis(n) * anchor_offset
}

/// Flexion-positive moments about the knuckle, before taking magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedMoments {
    pub tension: f64,
    pub kinks: f64,
    pub friction: f64,
}

impl SignedMoments {
    pub fn total(&self) -> f64 {
        self.tension + self.kinks + self.friction
    }

    /// True when no family works against flexion by more than `rel` of the total magnitude.
    pub fn is_consistent(&self, rel: f64) -> bool {
        let scale = self.tension.abs() + self.kinks.abs() + self.friction.abs();
        let floor = -rel * scale;
        self.tension >= floor && self.kinks >= floor && self.friction >= floor
    }
}

/// Per-segment share of the kink and friction moments (flexion-positive, N·mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentMoments {
    pub kink: f64,
    pub friction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTerms {
    /// `|M_Tn|` (N·mm).
    pub tension: f64,
    /// `|M_Fi|` (N·mm).
    pub kinks: f64,
    /// `|M_fi|` (N·mm).
    pub friction: f64,
    pub signed: SignedMoments,
    pub per_segment: Vec<SegmentMoments>,
}

impl MomentTerms {
    pub fn total(&self) -> f64 {
        self.tension + self.kinks + self.friction
    }
}

/// The three moment sums about the knuckle.
pub fn moment_terms(
    design: &PhalangeDesign,
    config: &Configuration,
    tensions: &TensionProfile,
    kinks: &[f64],
    anchor_offset: f64,
) -> Result<MomentTerms> {
    let n = design.segments();
    for (what, got) in [
        ("cable passages", config.holes.len()),
        ("cable angles", config.phi.len()),
        ("kink forces", kinks.len()),
        ("frictions", tensions.frictions.len()),
    ] {
        if got != n {
            return Err(ModelError::Shape {
                what,
                expected: n,
                got,
            });
        }
    }
    if config.theta.len() != n + 1 {
        return Err(ModelError::Shape {
            what: "segment rotations",
            expected: n + 1,
            got: config.theta.len(),
        });
    }

    let beta = tip_angle(design, config);
    let anchor = terminal_anchor(config, anchor_offset);
    // The terminal tension pulls the anchor palm-ward along -(sin β, cos β).
    let tension = tensions.terminal_tension * anchor.cross(tip_direction(beta));

    let per_segment: Vec<SegmentMoments> = (0..n)
        .map(|i| {
            let hole = config.holes[i];
            let theta = config.theta[i];
            let phi = config.phi[i];
            let kink_dir = Vec2::new(theta.sin(), theta.cos());
            let friction_dir = Vec2::new(phi.cos(), phi.sin());
            SegmentMoments {
                kink: -kinks[i] * hole.cross(kink_dir),
                // Friction drags each passage proximally, against (cos φ, sin φ).
                friction: tensions.frictions[i] * hole.cross(friction_dir),
            }
        })
        .collect();
    let kinks_signed: f64 = per_segment.iter().map(|m| m.kink).sum();
    let friction_signed: f64 = per_segment.iter().map(|m| m.friction).sum();

    let signed = SignedMoments {
        tension,
        kinks: kinks_signed,
        friction: friction_signed,
    };
    Ok(MomentTerms {
        tension: tension.abs(),
        kinks: kinks_signed.abs(),
        friction: friction_signed.abs(),
        signed,
        per_segment,
    })
}

/// Full closed-form solution for one design and scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticsSolution {
    pub configuration: Configuration,
    pub tensions: TensionProfile,
    pub kink_forces: Vec<f64>,
    pub moment_tension: f64,
    pub moment_kinks: f64,
    pub moment_friction: f64,
    pub signed_moments: SignedMoments,
    pub segment_moments: Vec<SegmentMoments>,
    pub beta: f64,
    /// Perpendicular distance from the knuckle to the fingertip force line (mm).
    pub lever_arm: f64,
    pub p_tip: f64,
    pub p_tip_vector: Vec2,
}

impl StaticsSolution {
    pub fn moment_sum(&self) -> f64 {
        self.moment_tension + self.moment_kinks + self.moment_friction
    }

    /// Fingertip force per unit input tension; `None` at zero input.
    pub fn transmission(&self) -> Option<f64> {
        let t = self.tensions.input_tension();
        (t > 0.0).then(|| self.p_tip / t)
    }
}

/// Fingertip force from the moment balance about the knuckle.
pub fn fingertip_force(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    opts: &StaticsOptions,
) -> Result<StaticsSolution> {
    let configuration = conform(design, scenario, &opts.tolerances)?;
    solve_configuration(design, configuration, scenario.input_tension(), opts)
}

/// Closed-form solve for an arbitrary (not necessarily conformal) configuration.
pub fn solve_configuration(
    design: &PhalangeDesign,
    configuration: Configuration,
    input_tension: f64,
    opts: &StaticsOptions,
) -> Result<StaticsSolution> {
    let tensions = tension_profile(design, input_tension)?;
    let kinks = kink_forces(design, &tensions, &configuration.phi)?;
    let moments = moment_terms(
        design,
        &configuration,
        &tensions,
        &kinks,
        opts.anchor_offset,
    )?;

    let beta = tip_angle(design, &configuration);
    let direction = tip_direction(beta);
    let arm = configuration.tip.cross(direction);
    if !(arm.abs() >= opts.tolerances.degenerate_lever) {
        return Err(ModelError::DegenerateLever { arm });
    }
    let lever_arm = arm.abs();
    let p_tip = moments.total() / lever_arm;

    Ok(StaticsSolution {
        configuration,
        tensions,
        kink_forces: kinks,
        moment_tension: moments.tension,
        moment_kinks: moments.kinks,
        moment_friction: moments.friction,
        signed_moments: moments.signed,
        segment_moments: moments.per_segment,
        beta,
        lever_arm,
        p_tip,
        p_tip_vector: direction * p_tip,
    })
}

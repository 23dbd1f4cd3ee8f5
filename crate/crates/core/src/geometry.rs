//! Segment geometry and the conformal configuration of a phalange chain.
//!
//! Frame: the knuckle pin `O` sits at the origin, the flat chain runs along
//! `+x`, and the palm side (the side carrying the cable passages) is `-y`.
//! Flexion rotates segments clockwise, toward the palm.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, ModelError, Result};

/// Planar vector in millimetres or newtons depending on context.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` measured counter-clockwise from `+x`.
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    /// Out-of-plane component of `self × other` (counter-clockwise positive).
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Numerical guards used throughout the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Smallest admissible `|2 sin(δ − θ/2)|` in the cable-direction relation.
    pub singular_denominator: f64,
    /// Band beyond `[-1, 1]` inside which an arcsine argument is clamped.
    pub arcsin_clamp: f64,
    /// Smallest admissible fingertip moment arm about the knuckle (mm).
    pub degenerate_lever: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            singular_denominator: 1e-9,
            arcsin_clamp: 1e-9,
            degenerate_lever: 1e-9,
        }
    }
}

/// Dimensions of one diamond-shaped segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentGeometry {
    /// Pin-to-pin length `L` (mm).
    length: f64,
    /// Depth `H2` of the cable passage below the pin-joint line (mm).
    passage_depth: f64,
    /// Distance from the distal pin to the fingertip contact point (mm).
    tip_length: f64,
    /// Inclination of the tip point in the unrotated fingertip segment (rad).
    tip_inclination: f64,
}

impl SegmentGeometry {
    /// Segment with the default tip: `tip_length = L/2`, zero inclination.
    pub fn new(length: f64, passage_depth: f64) -> Result<Self> {
        Self::with_tip(length, passage_depth, length / 2.0, 0.0)
    }

    pub fn with_tip(
        length: f64,
        passage_depth: f64,
        tip_length: f64,
        tip_inclination: f64,
    ) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(domain(
                "length",
                format!("must be finite and > 0, got {length}"),
            ));
        }
        if !(passage_depth.is_finite() && passage_depth > 0.0) {
            return Err(domain(
                "passage_depth",
                format!("must be finite and > 0, got {passage_depth}"),
            ));
        }
        if !(tip_length.is_finite() && tip_length >= 0.0) {
            return Err(domain(
                "tip_length",
                format!("must be finite and >= 0, got {tip_length}"),
            ));
        }
        if !tip_inclination.is_finite() {
            return Err(domain("tip_inclination", "must be finite"));
        }
        Ok(Self {
            length,
            passage_depth,
            tip_length,
            tip_inclination,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn passage_depth(&self) -> f64 {
        self.passage_depth
    }

    pub fn tip_length(&self) -> f64 {
        self.tip_length
    }

    pub fn tip_inclination(&self) -> f64 {
        self.tip_inclination
    }

    /// Half-angle of the diamond, `atan(L / 2·H2)`, always in `(0, π/2)`.
    pub fn delta(&self) -> f64 {
        (self.length / (2.0 * self.passage_depth)).atan()
    }
}

/// A chain of identical segments and the per-passage loss coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhalangeDesign {
    segments: usize,
    segment: SegmentGeometry,
    loss: f64,
}

impl PhalangeDesign {
    pub fn new(segments: usize, segment: SegmentGeometry, loss: f64) -> Result<Self> {
        if segments == 0 {
            return Err(domain("segments", "must be >= 1"));
        }
        if !(loss > 0.0 && loss <= 1.0) {
            return Err(domain("loss", format!("must lie in (0, 1], got {loss}")));
        }
        Ok(Self {
            segments,
            segment,
            loss,
        })
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn segment(&self) -> &SegmentGeometry {
        &self.segment
    }

    /// Loss coefficient `c`: fraction of tension retained across one passage.
    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn with_loss(&self, loss: f64) -> Result<Self> {
        Self::new(self.segments, self.segment, loss)
    }
}

/// Curvature of the grasped object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    /// Open hand; the limit of infinite radius.
    Flat,
    /// Cylinder of the given radius (mm).
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraspScenario {
    curvature: Curvature,
    input_tension: f64,
}

impl GraspScenario {
    pub fn cylinder(radius: f64, input_tension: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(domain(
                "radius",
                format!("must be finite and > 0, got {radius}"),
            ));
        }
        Self::checked(Curvature::Radius(radius), input_tension)
    }

    pub fn flat(input_tension: f64) -> Result<Self> {
        Self::checked(Curvature::Flat, input_tension)
    }

    fn checked(curvature: Curvature, input_tension: f64) -> Result<Self> {
        if !(input_tension.is_finite() && input_tension >= 0.0) {
            return Err(domain(
                "input_tension",
                format!("must be finite and >= 0, got {input_tension}"),
            ));
        }
        Ok(Self {
            curvature,
            input_tension,
        })
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// `None` for the flat scenario.
    pub fn radius(&self) -> Option<f64> {
        match self.curvature {
            Curvature::Flat => None,
            Curvature::Radius(r) => Some(r),
        }
    }

    /// Input tension `T_o` (N).
    pub fn input_tension(&self) -> f64 {
        self.input_tension
    }

    pub fn with_tension(&self, input_tension: f64) -> Result<Self> {
        Self::checked(self.curvature, input_tension)
    }
}

/// Positions and angles of a loaded chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    /// Segment rotations `θ_1..θ_(n+1)`; the last entry is the flat terminal direction.
    pub theta: Vec<f64>,
    /// Cable-direction angles `φ_1..φ_n`.
    pub phi: Vec<f64>,
    /// Pin joints `J_0..J_n`, `J_0` at the origin.
    pub joints: Vec<Vec2>,
    /// Cable passages `h_1..h_n`.
    pub holes: Vec<Vec2>,
    pub tip: Vec2,
}

impl Configuration {
    pub fn segments(&self) -> usize {
        self.holes.len()
    }

    /// Unit axis of segment `i` (1-based).
    pub fn axis(&self, i: usize) -> Vec2 {
        segment_axis(self.theta[i - 1])
    }
}

pub(crate) fn segment_axis(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), -theta.sin())
}

/// Palm-side unit normal of a segment rotated by `theta`.
pub(crate) fn palm_normal(theta: f64) -> Vec2 {
    Vec2::new(-theta.sin(), -theta.cos())
}

/// Segment rotations for a chain wrapped perfectly around the object.
///
/// `θ_i = (nL/R)(1 − i/(n+1))` for `i = 1..n+1`, so `θ_(n+1) = 0`. The flat
/// scenario yields all zeros.
pub fn conform_angles(design: &PhalangeDesign, scenario: &GraspScenario) -> Result<Vec<f64>> {
    let n = design.segments();
    let radius = match scenario.curvature() {
        Curvature::Flat => return Ok(vec![0.0; n + 1]),
        Curvature::Radius(r) => r,
    };
    if !(radius > 0.0) {
        return Err(domain("radius", format!("must be > 0, got {radius}")));
    }
    let wrap = n as f64 * design.segment().length() / radius;
    let denom = (n + 1) as f64;
    Ok((1..=n + 1)
        .map(|i| {
            if i == n + 1 {
                0.0
            } else {
                wrap * (1.0 - i as f64 / denom)
            }
        })
        .collect())
}

/// Cable-direction angles `φ_1..φ_n` from the segment rotations.
pub fn cable_angles(design: &PhalangeDesign, theta: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = design.segments();
    if theta.len() != n + 1 {
        return Err(ModelError::Shape {
            what: "segment rotations",
            expected: n + 1,
            got: theta.len(),
        });
    }
    let delta = design.segment().delta();
    (1..=n)
        .map(|i| {
            let next = theta[i];
            let denominator = 2.0 * (delta - next / 2.0).sin();
            if denominator.abs() < tol.singular_denominator {
                return Err(ModelError::SingularConfiguration {
                    segment: i,
                    denominator,
                });
            }
            let argument = ((delta - next).cos() - delta.cos()) / denominator;
            if !argument.is_finite() || argument.abs() > 1.0 + tol.arcsin_clamp {
                return Err(ModelError::InfeasibleConformation {
                    segment: i,
                    argument,
                });
            }
            Ok(argument.clamp(-1.0, 1.0).asin())
        })
        .collect()
}

/// Lays out joints, cable passages and the fingertip for the given rotations.
pub fn forward_kinematics(
    design: &PhalangeDesign,
    theta: &[f64],
    tol: &Tolerances,
) -> Result<Configuration> {
    let phi = cable_angles(design, theta, tol)?;
    let n = design.segments();
    let seg = design.segment();
    let (length, depth) = (seg.length(), seg.passage_depth());

    let mut joints = Vec::with_capacity(n + 1);
    let mut holes = Vec::with_capacity(n);
    joints.push(Vec2::ZERO);
    for &angle in &theta[..n] {
        let base = *joints.last().expect("chain starts at the knuckle");
        let axis = segment_axis(angle);
        holes.push(base + axis * (length / 2.0) + palm_normal(angle) * depth);
        joints.push(base + axis * length);
    }
    let tip = joints[n] + segment_axis(theta[n - 1] + seg.tip_inclination()) * seg.tip_length();

    Ok(Configuration {
        theta: theta.to_vec(),
        phi,
        joints,
        holes,
        tip,
    })
}

/// `conform_angles` followed by `forward_kinematics`.
pub fn conform(
    design: &PhalangeDesign,
    scenario: &GraspScenario,
    tol: &Tolerances,
) -> Result<Configuration> {
    let theta = conform_angles(design, scenario)?;
    forward_kinematics(design, &theta, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn design(n: usize, l: f64, h2: f64) -> PhalangeDesign {
        PhalangeDesign::new(n, SegmentGeometry::new(l, h2).unwrap(), 0.9).unwrap()
    }

    #[test]
    fn conform_angles_three_segments() {
        let d = design(3, 15.0, 6.0);
        let s = GraspScenario::cylinder(45.0, 44.0).unwrap();
        let theta = conform_angles(&d, &s).unwrap();
        let expected = [0.75, 0.50, 0.25, 0.0];
        for (a, b) in theta.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_eq!(theta[3], 0.0);
    }

    #[test]
    fn flat_scenario_is_all_zero() {
        let d = design(4, 12.0, 5.0);
        let theta = conform_angles(&d, &GraspScenario::flat(10.0).unwrap()).unwrap();
        assert!(theta.iter().all(|&t| t == 0.0));
        assert_eq!(theta.len(), 5);
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(GraspScenario::cylinder(0.0, 1.0).is_err());
        assert!(GraspScenario::cylinder(-3.0, 1.0).is_err());
        assert!(GraspScenario::cylinder(f64::INFINITY, 1.0).is_err());
        assert!(GraspScenario::flat(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_designs() {
        assert!(SegmentGeometry::new(0.0, 1.0).is_err());
        assert!(SegmentGeometry::new(1.0, -1.0).is_err());
        assert!(SegmentGeometry::with_tip(1.0, 1.0, -0.1, 0.0).is_err());
        let seg = SegmentGeometry::new(10.0, 4.0).unwrap();
        assert!(PhalangeDesign::new(0, seg, 0.9).is_err());
        assert!(PhalangeDesign::new(2, seg, 0.0).is_err());
        assert!(PhalangeDesign::new(2, seg, 1.0 + 1e-12).is_err());
        assert!(PhalangeDesign::new(2, seg, 1.0).is_ok());
    }

    #[test]
    fn delta_in_open_quadrant() {
        for (l, h) in [(1e-6, 1e6), (15.0, 6.0), (1e6, 1e-6)] {
            let d = SegmentGeometry::new(l, h).unwrap().delta();
            assert!(d > 0.0 && d < std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn cable_angle_flat_is_zero() {
        let d = design(2, 15.0, 6.0);
        let phi = cable_angles(&d, &[0.0, 0.0, 0.0], &Tolerances::default()).unwrap();
        assert_eq!(phi, vec![0.0, 0.0]);
    }

    #[test]
    fn cable_angle_matches_half_angle() {
        // cos(δ−θ) − cos δ = 2 sin(δ − θ/2) sin(θ/2), so φ = θ/2 off the singular set.
        let d = design(1, 15.0, 6.0);
        assert_relative_eq!(
            d.segment().delta(),
            0.896_055_384_571_343_9,
            epsilon = 1e-12
        );
        let phi = cable_angles(&d, &[0.7, 0.5], &Tolerances::default()).unwrap();
        assert_relative_eq!(phi[0], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn cable_angle_singular_band() {
        let d = design(1, 15.0, 6.0);
        let two_delta = 2.0 * d.segment().delta();
        let err = cable_angles(&d, &[0.0, two_delta], &Tolerances::default()).unwrap_err();
        assert!(matches!(
            err,
            ModelError::SingularConfiguration { segment: 1, .. }
        ));
        // Just outside the guard the relation is a removable singularity and stays finite.
        let phi = cable_angles(&d, &[0.0, two_delta - 1e-6], &Tolerances::default()).unwrap();
        assert!((phi[0] - (two_delta - 1e-6) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn cable_angles_shape_error() {
        let d = design(3, 15.0, 6.0);
        let err = cable_angles(&d, &[0.0, 0.0], &Tolerances::default()).unwrap_err();
        assert_eq!(
            err,
            ModelError::Shape {
                what: "segment rotations",
                expected: 4,
                got: 2
            }
        );
    }

    #[test]
    fn flat_layout_is_exact() {
        let d = design(3, 15.0, 6.0);
        let c = forward_kinematics(&d, &[0.0; 4], &Tolerances::default()).unwrap();
        for (i, j) in c.joints.iter().enumerate() {
            assert_eq!(*j, Vec2::new(15.0 * i as f64, 0.0));
        }
        for (i, h) in c.holes.iter().enumerate() {
            assert_eq!(h.y, -6.0);
            assert_eq!(h.x, 15.0 * i as f64 + 7.5);
        }
        assert_eq!(c.tip, Vec2::new(52.5, 0.0));
    }

    #[test]
    fn single_segment_chain() {
        let d = design(1, 10.0, 3.0);
        let s = GraspScenario::cylinder(20.0, 1.0).unwrap();
        let c = conform(&d, &s, &Tolerances::default()).unwrap();
        assert_eq!(c.holes.len(), 1);
        assert_eq!(c.joints.len(), 2);
        assert_relative_eq!(c.theta[0], 0.25, epsilon = 1e-15);
        assert_relative_eq!(c.joints[1].norm(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn tip_inclination_rotates_toward_palm() {
        let seg = SegmentGeometry::with_tip(10.0, 3.0, 4.0, 0.5).unwrap();
        let d = PhalangeDesign::new(1, seg, 1.0).unwrap();
        let c = forward_kinematics(&d, &[0.0, 0.0], &Tolerances::default()).unwrap();
        assert_relative_eq!(c.tip.x, 10.0 + 4.0 * 0.5f64.cos(), epsilon = 1e-12);
        assert_relative_eq!(c.tip.y, -4.0 * 0.5f64.sin(), epsilon = 1e-12);
    }
}

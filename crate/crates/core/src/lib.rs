//! Static force transmission of a fin-ray style, cable-driven segmented finger
//! orthosis.
//!
//! A flexor cable runs through a passage in each diamond-shaped segment of a
//! pinned chain. Friction at each passage sheds a fixed fraction of the
//! tension, the cable presses on the passages where it changes direction, and
//! the moment of all these loads about the knuckle is balanced by the
//! fingertip force.
//!
//! * [`geometry`] lays the chain out around a cylindrical object.
//! * [`statics`] evaluates the closed-form fingertip force.
//! * [`oracle`] re-derives it from per-segment rigid-body equilibrium.
//! * [`design`] calibrates, checks range of motion, sweeps and optimizes.
//! * [`io`] holds the configuration schema and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod statics;

pub use error::{ModelError, Result};
pub use geometry::{
    cable_angles, conform, conform_angles, forward_kinematics, Configuration, Curvature,
    GraspScenario, PhalangeDesign, SegmentGeometry, Tolerances, Vec2,
};
pub use oracle::{
    solve_equilibrium, whole_chain_moment_check, LoadedChain, OracleOptions, OracleSolution,
    TerminalReading, TipMode,
};
pub use statics::{
    fingertip_force, kink_forces, moment_terms, tension_profile, StaticsOptions, StaticsSolution,
    TensionProfile,
};

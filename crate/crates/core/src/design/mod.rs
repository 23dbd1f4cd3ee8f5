//! Applications of the force model: requirement, calibration, range of motion
//! and design search.

pub mod calibrate;
pub mod requirement;
pub mod rom;
pub mod search;
pub mod space;

pub use calibrate::{
    calibrate_loss, plausibility, transmission_ratio, CalibrationDataset, CalibrationPoint,
    CalibrationReport, CalibrationSettings, ForceFixture, PlausibilityRow,
};
pub use requirement::{required_fingertip_force, GripRequirement, GRAVITY};
pub use rom::{rom_check, Digit, JointCheck, JointLimit, JointMapping, RomLimits, RomReport};
pub use search::NelderMeadSettings;
pub use space::{
    optimize, sweep, Axis, CountRange, DesignPoint, DesignSpace, OptimizeReport, SweepRow,
    SweepTable,
};

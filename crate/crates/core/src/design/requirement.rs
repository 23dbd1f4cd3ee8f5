//! Fingertip force needed to hold an object against gravity by friction alone.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.81;

/// Inputs of the friction-grip requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripRequirement {
    pub mass_kg: f64,
    /// Static friction coefficient between fingertip and object.
    pub mu: f64,
    pub safety_factor: f64,
    /// Number of fingertip contacts sharing the load.
    pub contacts: u32,
}

impl Default for GripRequirement {
    fn default() -> Self {
        Self {
            mass_kg: 1.0,
            mu: 0.4,
            safety_factor: 2.0,
            contacts: 2,
        }
    }
}

impl GripRequirement {
    pub fn force(&self) -> Result<f64> {
        required_fingertip_force(self.mass_kg, self.mu, self.safety_factor, self.contacts)
    }
}

/// `safety_factor · m · g / (contacts · μ)`: the normal force each contact must
/// supply so that friction carries the weight with margin.
pub fn required_fingertip_force(
    mass_kg: f64,
    mu: f64,
    safety_factor: f64,
    contacts: u32,
) -> Result<f64> {
    for (field, v) in [
        ("mass_kg", mass_kg),
        ("mu", mu),
        ("safety_factor", safety_factor),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(domain(field, format!("must be finite and > 0, got {v}")));
        }
    }
    if contacts == 0 {
        return Err(domain("contacts", "must be >= 1"));
    }
    Ok(safety_factor * mass_kg * GRAVITY / (f64::from(contacts) * mu))
}

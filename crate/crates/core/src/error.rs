use thiserror::Error;

/// Errors raised by the force-transmission model and the design tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field}: {message}")]
    Domain {
        field: &'static str,
        message: String,
    },

    #[error(
        "singular configuration at segment {segment}: cable-direction relation \
         sin(phi_i) = [cos(delta - theta_(i+1)) - cos(delta)] / [2 sin(delta - theta_(i+1)/2)] \
         has denominator {denominator:.3e}"
    )]
    SingularConfiguration { segment: usize, denominator: f64 },

    #[error(
        "infeasible conformation at segment {segment}: cable-direction relation gives \
         sin(phi_i) = {argument}, outside [-1, 1]"
    )]
    InfeasibleConformation { segment: usize, argument: f64 },

    #[error("degenerate fingertip lever: force line passes {arm:.3e} mm from the knuckle")]
    DegenerateLever { arm: f64 },

    #[error("shape mismatch in {what}: expected {expected} entries, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("equilibrium system is rank deficient (rank {rank} of {unknowns}); deficient direction {direction:?}")]
    RankDeficient {
        rank: usize,
        unknowns: usize,
        direction: Vec<f64>,
    },

    #[error("equilibrium system is inconsistent: residual {residual:.3e} exceeds {tolerance:.3e}")]
    Inconsistent { residual: f64, tolerance: f64 },

    #[error("calibration is unidentifiable: {0}")]
    Unidentifiable(String),

    #[error("no feasible design in the search space")]
    NoFeasibleDesign,

    #[error("invalid design space: {0}")]
    InvalidSpace(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn domain(field: &'static str, message: impl Into<String>) -> ModelError {
    ModelError::Domain {
        field,
        message: message.into(),
    }
}

use thiserror::Error;

/// Errors raised when model inputs fall outside their domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("number of interfering transmissions must be 0, 1 or 2, got {0}")]
    InterfererCount(u8),
    #[error("({0}, {1}, {2}) is not a probability distribution over the three modes")]
    OffSimplex(f64, f64, f64),
    #[error("lattice step {0} does not evenly divide 1")]
    LatticeStep(f64),
    #[error("grid step must lie in (0, {max}], got {step}")]
    GridStep { step: f64, max: f64 },
    #[error("simulation needs at least one slot")]
    NoSlots,
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn check(
    ok: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value,
            requirement,
        })
    }
}

use thiserror::Error;

use crate::hamiltonians::QubitRole;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDimensions(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("slot {slot} out of range for a space with {len} subsystems")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("slot {0} listed more than once")]
    DuplicateSlot(usize),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not unitary (||U^dagger U - I||_F = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("evolution time must be finite, got {0}")]
    NonFiniteTime(f64),
    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("comparison subspace is empty")]
    EmptySubspace,
    #[error("qubit {slot} plays {found:?}, but the operation requires {expected}")]
    WrongRole {
        slot: usize,
        expected: &'static str,
        found: QubitRole,
    },
    #[error("resonant drive level must be 0 or 1, got {0}")]
    InvalidDriveLevel(usize),
    #[error("invalid device parameters: {0}")]
    InvalidParams(String),
    #[error("{scheme} requires n >= {min}, got {n}")]
    InvalidQubitCount {
        scheme: &'static str,
        n: usize,
        min: usize,
    },
    #[error("step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error(
        "step {step}: {kind} applied to qubit {slot} with population {population:e} outside its defined domain"
    )]
    UndefinedDomain {
        step: usize,
        kind: &'static str,
        slot: usize,
        population: f64,
    },
    #[error("dense propagation on dimension {0} exceeds the supported limit")]
    TooLarge(usize),
    #[error("oracle variant must be 1..=4, got {0}")]
    InvalidVariant(u8),
    #[error("{qubit_type} level structure requires {field}")]
    MissingFrequency {
        qubit_type: &'static str,
        field: &'static str,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },

    #[error("slot {slot} used more than once")]
    RepeatedSlot { slot: usize },

    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tensor is not antisymmetric in the required slots")]
    NotAntisymmetric,

    #[error("degenerate metric")]
    DegenerateMetric,

    #[error("{quantity} is not representable in scalar kind {kind}")]
    NotRepresentable { quantity: String, kind: &'static str },

    #[error("jet order exhausted: {0}")]
    OrderExhausted(String),

    #[error("dimension {dim} does not satisfy {requirement}")]
    Dimension { dim: usize, requirement: String },

    #[error("pole: {0}")]
    Pole(String),

    #[error("conformal factor must be constant on a homogeneous frame")]
    NonConstantOnFrame,

    #[error("context is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("invalid structure constants: {0}")]
    InvalidStructure(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

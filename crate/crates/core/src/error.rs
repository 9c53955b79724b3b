use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by register construction, evolution, measurement and scenarios.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a register needs at least one subsystem")]
    EmptyRegister,
    #[error("duplicate subsystem name `{0}`")]
    DuplicateSubsystem(String),
    #[error("subsystem `{subsystem}` lists label `{label}` twice")]
    DuplicateLabel { subsystem: String, label: String },
    #[error("subsystem `{0}` needs at least two labels")]
    DimensionTooSmall(String),
    #[error("joint dimension overflows")]
    RegisterTooLarge,
    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),
    #[error("subsystem `{subsystem}` has no label `{label}`")]
    UnknownLabel { subsystem: String, label: String },
    #[error("assignment leaves subsystem `{0}` unspecified")]
    IncompleteAssignment(String),
    #[error("subsystem `{0}` is assigned more than once")]
    RepeatedSubsystem(String),
    #[error("labels must be distinct")]
    LabelCollision,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("amplitudes are not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("states live on different registers")]
    RegisterMismatch,
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("relabel mapping is not a permutation: {0}")]
    NotPermutation(String),
    #[error("outcome {outcome} is impossible (probability {probability:e})")]
    ImpossibleOutcome { outcome: String, probability: f64 },
    #[error("log entry `{0}` is not invertible")]
    NotInvertible(String),
    #[error("partial-measurement strength {0} is outside [0, 1]")]
    InvalidStrength(f64),
    #[error("erasure impossible: the suppressed branch has zero weight")]
    ErasureImpossible,
    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("subsystems {0} are not in a single basis state")]
    NotFactorizable(String),
    #[error("grid spacing {spacing} does not resolve width {width} (need at most {required})")]
    UnderResolved { spacing: f64, width: f64, required: f64 },
    #[error("domain [{x_min}, {x_max}] does not contain {what}")]
    DomainTooSmall { x_min: f64, x_max: f64, what: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` has no parameter `{name}`")]
    UnknownParameter { scenario: String, name: String },
    #[error("parameter `{name}` = {value} is out of range ({reason})")]
    ParameterOutOfRange { name: String, value: f64, reason: String },
    #[error("step `{step}`: {source}")]
    Step { step: String, source: Box<Error> },
}

impl Error {
    /// Wraps an error with the scenario step it came from.
    pub fn at_step(self, step: &str) -> Error {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step { step: step.into(), source: Box::new(e) },
        }
    }

    /// True if this is (or wraps) an impossible post-selection.
    pub fn is_impossible_outcome(&self) -> bool {
        match self {
            Error::ImpossibleOutcome { .. } | Error::ErasureImpossible => true,
            Error::Step { source, .. } => source.is_impossible_outcome(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the simulator and the post-processing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{requested} wires requested, the configured maximum is {max}")]
    TooManyWires { requested: usize, max: usize },

    #[error("state needs at least one wire")]
    NoWires,

    #[error("basis index {index} out of range for {wires} wires")]
    BasisOutOfRange { index: u64, wires: usize },

    #[error("wire {wire} out of range for a {wires}-wire state")]
    WireOutOfRange { wire: usize, wires: usize },

    #[error("wire {0} listed more than once")]
    DuplicateWire(usize),

    #[error("empty wire subset")]
    EmptyWireSet,

    #[error("gate acts on {expected} wires but {got} were given")]
    ArityMismatch { expected: usize, got: usize },

    #[error("matrix is {rows}x{cols}, expected a square power-of-two dimension")]
    BadMatrixShape { rows: usize, cols: usize },

    #[error("matrix is not unitary: |MM^† - I| = {deviation:e} at ({row}, {col})")]
    NotUnitary { row: usize, col: usize, deviation: f64 },

    #[error("map on {width} bits is not a bijection: value {image} is hit twice")]
    NotBijective { width: u32, image: u64 },

    #[error("register width mismatch: expected {expected} bits, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("squared norm drifted to {norm_sqr} (tolerance 1e-10)")]
    NormDrift { norm_sqr: f64 },

    #[error("measured outcome {outcome} carries zero probability mass")]
    ZeroMassOutcome { outcome: u64 },

    #[error("ancilla register holds probability mass {mass:e} away from zero")]
    AncillaNotZero { mass: f64 },

    #[error("gcd({value}, {modulus}) = {gcd}, expected 1")]
    NotCoprime { value: u64, modulus: u64, gcd: u64 },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("{g} does not generate the multiplicative group mod {p}")]
    NotAGenerator { g: u64, p: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inconsistent iterate oracle: {0}")]
    InconsistentOracle(String),

    #[error("trial budget of {trials} exhausted without a verified result")]
    BudgetExhausted { trials: usize },
}

impl Error {
    /// True for errors caused by bad inputs rather than by an unlucky run.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::NormDrift { .. }
                | Error::ZeroMassOutcome { .. }
                | Error::AncillaNotZero { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

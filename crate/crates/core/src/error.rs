use thiserror::Error;

/// Errors raised by the calculators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar input is outside its allowed domain.
    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Two states do not share a basis (atom count or mode list differ).
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// Tensor product of states that share a photon mode.
    #[error("overlapping photon mode {0} in tensor product")]
    OverlappingModes(String),

    /// A photon mode carries more quanta than the modeled regime allows.
    #[error("occupation {occupation} in mode {mode} exceeds the modeled maximum of {max}")]
    OccupationTooHigh {
        mode: String,
        occupation: u8,
        max: u8,
    },

    /// A state cannot be normalized because it has zero norm.
    #[error("cannot normalize a zero-norm state")]
    ZeroNorm,

    /// The input state is not of the form an operation expects.
    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    /// Operation undefined for this photonic qubit kind or detection pattern.
    #[error("invalid protocol input: {0}")]
    InvalidProtocol(String),

    /// Unknown level preset name.
    #[error("unknown preset `{name}`; valid names: {valid}")]
    UnknownPreset { name: String, valid: String },

    /// Iterative solver did not reach its tolerance.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: achieved relative error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// A transverse mode frequency is imaginary, so the linear chain is unstable.
    #[error("linear chain unstable: transverse mode {mode} has squared frequency {omega_sq:e} (zig-zag)")]
    ZigZag { mode: usize, omega_sq: f64 },

    /// The maximizer landed on the edge of its search bracket.
    #[error("no interior maximum in [{lo}, {hi}]: boundary values {f_lo:e}, {f_hi:e}")]
    NoInteriorMaximum {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Configuration file could not be parsed.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::OutOfRange {
            name,
            value,
            reason,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::range(name, value, "must lie in [0, 1]"))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::range(name, value, "must be positive and finite"))
    }
}

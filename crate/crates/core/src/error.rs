use alloc::string::String;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Arguments outside the domain of an operation (bad `p`, mixed rings, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation hit a pole. `residue` is filled in when it is known in closed form.
    #[error("pole at s = {at}")]
    Pole {
        at: Complex64,
        residue: Option<Complex64>,
    },

    /// A rational function was evaluated too close to one of its real poles.
    #[error("evaluation point {z} lies within {distance:e} of the pole {pole}")]
    PoleProximity {
        z: Complex64,
        pole: f64,
        distance: f64,
    },

    /// A numerical procedure could not reach the requested accuracy.
    #[error("accuracy failure: {0}")]
    Accuracy(String),

    /// Orbit search stopped at the depth limit before the pole system closed up.
    #[error("incomplete enumeration at depth {depth}: {reason}; raise max_depth")]
    IncompleteEnumeration { depth: usize, reason: String },

    /// The class of the seed form is not Hecke symmetric (`-A != A`).
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("form is not simple: {0}")]
    NotSimple(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(at: Complex64) -> Self {
        Error::Pole { at, residue: None }
    }
}

//! File formats, seeded sample grids, verification reports and the commands behind the
//! `hecke-rpf` binary.

pub mod commands;
pub mod input;
pub mod report;

use hecke_rpf_core::rpf::Precision;
use hecke_rpf_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use report::{Check, Format, Report, Row};

/// Environment variable that replaces the default precision (64 bits).
pub const PRECISION_ENV: &str = "HECKE_RPF_PRECISION";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("incomplete: {0}")]
    Incomplete(String),
    #[error("verification error: {0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<hecke_rpf_core::Error> for CliError {
    fn from(e: hecke_rpf_core::Error) -> Self {
        use hecke_rpf_core::Error as E;
        match e {
            E::IncompleteEnumeration { .. } => CliError::Incomplete(e.to_string()),
            E::Domain(_) | E::NotSimple(_) | E::SymmetryViolation(_) => {
                CliError::Input(e.to_string())
            }
            E::Pole { .. } | E::PoleProximity { .. } | E::Accuracy(_) => {
                CliError::Failed(e.to_string())
            }
        }
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass = 0,
    Fail = 1,
    Incomplete = 2,
    InputError = 3,
}

impl CliError {
    pub fn outcome(&self) -> Outcome {
        match self {
            CliError::Input(_) | CliError::Io(_) => Outcome::InputError,
            CliError::Incomplete(_) => Outcome::Incomplete,
            CliError::Failed(_) => Outcome::Fail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub precision_bits: u32,
    /// Base tolerance; individual checks scale it (see [`commands`]).
    pub tolerance: f64,
    pub sample_count: usize,
    /// Points on the strip grids of the Mellin-side checks.
    pub strip_points: usize,
    pub rng_seed: u64,
    pub output: Format,
    /// Orbit-search depth; `None` means `4p`.
    pub max_depth: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 64,
            tolerance: 1e-8,
            sample_count: 100,
            strip_points: 10,
            rng_seed: 0,
            output: Format::Json,
            max_depth: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Input("tolerance must be positive".into()));
        }
        if self.precision_bits < 53 {
            return Err(CliError::Input("precision must be at least 53 bits".into()));
        }
        if self.sample_count == 0 || self.strip_points == 0 {
            return Err(CliError::Input("sample counts must be positive".into()));
        }
        Ok(())
    }

    pub fn precision(&self) -> Result<Precision, CliError> {
        Ok(Precision::from_bits(self.precision_bits)?)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(stream);
        rng
    }

    /// Seeded points of the upper half-plane, `|x| <= 3`, `0.05 <= y <= 5` (log-uniform).
    pub fn half_plane_samples(&self) -> Vec<C64> {
        let mut rng = self.rng(1);
        (0..self.sample_count)
            .map(|_| {
                let x = rng.gen_range(-3.0..3.0);
                let y = (rng.gen_range(0.05f64.ln()..5.0f64.ln())).exp();
                C64::new(x, y)
            })
            .collect()
    }

    /// Seeded points of `0 < Re s < 2k`, at least `0.05` from every integer, `|Im s| <= 2`.
    pub fn strip_samples(&self, k: u32) -> Vec<C64> {
        let mut rng = self.rng(2);
        let width = 2.0 * k as f64;
        let mut out = Vec::with_capacity(self.strip_points);
        while out.len() < self.strip_points {
            let sigma: f64 = rng.gen_range(0.05..width - 0.05);
            let t: f64 = rng.gen_range(-2.0..2.0);
            if (sigma - sigma.round()).abs() >= 0.05 {
                out.push(C64::new(sigma, t));
            }
        }
        out
    }
}

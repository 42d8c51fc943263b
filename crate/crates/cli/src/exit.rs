//! Exit codes and the mapping from library errors onto them.

use std::fmt;
use std::path::Path;

use mixsynth::axial::AxialError;
use mixsynth::channels::ChannelError;
use mixsynth::gateset::GateError;
use mixsynth::hull::HullError;
use mixsynth::io::IoError;
use mixsynth::mixing::MixingError;
use mixsynth::savings::SavingsError;

pub const OK: u8 = 0;
/// Bad flags, unreadable input paths, invalid targets or precisions.
pub const CONFIG_ERROR: u8 = 2;
/// An input file is not valid JSON or violates its schema.
pub const SCHEMA_ERROR: u8 = 3;
/// The oracle failed or broke its contract.
pub const ORACLE_ERROR: u8 = 4;
/// A solver stalled or an iteration cap was hit.
pub const NUMERICAL_ERROR: u8 = 5;
/// An output file could not be written.
pub const OUTPUT_ERROR: u8 = 6;
/// `certify`: the lower bound exceeds the claimed bound.
pub const BOUND_VIOLATED: u8 = 7;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(CONFIG_ERROR, message)
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        Self::config(format!("cannot read {}: {err}", path.display()))
    }

    pub fn write(path: &Path, err: std::io::Error) -> Self {
        Self::new(OUTPUT_ERROR, format!("cannot write {}: {err}", path.display()))
    }

    pub fn prefixed(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }

    pub fn schema(path: &Path, err: IoError) -> Self {
        Self::new(SCHEMA_ERROR, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn gate_code(e: &GateError) -> u8 {
    match e {
        GateError::BudgetTooLarge { .. } | GateError::InvalidPrecision(_) | GateError::OutOfDomain(_) => CONFIG_ERROR,
        GateError::ZNotFree => CONFIG_ERROR,
        _ => ORACLE_ERROR,
    }
}

impl From<GateError> for CliError {
    fn from(e: GateError) -> Self {
        Self::new(gate_code(&e), e.to_string())
    }
}

impl From<HullError> for CliError {
    fn from(e: HullError) -> Self {
        let code = match &e {
            HullError::InvalidConfig(_) | HullError::OutOfRegime(_) | HullError::OutOfDomain(_) => CONFIG_ERROR,
            HullError::OracleContract { .. } => ORACLE_ERROR,
            HullError::Oracle(g) => gate_code(g),
            _ => NUMERICAL_ERROR,
        };
        Self::new(code, e.to_string())
    }
}

impl From<AxialError> for CliError {
    fn from(e: AxialError) -> Self {
        let code = match &e {
            AxialError::NotAxial
            | AxialError::NotSingleQubit(_)
            | AxialError::InvalidPrecision(_)
            | AxialError::OutOfRegime(_) => CONFIG_ERROR,
            AxialError::NoOppositeRotation { .. } => ORACLE_ERROR,
            AxialError::Oracle(g) => gate_code(g),
            _ => NUMERICAL_ERROR,
        };
        Self::new(code, e.to_string())
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        let code = match &e {
            ChannelError::DimensionTooLarge(_) | ChannelError::InvalidTolerance(_) => CONFIG_ERROR,
            ChannelError::SolverStall(_) | ChannelError::Linalg(_) => NUMERICAL_ERROR,
            _ => SCHEMA_ERROR,
        };
        Self::new(code, e.to_string())
    }
}

impl From<MixingError> for CliError {
    fn from(e: MixingError) -> Self {
        let code = match &e {
            MixingError::Linalg(_) => NUMERICAL_ERROR,
            MixingError::Channel(c) => return CliError::from(c.clone()),
            _ => SCHEMA_ERROR,
        };
        Self::new(code, e.to_string())
    }
}

impl From<SavingsError> for CliError {
    fn from(e: SavingsError) -> Self {
        Self::config(e.to_string())
    }
}

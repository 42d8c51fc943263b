//! Target specifications: `Rz(θ)`, `Rx(θ)`, `Ry(θ)` or a path to a matrix JSON file.

use std::fs;
use std::path::Path;

use mixsynth::io;
use mixsynth::linalg::{pauli, UnitaryMatrix};

use crate::exit::CliError;

/// `R_P(θ) = e^{−iθP/2}`.
pub fn named_rotation(spec: &str) -> Option<Result<UnitaryMatrix, CliError>> {
    let s = spec.trim();
    let axis = match s.get(..3)? {
        "Rx(" | "rx(" => [1.0, 0.0, 0.0],
        "Ry(" | "ry(" => [0.0, 1.0, 0.0],
        "Rz(" | "rz(" => [0.0, 0.0, 1.0],
        _ => return None,
    };
    let inner = s[3..].strip_suffix(')')?;
    Some(match inner.trim().parse::<f64>() {
        Ok(theta) if theta.is_finite() => Ok(pauli::rotation(-0.5 * theta, axis)),
        _ => Err(CliError::config(format!("invalid rotation angle in {spec:?}"))),
    })
}

pub fn parse_target(spec: &str) -> Result<UnitaryMatrix, CliError> {
    if let Some(r) = named_rotation(spec) {
        return r;
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    // A non-unitary matrix is a bad target rather than a malformed file.
    io::read_unitary(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

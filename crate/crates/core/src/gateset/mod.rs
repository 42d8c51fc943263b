//! Gate sets with costs, gate words, and unitary synthesis oracles.
//!
//! Two oracles implement [`SynthesisOracle`]: an exhaustive search over the
//! single-qubit Clifford+T group up to a T-count budget, and a synthetic
//! oracle that returns deterministic pseudo-random points `V e^{iH}` with
//! `‖H‖ ≤ 0.9ε` so that small-`ε` behaviour can be studied without a
//! number-theoretic synthesizer.
//!
//! Comparisons between a synthesized unitary and its target are made after
//! choosing the global phase that minimizes `‖e^{iφ}U − V‖`; the returned
//! [`CostedUnitary`] carries that phase.

mod clifford_t;
mod synthetic;

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{eigenphase_arc, pauli, ComplexMatrix, LinalgError, UnitaryMatrix};

pub use clifford_t::{
    enumerate_clifford_t, exhaustive_synth, CliffordTEntry, CliffordTTable, ExhaustiveOracle,
    MAX_ENUMERATED_TCOUNT,
};
pub use synthetic::{synthetic_synth, SyntheticOracle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("duplicate gate name {0:?}")]
    DuplicateName(String),
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("gate {name:?} has dimension {found}, gate set has {expected}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("gate {name:?} has invalid cost {cost}")]
    InvalidCost { name: String, cost: f64 },
    #[error("T-count budget {requested} exceeds the enumeration limit {max}")]
    BudgetTooLarge { requested: usize, max: usize },
    #[error("no word with T-count ≤ {budget} reaches precision {eps}")]
    UnreachablePrecision { eps: f64, budget: usize },
    #[error("gate set has no zero-cost Pauli Z")]
    ZNotFree,
    #[error("target is outside the oracle domain {0}")]
    OutOfDomain(OracleDomain),
    #[error("precision must be positive and finite, got {0}")]
    InvalidPrecision(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: String,
    pub unitary: UnitaryMatrix,
    pub cost: f64,
}

/// A finite gate set `𝒢` with cost function `𝔠: 𝒢 → ℝ⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    dim: usize,
    gates: Vec<Gate>,
}

impl GateSet {
    pub fn new(gates: Vec<Gate>) -> Result<Self, GateError> {
        let dim = gates.first().map(|g| g.unitary.dim()).unwrap_or(1);
        let mut seen = HashSet::new();
        for g in &gates {
            if !seen.insert(g.name.clone()) {
                return Err(GateError::DuplicateName(g.name.clone()));
            }
            if g.unitary.dim() != dim {
                return Err(GateError::DimensionMismatch {
                    name: g.name.clone(),
                    expected: dim,
                    found: g.unitary.dim(),
                });
            }
            if !(g.cost >= 0.0 && g.cost.is_finite()) {
                return Err(GateError::InvalidCost {
                    name: g.name.clone(),
                    cost: g.cost,
                });
            }
            if g.name.is_empty() || g.name.chars().any(char::is_whitespace) {
                return Err(GateError::UnknownGate(g.name.clone()));
            }
        }
        Ok(Self { dim, gates })
    }

    /// Single-qubit Clifford+T with `𝔠(T) = 𝔠(T†) = 1` and zero-cost Cliffords.
    pub fn clifford_t() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = Complex64::from_polar(1.0, PI / 4.0);
        let gate = |name: &str, m: ComplexMatrix, cost: f64| Gate {
            name: name.into(),
            unitary: UnitaryMatrix::new(m).expect("built-in gate is unitary"),
            cost,
        };
        let diag = |a: Complex64, b: Complex64| ComplexMatrix::diagonal(&[a, b]);
        let hadamard = ComplexMatrix::from_vec(2, vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])
            .expect("finite");
        Self::new(vec![
            gate("H", hadamard, 0.0),
            gate("S", diag(c(1., 0.), c(0., 1.)), 0.0),
            gate("Sdg", diag(c(1., 0.), c(0., -1.)), 0.0),
            gate("T", diag(c(1., 0.), t), 1.0),
            gate("Tdg", diag(c(1., 0.), t.conj()), 1.0),
            gate("X", pauli::x(), 0.0),
            gate("Y", pauli::y(), 0.0),
            gate("Z", pauli::z(), 0.0),
        ])
        .expect("built-in gate set is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn get(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// Builds the word `W₁W₂…W_N` (matrix product in the given order).
    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<GateWord, GateError> {
        let mut m = UnitaryMatrix::identity(self.dim);
        let mut cost = 0.0;
        let mut owned = Vec::with_capacity(names.len());
        for n in names {
            let g = self
                .get(n.as_ref())
                .ok_or_else(|| GateError::UnknownGate(n.as_ref().to_string()))?;
            m = m.compose(&g.unitary);
            cost += g.cost;
            owned.push(g.name.clone());
        }
        Ok(GateWord {
            names: owned,
            matrix: m,
            cost,
        })
    }

    /// Parses the whitespace-separated text format, e.g. `"H T S T H"`.
    pub fn parse_word(&self, text: &str) -> Result<GateWord, GateError> {
        let names: Vec<&str> = text.split_whitespace().collect();
        self.word(&names)
    }

    /// True when the set contains Pauli `Z` (up to phase) at zero cost.
    pub fn has_free_z(&self) -> bool {
        if self.dim != 2 {
            return false;
        }
        let z = UnitaryMatrix::new(pauli::z()).expect("Z is unitary");
        self.get("Z").is_some_and(|g| {
            g.cost == 0.0 && phase_aligned_distance(&g.unitary, &z).is_ok_and(|d| d < 1e-12)
        })
    }
}

/// A gate sequence with its realized matrix and total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GateWord {
    names: Vec<String>,
    matrix: UnitaryMatrix,
    cost: f64,
}

impl GateWord {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names.join(" "))
    }
}

/// Output of a synthesis oracle.
///
/// When a word is present, `unitary = e^{i·global_phase} · word.matrix()`.
/// `distance` is `‖unitary − V‖` for the target `V` the oracle was asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct CostedUnitary {
    pub unitary: UnitaryMatrix,
    pub word: Option<GateWord>,
    pub global_phase: f64,
    pub cost: f64,
    pub distance: f64,
}

/// The family of targets an oracle accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleDomain {
    /// All single-qubit unitaries.
    Su2,
    /// Rotations `e^{iθZ}` up to global phase.
    Axial,
    /// All unitaries of the given dimension.
    Unitary(usize),
}

impl OracleDomain {
    pub fn dim(&self) -> usize {
        match self {
            OracleDomain::Su2 | OracleDomain::Axial => 2,
            OracleDomain::Unitary(d) => *d,
        }
    }

    pub fn contains(&self, v: &UnitaryMatrix) -> bool {
        if v.dim() != self.dim() {
            return false;
        }
        match self {
            OracleDomain::Axial => is_axial(v),
            _ => true,
        }
    }
}

impl fmt::Display for OracleDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleDomain::Su2 => write!(f, "SU(2)"),
            OracleDomain::Axial => write!(f, "axial"),
            OracleDomain::Unitary(d) => write!(f, "U({d})"),
        }
    }
}

/// Diagonal single-qubit unitary, i.e. an axial rotation up to global phase.
pub fn is_axial(v: &UnitaryMatrix) -> bool {
    let m = v.matrix();
    m.dim() == 2 && m[(0, 1)].norm() <= 1e-12 && m[(1, 0)].norm() <= 1e-12
}

/// A unitary synthesis algorithm: `synth(V, ε)` returns `U` with `‖U − V‖ ≤ ε`
/// and cost at most `cost_bound(ε)`, or fails explicitly.
pub trait SynthesisOracle {
    fn domain(&self) -> OracleDomain;

    fn gate_set(&self) -> &GateSet;

    /// Worst-case cost `f(ε)`.
    fn cost_bound(&self, eps: f64) -> f64;

    /// `call_index` distinguishes repeated queries; deterministic oracles may ignore it.
    fn synth(
        &self,
        target: &UnitaryMatrix,
        eps: f64,
        call_index: u64,
    ) -> Result<CostedUnitary, GateError>;
}

/// Global phase `φ` minimizing `‖e^{iφ}U − V‖`, and the aligned unitary.
///
/// The optimal phase centres the smallest arc containing the spectrum of `V†U`.
pub fn phase_align(u: &UnitaryMatrix, target: &UnitaryMatrix) -> Result<(f64, UnitaryMatrix), LinalgError> {
    if u.dim() != target.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: u.dim(),
            right: target.dim(),
        });
    }
    let arc = eigenphase_arc(&target.adjoint().compose(u))?;
    let phase = -arc.center;
    Ok((phase, u.with_phase(phase)))
}

/// `min_φ ‖e^{iφ}U − V‖`.
pub fn phase_aligned_distance(u: &UnitaryMatrix, target: &UnitaryMatrix) -> Result<f64, LinalgError> {
    let (_, aligned) = phase_align(u, target)?;
    Ok(aligned.distance(target))
}

/// Phase-invariant key: the matrix with its first non-negligible entry made
/// real positive, quantized to `resolution`.
pub fn phase_fingerprint(m: &ComplexMatrix, resolution: f64) -> Vec<i64> {
    let pivot = m
        .as_slice()
        .iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = pivot.conj() / pivot.norm();
    m.as_slice()
        .iter()
        .flat_map(|&z| {
            let w = z * rot;
            [(w.re / resolution).round() as i64, (w.im / resolution).round() as i64]
        })
        .collect()
}

/// The word `Z·w·Z` for a zero-cost Pauli `Z`.
///
/// For a target commuting with `Z` (any axial rotation) the distance to the
/// target is unchanged, so it is carried over.
pub fn conjugate_by_z(gates: &GateSet, w: &CostedUnitary) -> Result<CostedUnitary, GateError> {
    if !gates.has_free_z() || w.unitary.dim() != 2 {
        return Err(GateError::ZNotFree);
    }
    let z = &gates.get("Z").ok_or(GateError::ZNotFree)?.unitary;
    let unitary = z.compose(&w.unitary).compose(z);
    let word = match &w.word {
        Some(word) => {
            let mut names = Vec::with_capacity(word.len() + 2);
            names.push("Z".to_string());
            names.extend(word.names().iter().cloned());
            names.push("Z".to_string());
            Some(gates.word(&names)?)
        }
        None => None,
    };
    Ok(CostedUnitary {
        unitary,
        word,
        global_phase: w.global_phase,
        cost: w.cost,
        distance: w.distance,
    })
}

pub(crate) fn check_eps(eps: f64) -> Result<(), GateError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(GateError::InvalidPrecision(eps))
    }
}

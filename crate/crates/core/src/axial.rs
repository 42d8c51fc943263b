//! Four-unitary mixing for Z-axis rotations.
//!
//! Given `U₁ ≈ V` with `V†U₁ = α_𝟙𝟙 + iα_X X + iα_Y Y + iα_Z Z`, a second
//! unitary `U₂` on the opposite side of `V` is synthesized against a shifted
//! target `V′ = V e^{iδZ}`. Conjugating both by a free Pauli `Z` flips the sign of
//! their X and Y components, and the weights
//! `{(1−q)/2, q/2, (1−q)/2, q/2}` with `q = α_Z/(α_Z − β_Z)` cancel the Z
//! component, leaving `Σ p_j V†U_j` a multiple of the identity.

use thiserror::Error;

use crate::gateset::{conjugate_by_z, is_axial, CostedUnitary, GateError, SynthesisOracle};
use crate::hull::THEOREM_REGIME_EPS;
use crate::linalg::{pauli, ComplexMatrix, LinalgError, UnitaryMatrix};
use crate::mixing::{Construction, Member, MixingEnsemble, MixingError};

use num_complex::Complex64;

/// `|α_Z|` at or below this counts as an exact match.
pub const ALPHA_Z_ZERO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxialError {
    #[error("target is not an axial rotation")]
    NotAxial,
    #[error("expansion requires single-qubit operators, got dimension {0}")]
    NotSingleQubit(usize),
    #[error("identity coefficient {0:e} is too small to fix the global phase")]
    PhaseDegenerate(f64),
    #[error("Pauli expansion reconstructs with error {0:e}")]
    Reconstruction(f64),
    #[error("precision {0} outside (0, 1)")]
    InvalidPrecision(f64),
    #[error("eps = {0} is outside the theorem regime eps < 0.01")]
    OutOfRegime(f64),
    #[error("second unitary has alpha_Z = {alpha_z:e} and beta_Z = {beta_z:e}, the same rotation class")]
    NoOppositeRotation { alpha_z: f64, beta_z: f64 },
    #[error(transparent)]
    Oracle(#[from] GateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Mixing(#[from] MixingError),
}

/// `V†U = e^{iφ}(a_id 𝟙 + i a_x X + i a_y Y + i a_z Z)` with `a_id ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliExpansion {
    pub a_id: f64,
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    /// The global phase `φ` removed by the canonicalization.
    pub phase: f64,
}

impl PauliExpansion {
    pub fn norm_sqr(&self) -> f64 {
        self.a_id * self.a_id + self.a_x * self.a_x + self.a_y * self.a_y + self.a_z * self.a_z
    }

    /// `a_id 𝟙 + i a_x X + i a_y Y + i a_z Z` (without the phase).
    pub fn matrix(&self) -> ComplexMatrix {
        let i = Complex64::new(0.0, 1.0);
        let gen = &(&pauli::x().scale_real(self.a_x) + &pauli::y().scale_real(self.a_y)) + &pauli::z().scale_real(self.a_z);
        &ComplexMatrix::identity(2).scale_real(self.a_id) + &gen.scale(i)
    }
}

pub fn pauli_expand(v: &UnitaryMatrix, u: &UnitaryMatrix) -> Result<PauliExpansion, AxialError> {
    for d in [v.dim(), u.dim()] {
        if d != 2 {
            return Err(AxialError::NotSingleQubit(d));
        }
    }
    let m = v.adjoint().compose(u).into_matrix();
    // e^{2iφ} = det M; of the two square roots pick the one giving a_id ≥ 0.
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let mut phase = 0.5 * det.arg();
    let half_trace = m.trace() * 0.5;
    let mut rot = Complex64::from_polar(1.0, -phase);
    let mut a_id = (half_trace * rot).re;
    if a_id < 0.0 {
        phase = if phase > 0.0 { phase - std::f64::consts::PI } else { phase + std::f64::consts::PI };
        rot = -rot;
        a_id = -a_id;
    }
    if a_id <= 1e-12 {
        return Err(AxialError::PhaseDegenerate(a_id));
    }
    let canon = m.scale(rot);
    // Tr(σ M)/2 = i a_σ.
    let coeff = |s: ComplexMatrix| ((&s * &canon).trace() * 0.5).im;
    let e = PauliExpansion {
        a_id,
        a_x: coeff(pauli::x()),
        a_y: coeff(pauli::y()),
        a_z: coeff(pauli::z()),
        phase,
    };
    let err = (&e.matrix().scale(Complex64::from_polar(1.0, phase)) - &m).max_abs();
    if err > 1e-10 {
        return Err(AxialError::Reconstruction(err));
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationClass {
    Over,
    Under,
}

/// Over-rotation when `a_z ≥ 0`.
pub fn classify_rotation(p: &PauliExpansion) -> RotationClass {
    if p.a_z >= 0.0 {
        RotationClass::Over
    } else {
        RotationClass::Under
    }
}

/// `δ = 2 arcsin(ε/2)`, so that `‖V − V e^{iδZ}‖ = ε`.
pub fn delta_magnitude(eps: f64) -> f64 {
    2.0 * (0.5 * eps).asin()
}

/// `V′ = V e^{iδZ}` with `|δ| = 2 arcsin(ε/2)` and the sign of `direction`;
/// returns `V′` and the signed `δ`.
pub fn shifted_target(v: &UnitaryMatrix, eps: f64, direction: f64) -> Result<(UnitaryMatrix, f64), AxialError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AxialError::InvalidPrecision(eps));
    }
    if v.dim() != 2 || !is_axial(v) {
        return Err(AxialError::NotAxial);
    }
    let delta = delta_magnitude(eps).copysign(direction);
    Ok((v.compose(&pauli::axial(delta)), delta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxialEnsemble {
    pub ensemble: MixingEnsemble,
    pub q: f64,
    /// Signed shift of the second target; zero when only one member is used.
    pub delta: f64,
    pub alpha: PauliExpansion,
    pub beta: Option<PauliExpansion>,
    pub note: Option<String>,
}

pub const SINGLE_MEMBER_NOTE: &str = "second rotation is not needed";

/// Builds the four-member ensemble for an axial target.
pub fn build_axial_ensemble<O: SynthesisOracle + ?Sized>(
    v: &UnitaryMatrix,
    oracle: &O,
    eps: f64,
) -> Result<AxialEnsemble, AxialError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AxialError::InvalidPrecision(eps));
    }
    if v.dim() != 2 || !is_axial(v) {
        return Err(AxialError::NotAxial);
    }
    let gates = oracle.gate_set();
    if !gates.has_free_z() {
        return Err(GateError::ZNotFree.into());
    }
    let u1 = oracle.synth(v, eps, 0)?;
    let alpha = pauli_expand(v, &u1.unitary)?;
    let member = |cu: &CostedUnitary, phase: f64, p: f64| Member {
        unitary: cu.unitary.with_phase(-phase),
        word: cu.word.clone(),
        cost: cu.cost,
        p,
    };

    if alpha.a_z.abs() <= ALPHA_Z_ZERO {
        let ensemble = MixingEnsemble::new(
            v.clone(),
            vec![member(&u1, alpha.phase, 1.0)],
            Some(eps),
            Construction::Axial { q: 0.0, delta: 0.0 },
        )?;
        return Ok(AxialEnsemble {
            ensemble,
            q: 0.0,
            delta: 0.0,
            alpha,
            beta: None,
            note: Some(SINGLE_MEMBER_NOTE.into()),
        });
    }

    // Shift the second target against U₁'s rotation sense so that U₂ lands on
    // the other side of V.
    let (v_shifted, delta) = shifted_target(v, eps, -alpha.a_z)?;
    let u2 = oracle.synth(&v_shifted, eps, 1)?;
    let beta = pauli_expand(v, &u2.unitary)?;
    if classify_rotation(&beta) == classify_rotation(&alpha) {
        return Err(AxialError::NoOppositeRotation {
            alpha_z: alpha.a_z,
            beta_z: beta.a_z,
        });
    }
    let u3 = conjugate_by_z(gates, &u1)?;
    let u4 = conjugate_by_z(gates, &u2)?;
    let q = q_weight(alpha.a_z, beta.a_z);
    let (pa, pb) = (0.5 * (1.0 - q), 0.5 * q);
    let members = vec![
        member(&u1, alpha.phase, pa),
        member(&u2, beta.phase, pb),
        member(&u3, alpha.phase, pa),
        member(&u4, beta.phase, pb),
    ];
    let ensemble = MixingEnsemble::new(v.clone(), members, Some(eps), Construction::Axial { q, delta })?;
    Ok(AxialEnsemble {
        ensemble,
        q,
        delta,
        alpha,
        beta: Some(beta),
        note: None,
    })
}

/// `q = α_Z/(α_Z − β_Z)`, the weight that cancels the Z component.
pub fn q_weight(alpha_z: f64, beta_z: f64) -> f64 {
    alpha_z / (alpha_z - beta_z)
}

/// `½(a² + 2b)` with `a = 2ε`, `b = 3ε²`, i.e. `5ε²`.
pub fn theorem2_bound(eps: f64) -> Result<f64, AxialError> {
    if !(eps > 0.0 && eps < THEOREM_REGIME_EPS) {
        return Err(AxialError::OutOfRegime(eps));
    }
    let (a, b) = (2.0 * eps, 3.0 * eps * eps);
    Ok(0.5 * (a * a + 2.0 * b))
}

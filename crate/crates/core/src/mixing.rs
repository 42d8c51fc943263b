//! Mixing ensembles and the two lemmas that bound their channel error.
//!
//! For an ensemble `{(p_j, U_j)}` approximating `V`, with
//! `a = max_j ‖U_j − V‖` and `b = ‖Σ_j p_j U_j − V‖`, the mixed channel
//! satisfies `‖ℰ − 𝒱‖⋄ ≤ a² + 2b`. When `U_j = V e^{iH_j}` with `‖H_j‖ ≤ c`
//! and `Σ_j p_j H_j = 0`, one may take `a = c + c²/2` and `b = c²/2`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::channels::{ChannelError, MixedUnitaryChannel};
use crate::gateset::GateWord;
use crate::linalg::{eigvalsh, expi, operator_norm, ComplexMatrix, HermitianMatrix, LinalgError, UnitaryMatrix};

const WEIGHT_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixingError {
    #[error("ensemble has no members")]
    Empty,
    #[error("weights are not a probability vector: {0}")]
    InvalidWeights(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("hypothesis violated at index {index}: {value:e} > {bound:e}")]
    HypothesisViolated { index: usize, value: f64, bound: f64 },
    #[error("convex-combination property violated: {value:e} > {bound:e}")]
    PropertyViolated { value: f64, bound: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub unitary: UnitaryMatrix,
    pub word: Option<GateWord>,
    pub cost: f64,
    pub p: f64,
}

/// How an ensemble was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    Hull,
    Axial { q: f64, delta: f64 },
    /// An input ensemble with no construction metadata.
    External,
}

/// `{(p_j, U_j)}` approximating the target `V`, with the Lemma-1 diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingEnsemble {
    target: UnitaryMatrix,
    members: Vec<Member>,
    eps: Option<f64>,
    construction: Construction,
    a: f64,
    b: f64,
    residual: Option<f64>,
}

impl MixingEnsemble {
    pub fn new(
        target: UnitaryMatrix,
        members: Vec<Member>,
        eps: Option<f64>,
        construction: Construction,
    ) -> Result<Self, MixingError> {
        if members.is_empty() {
            return Err(MixingError::Empty);
        }
        let weights: Vec<f64> = members.iter().map(|m| m.p).collect();
        check_simplex(&weights)?;
        for m in &members {
            if m.unitary.dim() != target.dim() {
                return Err(MixingError::DimensionMismatch {
                    left: target.dim(),
                    right: m.unitary.dim(),
                });
            }
        }
        let a = members
            .iter()
            .map(|m| m.unitary.distance(&target))
            .fold(0.0, f64::max);
        let mut mean = ComplexMatrix::zeros(target.dim());
        for m in &members {
            mean = &mean + &m.unitary.matrix().scale_real(m.p);
        }
        let b = operator_norm(&(&mean - target.matrix()));
        Ok(Self {
            target,
            members,
            eps,
            construction,
            a,
            b,
            residual: None,
        })
    }

    /// Records `‖Σ_j p_j H_j‖`, the leftover of an inexact convex combination.
    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }

    pub fn target(&self) -> &UnitaryMatrix {
        &self.target
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// `max_j ‖U_j − V‖`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `‖Σ_j p_j U_j − V‖`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    pub fn max_cost(&self) -> f64 {
        self.members.iter().map(|m| m.cost).fold(0.0, f64::max)
    }

    /// The channel `Σ_j p_j U_j ρ U_j†`; zero-weight members are dropped.
    pub fn channel(&self) -> Result<MixedUnitaryChannel, MixingError> {
        let terms = self
            .members
            .iter()
            .filter(|m| m.p > 0.0)
            .map(|m| (m.p, m.unitary.clone()))
            .collect();
        Ok(MixedUnitaryChannel::new(terms)?)
    }
}

fn check_simplex(w: &[f64]) -> Result<(), MixingError> {
    if let Some(bad) = w.iter().find(|x| !(**x >= 0.0 && **x <= 1.0)) {
        return Err(MixingError::InvalidWeights(format!("entry {bad} outside [0, 1]")));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(MixingError::InvalidWeights(format!("sum is {sum}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub a: f64,
    pub b: f64,
    /// Bound on `‖H_j‖` when the report comes from Hermitian data.
    pub c: Option<f64>,
    /// `a² + 2b`, bounding `‖ℰ − 𝒱‖⋄`.
    pub bound_diamond_norm: f64,
    /// `½(a² + 2b)`, bounding `d⋄(ℰ, 𝒱)`.
    pub bound_diamond_distance: f64,
    /// `‖Σ_j w_j H_j‖`, added to `b` when nonzero.
    pub residual: Option<f64>,
    /// Every `‖e^{iH_j} − 𝟙‖ ≤ c + c²/2` was verified.
    pub property1_holds: Option<bool>,
    /// `‖Σ_j w_j e^{iH_j} − 𝟙‖ ≤ c²/2 + residual` was verified.
    pub property2_holds: Option<bool>,
}

impl LemmaReport {
    fn from_ab(a: f64, b: f64) -> Self {
        let norm = a * a + 2.0 * b;
        Self {
            a,
            b,
            c: None,
            bound_diamond_norm: norm,
            bound_diamond_distance: 0.5 * norm,
            residual: None,
            property1_holds: None,
            property2_holds: None,
        }
    }
}

/// `a`, `b` and the implied diamond bound for an ensemble.
pub fn lemma1_report(ens: &MixingEnsemble) -> LemmaReport {
    let mut r = LemmaReport::from_ab(ens.a, ens.b);
    r.residual = ens.residual;
    r
}

/// Verifies both conclusions for `U_j = e^{iH_j}` relative to the identity and
/// returns the constants `a = c + c²/2`, `b = c²/2 + ‖Σ_j w_j H_j‖`.
pub fn lemma2_check(hs: &[HermitianMatrix], weights: &[f64], c: f64) -> Result<LemmaReport, MixingError> {
    if hs.is_empty() {
        return Err(MixingError::Empty);
    }
    if hs.len() != weights.len() {
        return Err(MixingError::InvalidWeights(format!(
            "{} weights for {} operators",
            weights.len(),
            hs.len()
        )));
    }
    check_simplex(weights)?;
    let dim = hs[0].dim();
    let slack = |bound: f64| bound * (1.0 + 1e-12) + 1e-15;

    let mut combo = ComplexMatrix::zeros(dim);
    for (index, h) in hs.iter().enumerate() {
        if h.dim() != dim {
            return Err(MixingError::DimensionMismatch {
                left: dim,
                right: h.dim(),
            });
        }
        let norm = h.norm();
        if norm > slack(c) {
            return Err(MixingError::HypothesisViolated {
                index,
                value: norm,
                bound: c,
            });
        }
        combo = &combo + &h.matrix().scale_real(weights[index]);
    }
    let residual = operator_norm(&combo);

    let a = c + 0.5 * c * c;
    let id = ComplexMatrix::identity(dim);
    let mut mean = ComplexMatrix::zeros(dim);
    for (index, h) in hs.iter().enumerate() {
        let u = expi(h)?;
        let dist = operator_norm(&(u.matrix() - &id));
        if dist > slack(a) {
            return Err(MixingError::HypothesisViolated {
                index,
                value: dist,
                bound: a,
            });
        }
        mean = &mean + &u.matrix().scale_real(weights[index]);
    }
    let b = 0.5 * c * c + residual;
    let value = operator_norm(&(&mean - &id));
    if value > slack(b) {
        return Err(MixingError::PropertyViolated { value, bound: b });
    }

    let mut r = LemmaReport::from_ab(a, b);
    r.c = Some(c);
    r.residual = Some(residual);
    r.property1_holds = Some(true);
    r.property2_holds = Some(true);
    Ok(r)
}

/// `n` i.i.d. member indices drawn with ChaCha20 (seeded by `seed_from_u64`)
/// by inverse-CDF over the members in stored order; each draw uses one
/// `u64` mapped to `[0, 1)` as `(x >> 11)·2⁻⁵³`.
pub fn sample_ensemble(ens: &MixingEnsemble, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut cdf = Vec::with_capacity(ens.members.len());
    let mut acc = 0.0;
    for m in &ens.members {
        acc += m.p;
        cdf.push(acc);
    }
    let last = ens
        .members
        .iter()
        .rposition(|m| m.p > 0.0)
        .unwrap_or(ens.members.len() - 1);
    (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            cdf.iter().position(|&c| u < c).map_or(last, |k| k.min(last))
        })
        .collect()
}

/// `ℰ(ρ)` for a density matrix `ρ`.
pub fn apply_channel(ens: &MixingEnsemble, rho: &ComplexMatrix) -> Result<ComplexMatrix, MixingError> {
    if rho.dim() != ens.dim() {
        return Err(MixingError::DimensionMismatch {
            left: ens.dim(),
            right: rho.dim(),
        });
    }
    let herm = rho.hermiticity_defect();
    if herm > STATE_TOL {
        return Err(MixingError::InvalidState(format!("not Hermitian (defect {herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(MixingError::InvalidState(format!("trace is {tr}")));
    }
    let min = eigvalsh(&HermitianMatrix::symmetrized(rho))?[0];
    if min < -STATE_TOL {
        return Err(MixingError::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(ens.channel()?.apply(rho)?)
}

//! Mixed-unitary channels and diamond-distance certification.
//!
//! Upper bounds come from the dual semidefinite program for the diamond norm
//! of a difference of channels,
//!
//! ```text
//! d⋄(Φ, Ψ) = min ‖Tr_out Z‖∞   subject to   Z ⪰ J(Φ − Ψ),  Z ⪰ 0,
//! ```
//!
//! solved by ADMM with projections onto the PSD cone. Any Hermitian `Z` can be
//! shifted by a multiple of the identity into the feasible set, so every
//! iterate yields a rigorous bound regardless of how far the solver got.
//! Lower bounds come from evaluating `((ℰ − 𝒱) ⊗ 𝟙)(|φ⟩⟨φ|)` on a seeded
//! sweep of pure states.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{eigenphase_arc, eigh, trace_norm, ComplexMatrix, HermitianMatrix, LinalgError, UnitaryMatrix};
use crate::sampling::{random_state, rng};
use crate::seed::derive_seed;

/// Largest dimension accepted by the certification routines.
pub const MAX_CERTIFY_DIM: usize = 3;

/// Smallest accepted solver tolerance.
pub const MIN_SDP_TOL: f64 = 1e-7;

const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("channel has no terms")]
    Empty,
    #[error("probability {p} of term {index} is outside (0, 1]")]
    InvalidProbability { index: usize, p: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    ProbabilitySum { sum: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("dimension {0} exceeds the certification limit {MAX_CERTIFY_DIM}")]
    DimensionTooLarge(usize),
    #[error("solver tolerance {0} is below {MIN_SDP_TOL} or not finite")]
    InvalidTolerance(f64),
    #[error("SDP solver stalled after {} iterations with residual {:e}", .0.iterations, .0.residual)]
    SolverStall(Box<DiamondCertificate>),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `ℰ(ρ) = Σ_j p_j U_j ρ U_j†`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedUnitaryChannel {
    dim: usize,
    terms: Vec<(f64, UnitaryMatrix)>,
}

impl MixedUnitaryChannel {
    pub fn new(terms: Vec<(f64, UnitaryMatrix)>) -> Result<Self, ChannelError> {
        let dim = terms.first().ok_or(ChannelError::Empty)?.1.dim();
        let mut sum = 0.0;
        for (index, (p, u)) in terms.iter().enumerate() {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(ChannelError::InvalidProbability { index, p: *p });
            }
            if u.dim() != dim {
                return Err(ChannelError::DimensionMismatch {
                    left: dim,
                    right: u.dim(),
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(ChannelError::ProbabilitySum { sum });
        }
        Ok(Self { dim, terms })
    }

    pub fn unitary(u: UnitaryMatrix) -> Self {
        Self {
            dim: u.dim(),
            terms: vec![(1.0, u)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, UnitaryMatrix)] {
        &self.terms
    }

    /// `Σ_j p_j U_j ρ U_j†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if rho.dim() != self.dim {
            return Err(ChannelError::DimensionMismatch {
                left: self.dim,
                right: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim);
        for (p, u) in &self.terms {
            let m = u.matrix();
            out = &out + &(&(m * rho) * &m.adjoint()).scale_real(*p);
        }
        Ok(out)
    }

    fn check_target(&self, v: &UnitaryMatrix) -> Result<(), ChannelError> {
        if v.dim() != self.dim {
            return Err(ChannelError::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        Ok(())
    }

    fn check_certifiable(&self, v: &UnitaryMatrix) -> Result<(), ChannelError> {
        self.check_target(v)?;
        if self.dim > MAX_CERTIFY_DIM {
            return Err(ChannelError::DimensionTooLarge(self.dim));
        }
        Ok(())
    }
}

/// Choi matrix `J(Φ) = Σ_{kl} Φ(|k⟩⟨l|) ⊗ |k⟩⟨l|` (output factor first, unnormalized).
///
/// For `ρ ↦ UρU†` this is `vec(U) vec(U)†` with row-major `vec`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    input_dim: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// `Σ_j p_j vec(A_j)vec(A_j)† − vec(B)vec(B)†`, expanded around `vec(B)` so
/// that nearly equal terms cancel before the outer products are formed.
fn outer_difference(b: &ComplexMatrix, terms: impl Iterator<Item = (f64, ComplexMatrix)>) -> ComplexMatrix {
    let psi = b.as_slice();
    let n = psi.len();
    let mut mean = vec![Complex64::new(0.0, 0.0); n];
    let mut second = ComplexMatrix::zeros(n);
    for (p, a) in terms {
        let delta: Vec<Complex64> = a.as_slice().iter().zip(psi).map(|(x, y)| x - y).collect();
        for i in 0..n {
            mean[i] += delta[i] * p;
            let di = delta[i] * p;
            for j in 0..n {
                second[(i, j)] += di * delta[j].conj();
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            second[(i, j)] += psi[i] * mean[j].conj() + mean[i] * psi[j].conj();
        }
    }
    second.hermitian_part()
}

pub fn choi_of_difference(e: &MixedUnitaryChannel, v: &UnitaryMatrix) -> Result<ChoiMatrix, ChannelError> {
    e.check_target(v)?;
    let matrix = outer_difference(v.matrix(), e.terms.iter().map(|(p, u)| (*p, u.matrix().clone())));
    Ok(ChoiMatrix {
        matrix,
        input_dim: e.dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    /// Validated objective of the ADMM-solved dual SDP.
    AdmmDualSdp,
    /// Exact formula for a pair of unitary channels.
    ClosedFormUnitary,
    /// Pure-state sweep over the doubled system.
    PureStateSweep,
    /// Single evaluation at the maximally entangled input.
    MaximallyEntangled,
    /// The difference vanishes identically.
    Exact,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 5] = [
        BoundMethod::AdmmDualSdp,
        BoundMethod::ClosedFormUnitary,
        BoundMethod::PureStateSweep,
        BoundMethod::MaximallyEntangled,
        BoundMethod::Exact,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::AdmmDualSdp => "admm-dual-sdp",
            BoundMethod::ClosedFormUnitary => "closed-form-unitary",
            BoundMethod::PureStateSweep => "pure-state-sweep",
            BoundMethod::MaximallyEntangled => "maximally-entangled",
            BoundMethod::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

/// Bounds on `d⋄(ℰ, 𝒱) = ½‖ℰ − 𝒱‖⋄`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondCertificate {
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    pub iterations: usize,
    /// Final ADMM residual, relative to the Frobenius norm of the Choi matrix.
    pub residual: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 100_000,
        }
    }
}

/// SDP upper bound with the default iteration cap.
pub fn diamond_distance_upper(
    e: &MixedUnitaryChannel,
    v: &UnitaryMatrix,
    tol: f64,
) -> Result<DiamondCertificate, ChannelError> {
    diamond_distance_upper_with(e, v, &SdpOptions { tol, ..SdpOptions::default() })
}

/// SDP upper bound; the lower field holds the cheap maximally-entangled-input bound.
pub fn diamond_distance_upper_with(
    e: &MixedUnitaryChannel,
    v: &UnitaryMatrix,
    opts: &SdpOptions,
) -> Result<DiamondCertificate, ChannelError> {
    if !(opts.tol >= MIN_SDP_TOL && opts.tol.is_finite()) {
        return Err(ChannelError::InvalidTolerance(opts.tol));
    }
    e.check_certifiable(v)?;
    let choi = choi_of_difference(e, v)?;
    let scale = choi.matrix.frobenius_norm();
    if scale == 0.0 {
        return Ok(DiamondCertificate {
            lower: 0.0,
            upper: 0.0,
            tol: opts.tol,
            iterations: 0,
            residual: 0.0,
            lower_method: BoundMethod::Exact,
            upper_method: BoundMethod::Exact,
        });
    }
    let lower = 0.5 * trace_norm(&choi.matrix) / e.dim as f64;
    let j = choi.matrix.scale_real(1.0 / scale);
    let sol = admm_dual(&j, e.dim, opts)?;
    let cert = DiamondCertificate {
        lower,
        upper: (sol.upper * scale).max(lower),
        tol: opts.tol,
        iterations: sol.iterations,
        residual: sol.residual,
        lower_method: BoundMethod::MaximallyEntangled,
        upper_method: BoundMethod::AdmmDualSdp,
    };
    if sol.residual > opts.tol {
        return Err(ChannelError::SolverStall(Box::new(cert)));
    }
    Ok(cert)
}

/// Both bounds: the SDP upper bound and the full pure-state sweep.
pub fn certify(e: &MixedUnitaryChannel, v: &UnitaryMatrix, tol: f64) -> Result<DiamondCertificate, ChannelError> {
    let lower = diamond_distance_lower(e, v)?;
    let with_lower = |mut c: DiamondCertificate| {
        if lower > c.lower {
            c.lower = lower;
            c.lower_method = BoundMethod::PureStateSweep;
        }
        c
    };
    match diamond_distance_upper(e, v, tol) {
        Ok(c) => Ok(with_lower(c)),
        Err(ChannelError::SolverStall(c)) => Err(ChannelError::SolverStall(Box::new(with_lower(*c)))),
        Err(err) => Err(err),
    }
}

struct AdmmSolution {
    upper: f64,
    iterations: usize,
    residual: f64,
}

/// Positive part of a Hermitian matrix and its smallest eigenvalue.
fn psd_part(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64), LinalgError> {
    let (w, q) = eigh(&HermitianMatrix::symmetrized(m))?;
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lambda) in w.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        for i in 0..n {
            let a = q[(i, k)] * lambda;
            for j in 0..n {
                out[(i, j)] += a * q[(j, k)].conj();
            }
        }
    }
    Ok((out, w[0]))
}

fn extremes(m: &ComplexMatrix) -> Result<(f64, f64), LinalgError> {
    let (w, _) = eigh(&HermitianMatrix::symmetrized(m))?;
    Ok((w[0], w[w.len() - 1]))
}

fn frob2(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Objective of the feasible point `Z + t𝟙` with the smallest shift `t ≥ 0`.
fn validated_bound(z: &ComplexMatrix, j: &ComplexMatrix, d: usize) -> Result<f64, LinalgError> {
    let (zmin, _) = extremes(z)?;
    let (gmin, _) = extremes(&(z - j))?;
    let t = 0.0f64.max(-zmin).max(-gmin);
    let (_, tmax) = extremes(&z.partial_trace_first(d))?;
    Ok(tmax + d as f64 * t)
}

/// Scaled ADMM on `min s` s.t. `P₁ = Z`, `P₂ = Z − J`, `P₃ = s𝟙 − Tr_out Z`, all `Pᵢ ⪰ 0`.
fn admm_dual(j: &ComplexMatrix, d: usize, opts: &SdpOptions) -> Result<AdmmSolution, LinalgError> {
    let n = d * d;
    let id_in = ComplexMatrix::identity(d);
    let id_full = ComplexMatrix::identity(n);
    let lift = |x: &ComplexMatrix| id_in.kron(x);

    // Start from the feasible point Z = J₊.
    let (mut p1, _) = psd_part(j)?;
    let mut p2 = &p1 - j;
    let (_, tmax) = extremes(&p1.partial_trace_first(d))?;
    let mut s = tmax;
    let mut p3 = &id_in.scale_real(s) - &p1.partial_trace_first(d);
    let mut z = p1.clone();
    let (mut u1, mut u2, mut u3) = (ComplexMatrix::zeros(n), ComplexMatrix::zeros(n), ComplexMatrix::zeros(d));
    let mut rho = 1.0;

    let mut best = validated_bound(&z, j, d)?;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let a = &p1 - &u1;
        let b = &(j + &p2) - &u2;
        let c = &p3 - &u3;
        let ab = &a + &b;
        s = (ab.trace().re + 2.0 * c.trace().re - (d as f64 + 2.0) / rho) / (2.0 * d as f64);
        let r = &(&ab - &lift(&c)) + &id_full.scale_real(s);
        let tz = r.partial_trace_first(d).scale_real(1.0 / (d as f64 + 2.0));
        z = (&r - &lift(&tz)).scale_real(0.5).hermitian_part();
        let tz = z.partial_trace_first(d);

        let x1 = &z + &u1;
        let x2 = &(&z - j) + &u2;
        let x3 = &(&id_in.scale_real(s) - &tz) + &u3;
        let (n1, _) = psd_part(&x1)?;
        let (n2, _) = psd_part(&x2)?;
        let (n3, _) = psd_part(&x3)?;

        let r1 = &z - &n1;
        let r2 = &(&z - j) - &n2;
        let r3 = &(&id_in.scale_real(s) - &tz) - &n3;
        u1 = &u1 + &r1;
        u2 = &u2 + &r2;
        u3 = &u3 + &r3;
        let primal = (frob2(&r1) + frob2(&r2) + frob2(&r3)).sqrt();
        let dual = rho * (frob2(&(&n1 - &p1)) + frob2(&(&n2 - &p2)) + frob2(&(&n3 - &p3))).sqrt();
        p1 = n1;
        p2 = n2;
        p3 = n3;
        residual = primal.max(dual);

        if iterations % 25 == 0 || residual <= opts.tol {
            best = best.min(validated_bound(&p1, j, d)?).min(validated_bound(&z, j, d)?);
            if residual <= opts.tol {
                break;
            }
            // Residual balancing; the scaled duals rescale with the penalty.
            let factor = if primal > 10.0 * dual {
                2.0
            } else if dual > 10.0 * primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                u1 = u1.scale_real(1.0 / factor);
                u2 = u2.scale_real(1.0 / factor);
                u3 = u3.scale_real(1.0 / factor);
            }
        }
    }
    Ok(AdmmSolution {
        upper: best.max(0.0),
        iterations,
        residual,
    })
}

/// Parameters of the pure-state sweep behind [`diamond_distance_lower`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSweep {
    pub samples: usize,
    /// Hill-climbing steps applied to each of the best few samples.
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for LowerSweep {
    fn default() -> Self {
        Self {
            samples: 1000,
            refine_steps: 200,
            seed: 0,
        }
    }
}

pub fn diamond_distance_lower(e: &MixedUnitaryChannel, v: &UnitaryMatrix) -> Result<f64, ChannelError> {
    diamond_distance_lower_with(e, v, &LowerSweep::default())
}

/// `½ max_φ ‖((ℰ − 𝒱) ⊗ 𝟙)(|φ⟩⟨φ|)‖₁` over a seeded family of pure states,
/// each represented as a `D × D` coefficient matrix `M` (`|φ⟩ = Σ M_ik |i⟩|k⟩`).
pub fn diamond_distance_lower_with(
    e: &MixedUnitaryChannel,
    v: &UnitaryMatrix,
    sweep: &LowerSweep,
) -> Result<f64, ChannelError> {
    e.check_certifiable(v)?;
    let d = e.dim;
    let eval = |m: &ComplexMatrix| {
        let out = outer_difference(&(v.matrix() * m), e.terms.iter().map(|(p, u)| (*p, u.matrix() * m)));
        0.5 * trace_norm(&out)
    };
    let as_matrix = |state: Vec<Complex64>| ComplexMatrix::from_vec(d, state).expect("finite state");

    let mut r = rng(derive_seed("diamond-lower", &[sweep.seed, d as u64]));
    let max_ent = ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt());
    let mut candidates = vec![(eval(&max_ent), max_ent)];
    for _ in 0..sweep.samples {
        let m = as_matrix(random_state(&mut r, d * d));
        candidates.push((eval(&m), m));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = candidates[0].0;
    for (value, start) in candidates.into_iter().take(3) {
        let (mut value, mut current) = (value, start);
        let mut step = 0.1;
        for _ in 0..sweep.refine_steps {
            let data: Vec<Complex64> = current
                .as_slice()
                .iter()
                .map(|z| z + Complex64::new(r.sample::<f64, _>(StandardNormal), r.sample::<f64, _>(StandardNormal)) * step)
                .collect();
            let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let trial = as_matrix(data.into_iter().map(|z| z / norm).collect());
            let t = eval(&trial);
            if t > value {
                value = t;
                current = trial;
            } else {
                step *= 0.97;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Exact `d⋄(𝒰, 𝒱) = √(1 − d²)` with `d` the distance from the origin to the
/// convex hull of `spec(V†U)`; equivalently `sin(L/2)` for the smallest arc `L`
/// containing the eigenphases, and 1 once that arc reaches a half circle.
pub fn unitary_pair_diamond(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64, ChannelError> {
    if u.dim() != v.dim() {
        return Err(ChannelError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let arc = eigenphase_arc(&v.adjoint().compose(u))?;
    Ok(if arc.length >= std::f64::consts::PI {
        1.0
    } else {
        (0.5 * arc.length).sin()
    })
}

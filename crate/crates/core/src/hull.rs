//! Convex hull finding: build a mixing ensemble for any target in an
//! oracle's domain.
//!
//! Each oracle output is written `U_n = V e^{iH_n}`. At step `n` the point
//! `μ_n` of `Conv{H_1, …, H_{n−1}}` closest to the origin is computed; if it is
//! not (numerically) zero, the oracle is asked for a unitary near
//! `W_n = V e^{iτ_n}`, `τ_n = −rε μ_n/‖μ_n‖`, which lands on the far side of the
//! origin and shrinks the next `μ`. Once `‖μ_n‖` is negligible, the weights of
//! `μ_n` define the ensemble.
//!
//! `μ_n` minimizes the Frobenius norm (an exact quadratic program, solved by
//! Wolfe's algorithm); all reported norms and termination tests use the
//! operator norm. For traceless single-qubit operators the two norms are
//! proportional, so the minimizers coincide.

use log::{debug, warn};
use thiserror::Error;

use crate::gateset::{GateError, OracleDomain, SynthesisOracle};
use crate::linalg::{eigh, expi, principal_log_relative, HermitianMatrix, LinalgError, UnitaryMatrix};
use crate::mixing::{Construction, Member, MixingEnsemble, MixingError};

/// Largest `ε` for which the theorem's simplifications are valid.
pub const THEOREM_REGIME_EPS: f64 = 0.01;

const KKT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("invalid hull configuration: {0}")]
    InvalidConfig(String),
    #[error("eps = {0} is outside the theorem regime eps < 0.01")]
    OutOfRegime(f64),
    #[error("target is outside the oracle domain {0}")]
    OutOfDomain(OracleDomain),
    #[error("empty point set")]
    Empty,
    #[error("minimum-norm point KKT residual {residual:e} above target")]
    NumericalStall { residual: f64 },
    #[error("oracle returned a unitary at distance {distance:e} from its target, above eps = {eps:e}")]
    OracleContract { distance: f64, eps: f64 },
    #[error("no enclosing hull after {} oracle calls", .0.oracle_calls)]
    MaxIterExceeded(Box<HullTrace>),
    #[error(transparent)]
    Oracle(#[from] GateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Mixing(#[from] MixingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormPoint {
    pub mu: HermitianMatrix,
    /// Simplex weights, one per input point.
    pub weights: Vec<f64>,
    pub frobenius_norm: f64,
    pub operator_norm: f64,
    /// `max_j (‖μ‖² − ⟨μ, H_j⟩)⁺`, relative to the largest `‖H_j‖²`.
    pub kkt_residual: f64,
}

/// Frobenius-norm minimum of `Conv{H_j}` via Wolfe's algorithm.
pub fn min_norm_point(hs: &[HermitianMatrix]) -> Result<MinNormPoint, HullError> {
    let first = hs.first().ok_or(HullError::Empty)?;
    let dim = first.dim();
    if let Some(h) = hs.iter().find(|h| h.dim() != dim) {
        return Err(LinalgError::DimensionMismatch {
            left: dim,
            right: h.dim(),
        }
        .into());
    }
    let raw: Vec<Vec<f64>> = hs.iter().map(HermitianMatrix::to_real_coords).collect();
    let scale = raw.iter().map(|p| dot(p, p)).fold(0.0, f64::max).sqrt();
    let mut weights = vec![0.0; hs.len()];
    if scale == 0.0 {
        weights[0] = 1.0;
        return Ok(MinNormPoint {
            mu: HermitianMatrix::zeros(dim),
            weights,
            frobenius_norm: 0.0,
            operator_norm: 0.0,
            kkt_residual: 0.0,
        });
    }
    let pts: Vec<Vec<f64>> = raw
        .iter()
        .map(|p| p.iter().map(|x| x / scale).collect())
        .collect();
    let (set, lambda) = wolfe(&pts);
    for (&k, &l) in set.iter().zip(&lambda) {
        weights[k] = l;
    }
    finish(hs, weights)
}

fn finish(hs: &[HermitianMatrix], weights: Vec<f64>) -> Result<MinNormPoint, HullError> {
    let mu = combine(hs, &weights);
    let x = mu.to_real_coords();
    let xx = dot(&x, &x);
    let scale2 = hs.iter().map(|h| h.matrix().frobenius_norm().powi(2)).fold(0.0, f64::max);
    let kkt = hs
        .iter()
        .map(|h| (xx - dot(&x, &h.to_real_coords())).max(0.0))
        .fold(0.0, f64::max)
        / scale2;
    if kkt > KKT_TOL {
        return Err(HullError::NumericalStall { residual: kkt });
    }
    Ok(MinNormPoint {
        frobenius_norm: mu.matrix().frobenius_norm(),
        operator_norm: mu.norm(),
        mu,
        weights,
        kkt_residual: kkt,
    })
}

fn combine(hs: &[HermitianMatrix], w: &[f64]) -> HermitianMatrix {
    let mut acc = HermitianMatrix::zeros(hs[0].dim());
    for (h, &p) in hs.iter().zip(w) {
        if p != 0.0 {
            acc = acc.add(&h.scale(p));
        }
    }
    acc
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Wolfe's minimum-norm-point iteration on unit-scaled points; returns the
/// active set and its barycentric weights.
fn wolfe(pts: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    const STOP: f64 = 1e-15;
    const ZERO: f64 = 1e-14;
    let m = pts[0].len();
    let start = (0..pts.len())
        .min_by(|&a, &b| dot(&pts[a], &pts[a]).total_cmp(&dot(&pts[b], &pts[b])))
        .expect("nonempty");
    let mut set = vec![start];
    let mut lambda = vec![1.0];
    let point = |set: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; m];
        for (&k, &l) in set.iter().zip(lambda) {
            for (xi, pi) in x.iter_mut().zip(&pts[k]) {
                *xi += l * pi;
            }
        }
        x
    };

    for _ in 0..10 * (pts.len() + m + 1) {
        let x = point(&set, &lambda);
        let xx = dot(&x, &x);
        let (j, xj) = (0..pts.len())
            .map(|j| (j, dot(&x, &pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xj >= xx - STOP || set.contains(&j) {
            break;
        }
        set.push(j);
        lambda.push(0.0);
        loop {
            let Some(alpha) = affine_minimizer(pts, &set) else {
                // Affinely dependent active set; drop the newest point.
                set.pop();
                lambda.pop();
                return (set, normalize(lambda));
            };
            if alpha.iter().all(|&a| a > ZERO) {
                lambda = alpha;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= ZERO)
                .map(|(&l, &a)| if l - a > 0.0 { l / (l - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep = lambda.iter().map(|&l| l > ZERO).collect::<Vec<_>>();
            if keep.iter().all(|&k| k) {
                // Rounding kept every weight positive; drop the smallest.
                let min = (0..lambda.len())
                    .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .expect("nonempty");
                keep[min] = false;
            }
            let mut it = keep.iter();
            set.retain(|_| *it.next().expect("aligned"));
            let mut it = keep.iter();
            lambda.retain(|_| *it.next().expect("aligned"));
            lambda = normalize(lambda);
        }
    }
    (set, normalize(lambda))
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    w
}

/// Minimizer of `‖Σ α_i p_i‖` over the affine hull (`Σ α_i = 1`), from the
/// bordered Gram system; `None` when the points are affinely dependent.
fn affine_minimizer(pts: &[Vec<f64>], set: &[usize]) -> Option<Vec<f64>> {
    let k = set.len();
    let n = k + 1;
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&pts[set[i]], &pts[set[j]]);
        }
        a[i][k] = 1.0;
        a[k][i] = 1.0;
    }
    a[k][n] = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][n] / a[i][i]).collect())
}

/// Projected-subgradient refinement of the weights towards the operator-norm
/// minimum, starting from `weights`; returns the best weights seen.
pub fn polish_operator_norm(hs: &[HermitianMatrix], weights: &[f64], steps: usize) -> Result<Vec<f64>, HullError> {
    let mut w = weights.to_vec();
    let mut best = (combine(hs, &w).norm(), w.clone());
    let scale = hs.iter().map(HermitianMatrix::norm).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(best.1);
    }
    for t in 0..steps {
        let mu = combine(hs, &w);
        let (vals, vecs) = eigh(&mu)?;
        let n = vals.len();
        let (k, sign) = if vals[n - 1].abs() >= vals[0].abs() {
            (n - 1, 1.0)
        } else {
            (0, -1.0)
        };
        let v: Vec<_> = (0..mu.dim()).map(|i| vecs[(i, k)]).collect();
        let grad: Vec<f64> = hs
            .iter()
            .map(|h| {
                let m = h.matrix();
                let mut acc = 0.0;
                for i in 0..v.len() {
                    for j in 0..v.len() {
                        acc += (v[i].conj() * m[(i, j)] * v[j]).re;
                    }
                }
                sign * acc
            })
            .collect();
        let step = best.0 / (scale * scale) / (1.0 + t as f64).sqrt();
        for (x, g) in w.iter_mut().zip(&grad) {
            *x -= step * g;
        }
        w = project_simplex(&w);
        let norm = combine(hs, &w).norm();
        if norm < best.0 {
            best = (norm, w.clone());
        }
    }
    Ok(best.1)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullConfig {
    pub eps: f64,
    /// Extrapolation factor `r` in `τ_n = −rε μ_n/‖μ_n‖`.
    pub r: f64,
    /// Termination threshold on `‖μ_n‖`.
    pub mu_tol: f64,
    /// Cap on oracle calls.
    pub max_iter: usize,
    /// Refine the final weights towards the operator-norm minimum.
    pub polish: bool,
}

impl HullConfig {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            r: 2.0,
            mu_tol: 1e-4 * eps * eps,
            max_iter: 64,
            polish: false,
        }
    }

    pub fn validate(&self) -> Result<(), HullError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(HullError::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(HullError::InvalidConfig(format!("r must exceed 1, got {}", self.r)));
        }
        if !(self.mu_tol >= 0.0 && self.mu_tol.is_finite()) {
            return Err(HullError::InvalidConfig(format!("mu_tol must be nonnegative, got {}", self.mu_tol)));
        }
        if self.max_iter == 0 {
            return Err(HullError::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }

    pub fn in_theorem_regime(&self) -> bool {
        self.eps < THEOREM_REGIME_EPS
    }
}

/// One step of the algorithm.
///
/// Record `n = 1` holds only the first oracle output. A record `n ≥ 2` holds
/// `μ_n` (the minimum over `H_1 … H_{n−1}`) and, unless the run stopped there,
/// the new query `τ_n`, `W_n` and the resulting `U_n`, `H_n`, `Δ_n = H_n − τ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullRecord {
    pub n: usize,
    pub mu: Option<HermitianMatrix>,
    pub mu_norm: Option<f64>,
    pub mu_weights: Option<Vec<f64>>,
    pub tau: Option<HermitianMatrix>,
    pub w: Option<UnitaryMatrix>,
    pub u: Option<UnitaryMatrix>,
    pub h: Option<HermitianMatrix>,
    pub h_norm: Option<f64>,
    pub delta_norm: Option<f64>,
    pub cost: Option<f64>,
    pub word: Option<String>,
}

impl HullRecord {
    fn empty(n: usize) -> Self {
        Self {
            n,
            mu: None,
            mu_norm: None,
            mu_weights: None,
            tau: None,
            w: None,
            u: None,
            h: None,
            h_norm: None,
            delta_norm: None,
            cost: None,
            word: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullTrace {
    pub eps: f64,
    pub r: f64,
    pub mu_tol: f64,
    pub records: Vec<HullRecord>,
    /// Final weights over all points `H_1 … H_N` (zero for unused points).
    pub weights: Vec<f64>,
    pub oracle_calls: usize,
}

impl HullTrace {
    /// `(n, ‖μ_n‖)` for every record that has a `μ`.
    pub fn mu_norms(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.mu_norm.map(|m| (r.n, m)))
            .collect()
    }
}

/// Runs the hull algorithm for target `v`.
pub fn run_hull<O: SynthesisOracle + ?Sized>(
    v: &UnitaryMatrix,
    oracle: &O,
    cfg: &HullConfig,
) -> Result<(MixingEnsemble, HullTrace), HullError> {
    cfg.validate()?;
    if !oracle.domain().contains(v) {
        return Err(HullError::OutOfDomain(oracle.domain()));
    }
    if !cfg.in_theorem_regime() {
        warn!("eps = {} is outside the theorem regime eps < 0.01", cfg.eps);
    }
    let eps = cfg.eps;
    let query = |target: &UnitaryMatrix, call: u64| -> Result<_, HullError> {
        let out = oracle.synth(target, eps, call)?;
        let distance = out.unitary.distance(target);
        if distance > eps * (1.0 + 1e-12) + 1e-15 {
            return Err(HullError::OracleContract { distance, eps });
        }
        Ok(out)
    };

    let mut trace = HullTrace {
        eps,
        r: cfg.r,
        mu_tol: cfg.mu_tol,
        records: Vec::new(),
        weights: Vec::new(),
        oracle_calls: 0,
    };
    let mut outputs = Vec::new();
    let mut hs: Vec<HermitianMatrix> = Vec::new();

    let first = query(v, 0)?;
    trace.oracle_calls = 1;
    let h1 = principal_log_relative(v, &first.unitary)?;
    let mut rec = HullRecord::empty(1);
    rec.u = Some(first.unitary.clone());
    rec.h_norm = Some(h1.norm());
    rec.h = Some(h1.clone());
    rec.cost = Some(first.cost);
    rec.word = first.word.as_ref().map(ToString::to_string);
    trace.records.push(rec);
    outputs.push(first);
    hs.push(h1);

    let mut n = 2;
    let final_mnp = loop {
        let mnp = min_norm_point(&hs)?;
        let mut rec = HullRecord::empty(n);
        rec.mu_norm = Some(mnp.operator_norm);
        rec.mu = Some(mnp.mu.clone());
        rec.mu_weights = Some(mnp.weights.clone());
        debug!("hull n = {n}: ‖μ‖ = {:e}", mnp.operator_norm);
        if mnp.operator_norm <= cfg.mu_tol {
            trace.records.push(rec);
            break mnp;
        }
        if trace.oracle_calls >= cfg.max_iter {
            trace.records.push(rec);
            trace.weights = mnp.weights;
            return Err(HullError::MaxIterExceeded(Box::new(trace)));
        }
        let tau = mnp.mu.scale(-cfg.r * eps / mnp.operator_norm);
        let w = v.compose(&expi(&tau)?);
        let out = query(&w, (n - 1) as u64)?;
        trace.oracle_calls += 1;
        let h = principal_log_relative(v, &out.unitary)?;
        rec.delta_norm = Some(h.sub(&tau).norm());
        rec.h_norm = Some(h.norm());
        rec.tau = Some(tau);
        rec.w = Some(w);
        rec.u = Some(out.unitary.clone());
        rec.h = Some(h.clone());
        rec.cost = Some(out.cost);
        rec.word = out.word.as_ref().map(ToString::to_string);
        trace.records.push(rec);
        outputs.push(out);
        hs.push(h);
        n += 1;
    };

    let mut weights = final_mnp.weights;
    if cfg.polish {
        weights = polish_operator_norm(&hs, &weights, 500)?;
    }
    let residual = combine(&hs, &weights).norm();
    trace.weights = weights.clone();

    let members = outputs
        .into_iter()
        .zip(&weights)
        .filter(|(_, &p)| p > 0.0)
        .map(|(o, &p)| Member {
            unitary: o.unitary,
            word: o.word,
            cost: o.cost,
            p,
        })
        .collect();
    let ensemble = MixingEnsemble::new(v.clone(), members, Some(eps), Construction::Hull)?.with_residual(residual);
    Ok((ensemble, trace))
}

/// `c = 3ε + 7ε²`, the bound on every `‖H_n‖`.
pub fn hull_c(eps: f64) -> f64 {
    3.0 * eps + 7.0 * eps * eps
}

/// `½[(c + c²/2)² + c²]` with `c = 3ε + 7ε²`; at most `10ε²` for `ε < 0.01`.
pub fn theorem1_bound(eps: f64) -> Result<f64, HullError> {
    if !(eps > 0.0 && eps < THEOREM_REGIME_EPS) {
        return Err(HullError::OutOfRegime(eps));
    }
    let c = hull_c(eps);
    let a = c + 0.5 * c * c;
    let value = 0.5 * (a * a + c * c);
    debug_assert!(value <= 10.0 * eps * eps);
    Ok(value)
}

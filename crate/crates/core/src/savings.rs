//! Worst-case cost models and the resource savings obtained by mixing.
//!
//! If unitary synthesis to precision `ε` costs at most `f(ε) = A·(log₂ 1/ε)^γ`,
//! a mixed channel with diamond error `ε` only needs sequences of cost
//! `f(√(ε/α))`, with `α = 10` for general targets and `α = 5` for axial ones.
//! The ratio of the two is `C_{α,ε}^γ` with
//! `C_{α,ε} = ½(1 + log α / log ε⁻¹)`, which tends to ½.
//!
//! The log base of `C` is immaterial because only a ratio of logarithms
//! enters; natural logs are used internally.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SavingsError {
    #[error("invalid cost model: A = {a}, gamma = {gamma} (both must be positive)")]
    InvalidModel { a: f64, gamma: f64 },
    #[error("precision {0} outside (0, 1)")]
    PrecisionOutOfRange(f64),
    #[error("alpha must exceed 1, got {0}")]
    AlphaOutOfRange(f64),
}

/// `f(ε) = A·(log₂ ε⁻¹)^γ`, leading term only.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub name: String,
    pub a: f64,
    pub gamma: f64,
    /// Sub-leading behaviour that is documented but not computed.
    pub note: Option<String>,
}

impl CostModel {
    pub fn new(name: impl Into<String>, a: f64, gamma: f64) -> Result<Self, SavingsError> {
        if !(a > 0.0 && gamma > 0.0 && a.is_finite() && gamma.is_finite()) {
            return Err(SavingsError::InvalidModel { a, gamma });
        }
        Ok(Self {
            name: name.into(),
            a,
            gamma,
            note: None,
        })
    }

    /// Ross–Selinger single-qubit synthesis, `9 log₂ ε⁻¹`.
    pub fn ross_selinger() -> Self {
        Self {
            name: "f_RS".into(),
            a: 9.0,
            gamma: 1.0,
            note: Some("plus O(log2 log2 1/eps), not modelled".into()),
        }
    }

    /// Axial rotations, worst case `4 log₂ ε⁻¹`.
    pub fn axial_worst_case() -> Self {
        Self {
            name: "f_ax".into(),
            a: 4.0,
            gamma: 1.0,
            note: None,
        }
    }

    /// Axial rotations, typical case `3 log₂ ε⁻¹`.
    pub fn axial_average() -> Self {
        Self {
            name: "f_ax_avg".into(),
            a: 3.0,
            gamma: 1.0,
            note: None,
        }
    }

    pub fn cost(&self, eps: f64) -> f64 {
        self.a * (1.0 / eps).log2().powf(self.gamma)
    }
}

/// `C_{α,ε} = ½(1 + ln α / ln ε⁻¹)`.
pub fn c_factor(alpha: f64, eps: f64) -> Result<f64, SavingsError> {
    check_eps(eps)?;
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(SavingsError::AlphaOutOfRange(alpha));
    }
    Ok(0.5 * (1.0 + alpha.ln() / (1.0 / eps).ln()))
}

/// Cost of the sequences used when targeting diamond error `ε` by mixing: `f(√(ε/α))`.
pub fn diluted_cost(model: &CostModel, alpha: f64, eps: f64) -> Result<f64, SavingsError> {
    if !(eps > 0.0) || alpha.is_nan() {
        return Err(SavingsError::PrecisionOutOfRange(eps));
    }
    let reduced = (eps / alpha).sqrt();
    check_eps(reduced)?;
    Ok(model.cost(reduced))
}

fn check_eps(eps: f64) -> Result<(), SavingsError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(SavingsError::PrecisionOutOfRange(eps))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SavingsPoint {
    pub eps: f64,
    pub alpha: f64,
    pub c_value: f64,
    pub baseline_cost: f64,
    pub diluted_cost: f64,
}

impl SavingsPoint {
    pub fn ratio(&self) -> f64 {
        self.diluted_cost / self.baseline_cost
    }
}

/// Tabulates `C_{α,ε}` (with costs under `model`) over a grid of precisions.
pub fn fig1_curve(
    model: &CostModel,
    alpha: f64,
    eps_grid: &[f64],
) -> Result<Vec<SavingsPoint>, SavingsError> {
    eps_grid
        .iter()
        .map(|&eps| {
            Ok(SavingsPoint {
                eps,
                alpha,
                c_value: c_factor(alpha, eps)?,
                baseline_cost: model.cost(eps),
                diluted_cost: diluted_cost(model, alpha, eps)?,
            })
        })
        .collect()
}

/// Log-spaced grid from `eps_max` down to `eps_min` with `points` entries.
pub fn log_grid(eps_min: f64, eps_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![eps_max];
    }
    let (lo, hi) = (eps_min.log10(), eps_max.log10());
    (0..points)
        .map(|k| 10f64.powf(hi - (hi - lo) * k as f64 / (points - 1) as f64))
        .collect()
}

pub const CSV_HEADER: &str = "eps,alpha,C,baseline_cost,diluted_cost,ratio";

/// CSV with header `eps,alpha,C,baseline_cost,diluted_cost,ratio`, 17 significant digits.
pub fn to_csv(points: &[SavingsPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.eps,
            p.alpha,
            p.c_value,
            p.baseline_cost,
            p.diluted_cost,
            p.ratio()
        );
    }
    out
}

/// Parses the output of [`to_csv`].
pub fn from_csv(text: &str) -> Result<Vec<SavingsPoint>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(format!("unexpected CSV header {other:?}")),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            if v.len() != 6 {
                return Err(format!("expected 6 columns, got {}", v.len()));
            }
            Ok(SavingsPoint {
                eps: v[0],
                alpha: v[1],
                c_value: v[2],
                baseline_cost: v[3],
                diluted_cost: v[4],
            })
        })
        .collect()
}

//! JSON and JSONL formats for matrices, ensembles, traces, certificates,
//! lemma reports and gate sets.
//!
//! Every document carries `"schema": "mixsynth/1"`. Floats are written with 17
//! significant digits (`{:.16e}`) and parsed exactly, so each writer/reader
//! pair round-trips bit for bit.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::channels::{BoundMethod, DiamondCertificate};
use crate::gateset::{Gate, GateError, GateSet};
use crate::hull::{HullRecord, HullTrace};
use crate::linalg::{ComplexMatrix, HermitianMatrix, LinalgError, Tolerances, UnitaryMatrix};
use crate::mixing::{Construction, LemmaReport, Member, MixingEnsemble, MixingError};

pub const SCHEMA: &str = "mixsynth/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl From<LinalgError> for IoError {
    fn from(e: LinalgError) -> Self {
        IoError::Schema(e.to_string())
    }
}

impl From<MixingError> for IoError {
    fn from(e: MixingError) -> Self {
        IoError::Schema(e.to_string())
    }
}

impl From<GateError> for IoError {
    fn from(e: GateError) -> Self {
        IoError::Schema(e.to_string())
    }
}

/// A float written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F(pub f64);

impl Serialize for F {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite number {}", self.0)));
        }
        RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for F {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(F)
    }
}

fn fs(v: &[f64]) -> Vec<F> {
    v.iter().copied().map(F).collect()
}

fn unf(v: &[F]) -> Vec<f64> {
    v.iter().map(|x| x.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<F>>,
    pub im: Vec<Vec<F>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |r: Vec<Vec<f64>>| r.iter().map(|row| fs(row)).collect();
        Self {
            dim: m.dim(),
            re: rows(m.re_rows()),
            im: rows(m.im_rows()),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        let ok = |rows: &Vec<Vec<F>>| rows.len() == self.dim && rows.iter().all(|r| r.len() == self.dim);
        if self.dim == 0 || !ok(&self.re) || !ok(&self.im) {
            return Err(IoError::Schema(format!("matrix rows do not match dim {}", self.dim)));
        }
        let rows = |r: &Vec<Vec<F>>| r.iter().map(|row| unf(row)).collect::<Vec<_>>();
        Ok(ComplexMatrix::from_parts(&rows(&self.re), &rows(&self.im))?)
    }

    pub fn to_unitary(&self, tol: f64) -> Result<UnitaryMatrix, IoError> {
        Ok(UnitaryMatrix::with_tolerance(self.to_matrix()?, tol)?)
    }

    pub fn to_hermitian(&self, tol: f64) -> Result<HermitianMatrix, IoError> {
        Ok(HermitianMatrix::with_tolerance(self.to_matrix()?, tol)?)
    }
}

fn check_schema(schema: &str) -> Result<(), IoError> {
    if schema != SCHEMA {
        return Err(IoError::Schema(format!("unsupported schema {schema:?}, expected {SCHEMA:?}")));
    }
    Ok(())
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents hold finite numbers");
    s.push('\n');
    s
}

/// A bare matrix document `{"dim", "re", "im"}`.
pub fn write_matrix(m: &ComplexMatrix) -> String {
    pretty(&MatrixJson::from_matrix(m))
}

pub fn read_matrix(text: &str) -> Result<ComplexMatrix, IoError> {
    serde_json::from_str::<MatrixJson>(text)?.to_matrix()
}

pub fn read_unitary(text: &str) -> Result<UnitaryMatrix, IoError> {
    serde_json::from_str::<MatrixJson>(text)?.to_unitary(Tolerances::default().unitary)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberJson {
    p: F,
    cost: F,
    word: Option<String>,
    matrix: MatrixJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    schema: String,
    construction: String,
    eps: Option<F>,
    target: MatrixJson,
    members: Vec<MemberJson>,
    a: F,
    b: F,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

pub fn write_ensemble(ens: &MixingEnsemble, note: Option<&str>) -> String {
    let (construction, q, delta) = match ens.construction() {
        Construction::Hull => ("hull", None, None),
        Construction::Axial { q, delta } => ("axial", Some(F(q)), Some(F(delta))),
        Construction::External => ("external", None, None),
    };
    pretty(&EnsembleJson {
        schema: SCHEMA.into(),
        construction: construction.into(),
        eps: ens.eps().map(F),
        target: MatrixJson::from_matrix(ens.target().matrix()),
        members: ens
            .members()
            .iter()
            .map(|m| MemberJson {
                p: F(m.p),
                cost: F(m.cost),
                word: m.word.as_ref().map(ToString::to_string),
                matrix: MatrixJson::from_matrix(m.unitary.matrix()),
            })
            .collect(),
        a: F(ens.a()),
        b: F(ens.b()),
        residual: ens.residual().map(F),
        q,
        delta,
        note: note.map(str::to_string),
    })
}

/// Parses an ensemble; words are resolved against `gates`, and `a`, `b` are
/// recomputed from the matrices rather than trusted.
pub fn read_ensemble(text: &str, gates: &GateSet) -> Result<(MixingEnsemble, Option<String>), IoError> {
    let doc: EnsembleJson = serde_json::from_str(text)?;
    check_schema(&doc.schema)?;
    let tol = Tolerances::default().unitary;
    let construction = match doc.construction.as_str() {
        "hull" => Construction::Hull,
        "axial" => Construction::Axial {
            q: doc.q.ok_or_else(|| IoError::Schema("axial ensemble without q".into()))?.0,
            delta: doc.delta.ok_or_else(|| IoError::Schema("axial ensemble without delta".into()))?.0,
        },
        "external" => Construction::External,
        other => return Err(IoError::Schema(format!("unknown construction {other:?}"))),
    };
    let members = doc
        .members
        .iter()
        .map(|m| {
            Ok(Member {
                unitary: m.matrix.to_unitary(tol)?,
                word: m.word.as_deref().map(|w| gates.parse_word(w)).transpose()?,
                cost: m.cost.0,
                p: m.p.0,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let mut ens = MixingEnsemble::new(doc.target.to_unitary(tol)?, members, doc.eps.map(|e| e.0), construction)?;
    if let Some(r) = doc.residual {
        ens = ens.with_residual(r.0);
    }
    Ok((ens, doc.note))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordJson {
    schema: String,
    n: usize,
    mu: Option<MatrixJson>,
    mu_norm: Option<F>,
    mu_weights: Option<Vec<F>>,
    tau: Option<MatrixJson>,
    w: Option<MatrixJson>,
    u: Option<MatrixJson>,
    h: Option<MatrixJson>,
    h_norm: Option<F>,
    delta_norm: Option<F>,
    cost: Option<F>,
    word: Option<String>,
}

/// One JSON object per line, one line per hull iteration.
pub fn write_trace_jsonl(trace: &HullTrace) -> String {
    let m = |x: &Option<HermitianMatrix>| x.as_ref().map(|h| MatrixJson::from_matrix(h.matrix()));
    let u = |x: &Option<UnitaryMatrix>| x.as_ref().map(|h| MatrixJson::from_matrix(h.matrix()));
    let mut out = String::new();
    for r in &trace.records {
        let rec = RecordJson {
            schema: SCHEMA.into(),
            n: r.n,
            mu: m(&r.mu),
            mu_norm: r.mu_norm.map(F),
            mu_weights: r.mu_weights.as_deref().map(fs),
            tau: m(&r.tau),
            w: u(&r.w),
            u: u(&r.u),
            h: m(&r.h),
            h_norm: r.h_norm.map(F),
            delta_norm: r.delta_norm.map(F),
            cost: r.cost.map(F),
            word: r.word.clone(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("finite trace"));
        out.push('\n');
    }
    out
}

pub fn read_trace_jsonl(text: &str) -> Result<Vec<HullRecord>, IoError> {
    let tol = Tolerances::default();
    let herm = |x: Option<MatrixJson>| x.map(|m| m.to_hermitian(tol.hermitian)).transpose();
    let unit = |x: Option<MatrixJson>| x.map(|m| m.to_unitary(tol.unitary)).transpose();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let r: RecordJson = serde_json::from_str(line)?;
            check_schema(&r.schema)?;
            Ok(HullRecord {
                n: r.n,
                mu: herm(r.mu)?,
                mu_norm: r.mu_norm.map(|x| x.0),
                mu_weights: r.mu_weights.as_deref().map(unf),
                tau: herm(r.tau)?,
                w: unit(r.w)?,
                u: unit(r.u)?,
                h: herm(r.h)?,
                h_norm: r.h_norm.map(|x| x.0),
                delta_norm: r.delta_norm.map(|x| x.0),
                cost: r.cost.map(|x| x.0),
                word: r.word,
            })
        })
        .collect()
}

/// The bound a certificate is checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    /// `"theorem1"`, `"theorem2"` or `"lemma1"`.
    pub kind: String,
    pub bound: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    schema: String,
    lower: F,
    upper: F,
    tol: F,
    iterations: usize,
    residual: F,
    lower_method: String,
    upper_method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claim: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_bound: Option<F>,
}

pub fn write_certificate(cert: &DiamondCertificate, claim: Option<&Claim>) -> String {
    pretty(&CertificateJson {
        schema: SCHEMA.into(),
        lower: F(cert.lower),
        upper: F(cert.upper),
        tol: F(cert.tol),
        iterations: cert.iterations,
        residual: F(cert.residual),
        lower_method: cert.lower_method.as_str().into(),
        upper_method: cert.upper_method.as_str().into(),
        claim: claim.map(|c| c.kind.clone()),
        claimed_bound: claim.map(|c| F(c.bound)),
    })
}

pub fn read_certificate(text: &str) -> Result<(DiamondCertificate, Option<Claim>), IoError> {
    let doc: CertificateJson = serde_json::from_str(text)?;
    check_schema(&doc.schema)?;
    let method = |s: &str| BoundMethod::parse(s).ok_or_else(|| IoError::Schema(format!("unknown bound method {s:?}")));
    let claim = match (doc.claim, doc.claimed_bound) {
        (Some(kind), Some(bound)) => Some(Claim { kind, bound: bound.0 }),
        (None, None) => None,
        _ => return Err(IoError::Schema("claim and claimed_bound must appear together".into())),
    };
    Ok((
        DiamondCertificate {
            lower: doc.lower.0,
            upper: doc.upper.0,
            tol: doc.tol.0,
            iterations: doc.iterations,
            residual: doc.residual.0,
            lower_method: method(&doc.lower_method)?,
            upper_method: method(&doc.upper_method)?,
        },
        claim,
    ))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LemmaJson {
    schema: String,
    a: F,
    b: F,
    c: Option<F>,
    bound_diamond_norm: F,
    bound_diamond_distance: F,
    residual: Option<F>,
    property1_holds: Option<bool>,
    property2_holds: Option<bool>,
}

pub fn write_lemma_report(r: &LemmaReport) -> String {
    pretty(&lemma_json(r))
}

pub fn read_lemma_report(text: &str) -> Result<LemmaReport, IoError> {
    lemma_from_json(serde_json::from_str(text)?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateJson {
    name: String,
    matrix: MatrixJson,
    cost: F,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateSetJson {
    schema: String,
    gates: Vec<GateJson>,
}

pub fn write_gate_set(g: &GateSet) -> String {
    pretty(&GateSetJson {
        schema: SCHEMA.into(),
        gates: g
            .gates()
            .iter()
            .map(|x| GateJson {
                name: x.name.clone(),
                matrix: MatrixJson::from_matrix(x.unitary.matrix()),
                cost: F(x.cost),
            })
            .collect(),
    })
}

pub fn read_gate_set(text: &str) -> Result<GateSet, IoError> {
    let doc: GateSetJson = serde_json::from_str(text)?;
    check_schema(&doc.schema)?;
    let tol = Tolerances::default().unitary;
    let gates = doc
        .gates
        .into_iter()
        .map(|g| {
            Ok(Gate {
                unitary: g.matrix.to_unitary(tol)?,
                name: g.name,
                cost: g.cost.0,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(GateSet::new(gates)?)
}

/// Summary written next to an ensemble by the `mix` and `axial` commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub eps: f64,
    pub seed: u64,
    pub oracle: String,
    pub oracle_calls: usize,
    pub members: usize,
    pub max_cost: f64,
    pub lemma: LemmaReport,
    /// `½(a² + 2b)` for the written ensemble.
    pub bound: f64,
    /// The theorem bound, present only inside the theorem regime.
    pub claim: Option<Claim>,
    pub q: Option<f64>,
    pub delta: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunReportJson {
    schema: String,
    command: String,
    eps: F,
    seed: u64,
    oracle: String,
    oracle_calls: usize,
    members: usize,
    max_cost: F,
    lemma: LemmaJson,
    bound: F,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claim: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_bound: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn lemma_json(r: &LemmaReport) -> LemmaJson {
    LemmaJson {
        schema: SCHEMA.into(),
        a: F(r.a),
        b: F(r.b),
        c: r.c.map(F),
        bound_diamond_norm: F(r.bound_diamond_norm),
        bound_diamond_distance: F(r.bound_diamond_distance),
        residual: r.residual.map(F),
        property1_holds: r.property1_holds,
        property2_holds: r.property2_holds,
    }
}

fn lemma_from_json(doc: LemmaJson) -> Result<LemmaReport, IoError> {
    check_schema(&doc.schema)?;
    Ok(LemmaReport {
        a: doc.a.0,
        b: doc.b.0,
        c: doc.c.map(|x| x.0),
        bound_diamond_norm: doc.bound_diamond_norm.0,
        bound_diamond_distance: doc.bound_diamond_distance.0,
        residual: doc.residual.map(|x| x.0),
        property1_holds: doc.property1_holds,
        property2_holds: doc.property2_holds,
    })
}

pub fn write_run_report(r: &RunReport) -> String {
    pretty(&RunReportJson {
        schema: SCHEMA.into(),
        command: r.command.clone(),
        eps: F(r.eps),
        seed: r.seed,
        oracle: r.oracle.clone(),
        oracle_calls: r.oracle_calls,
        members: r.members,
        max_cost: F(r.max_cost),
        lemma: lemma_json(&r.lemma),
        bound: F(r.bound),
        claim: r.claim.as_ref().map(|c| c.kind.clone()),
        claimed_bound: r.claim.as_ref().map(|c| F(c.bound)),
        q: r.q.map(F),
        delta: r.delta.map(F),
        note: r.note.clone(),
    })
}

pub fn read_run_report(text: &str) -> Result<RunReport, IoError> {
    let doc: RunReportJson = serde_json::from_str(text)?;
    check_schema(&doc.schema)?;
    let claim = match (doc.claim, doc.claimed_bound) {
        (Some(kind), Some(bound)) => Some(Claim { kind, bound: bound.0 }),
        (None, None) => None,
        _ => return Err(IoError::Schema("claim and claimed_bound must appear together".into())),
    };
    Ok(RunReport {
        command: doc.command,
        eps: doc.eps.0,
        seed: doc.seed,
        oracle: doc.oracle,
        oracle_calls: doc.oracle_calls,
        members: doc.members,
        max_cost: doc.max_cost.0,
        lemma: lemma_from_json(doc.lemma)?,
        bound: doc.bound.0,
        claim,
        q: doc.q.map(|x| x.0),
        delta: doc.delta.map(|x| x.0),
        note: doc.note,
    })
}

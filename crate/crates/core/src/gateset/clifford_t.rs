//! Exhaustive enumeration of single-qubit Clifford+T unitaries.
//!
//! Every element of T-count `n` has a unique normal form
//! `(T | ε)(HT | SHT)^k C` with `C` one of the 24 Cliffords (mod phase), so the
//! table is built by extending syllable prefixes one T at a time and
//! appending each Clifford. Entries are kept sorted by (T-count, word text)
//! and deduplicated by phase-invariant fingerprint.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{
    check_eps, phase_align, phase_fingerprint, CostedUnitary, GateError, GateSet, GateWord,
    OracleDomain, SynthesisOracle,
};
use crate::linalg::UnitaryMatrix;

pub const MAX_ENUMERATED_TCOUNT: usize = 8;

const FINGERPRINT_RESOLUTION: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CliffordTEntry {
    pub word: GateWord,
    pub t_count: usize,
    text: String,
}

impl CliffordTEntry {
    pub fn text(&self) -> &str {
        &self.text
    }
}

/// All distinct (mod phase) Clifford+T unitaries up to a T-count, immutable once built.
#[derive(Debug, Clone)]
pub struct CliffordTTable {
    gates: GateSet,
    max_tcount: usize,
    entries: Vec<CliffordTEntry>,
}

pub fn enumerate_clifford_t(max_tcount: usize) -> Result<CliffordTTable, GateError> {
    CliffordTTable::build(max_tcount)
}

impl CliffordTTable {
    pub fn build(max_tcount: usize) -> Result<Self, GateError> {
        if max_tcount > MAX_ENUMERATED_TCOUNT {
            return Err(GateError::BudgetTooLarge {
                requested: max_tcount,
                max: MAX_ENUMERATED_TCOUNT,
            });
        }
        let gates = GateSet::clifford_t();
        let cliffords = clifford_words(&gates)?;

        let mut prefixes: Vec<Vec<&str>> = vec![vec![]];
        let mut level: Vec<Vec<&str>> = vec![vec!["T"], vec!["H", "T"], vec!["S", "H", "T"]];
        for n in 1..=max_tcount {
            if n > 1 {
                level = level
                    .iter()
                    .flat_map(|p| {
                        let mut a = p.clone();
                        a.extend(["H", "T"]);
                        let mut b = p.clone();
                        b.extend(["S", "H", "T"]);
                        [a, b]
                    })
                    .collect();
            }
            prefixes.extend(level.iter().cloned());
        }

        let mut entries = Vec::with_capacity(prefixes.len() * cliffords.len());
        for prefix in &prefixes {
            let head = gates.word(prefix)?;
            for c in &cliffords {
                let mut names = prefix.clone();
                names.extend(c.names().iter().map(String::as_str));
                let word = GateWord {
                    names: names.iter().map(|s| s.to_string()).collect(),
                    matrix: head.matrix().compose(c.matrix()),
                    cost: head.cost() + c.cost(),
                };
                let text = word.to_string();
                entries.push(CliffordTEntry {
                    t_count: word.cost().round() as usize,
                    word,
                    text,
                });
            }
        }
        entries.sort_by(|a, b| a.t_count.cmp(&b.t_count).then_with(|| a.text.cmp(&b.text)));
        let mut seen = HashMap::new();
        entries.retain(|e| {
            seen.insert(
                phase_fingerprint(e.word.matrix().matrix(), FINGERPRINT_RESOLUTION),
                (),
            )
            .is_none()
        });
        Ok(Self {
            gates,
            max_tcount,
            entries,
        })
    }

    pub fn gates(&self) -> &GateSet {
        &self.gates
    }

    pub fn max_tcount(&self) -> usize {
        self.max_tcount
    }

    /// Entries sorted by T-count, then word text.
    pub fn entries(&self) -> &[CliffordTEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count_with_tcount(&self, t: usize) -> usize {
        self.entries.iter().filter(|e| e.t_count == t).count()
    }
}

/// The 24 single-qubit Cliffords mod phase, each as a shortest word found by
/// breadth-first search over the zero-cost gates (ties: gate-name order).
fn clifford_words(gates: &GateSet) -> Result<Vec<GateWord>, GateError> {
    let mut generators: Vec<&str> = gates
        .gates()
        .iter()
        .filter(|g| g.cost == 0.0)
        .map(|g| g.name.as_str())
        .collect();
    generators.sort();
    let start = gates.word::<&str>(&[])?;
    let mut seen = HashMap::new();
    seen.insert(phase_fingerprint(start.matrix().matrix(), FINGERPRINT_RESOLUTION), ());
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        for g in &generators {
            let mut names = w.names().to_vec();
            names.push(g.to_string());
            let next = gates.word(&names)?;
            let key = phase_fingerprint(next.matrix().matrix(), FINGERPRINT_RESOLUTION);
            if seen.insert(key, ()).is_none() {
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(out)
}

/// Minimum-T-count word within `eps` of `v` (after global-phase alignment),
/// ties broken by lexicographic word text.
pub fn exhaustive_synth(
    table: &CliffordTTable,
    v: &UnitaryMatrix,
    eps: f64,
    budget: usize,
) -> Result<CostedUnitary, GateError> {
    check_eps(eps)?;
    if budget > table.max_tcount {
        return Err(GateError::BudgetTooLarge {
            requested: budget,
            max: table.max_tcount,
        });
    }
    if v.dim() != 2 {
        return Err(GateError::OutOfDomain(OracleDomain::Su2));
    }
    for e in table.entries.iter().take_while(|e| e.t_count <= budget) {
        let (phase, aligned) = phase_align(e.word.matrix(), v)?;
        let distance = aligned.distance(v);
        if distance <= eps {
            return Ok(CostedUnitary {
                unitary: aligned,
                word: Some(e.word.clone()),
                global_phase: phase,
                cost: e.word.cost(),
                distance,
            });
        }
    }
    Err(GateError::UnreachablePrecision { eps, budget })
}

/// [`exhaustive_synth`] behind the oracle interface; the cost bound is the T-count budget.
#[derive(Debug, Clone)]
pub struct ExhaustiveOracle {
    table: Arc<CliffordTTable>,
    budget: usize,
    domain: OracleDomain,
}

impl ExhaustiveOracle {
    pub fn new(table: Arc<CliffordTTable>, budget: usize) -> Result<Self, GateError> {
        if budget > table.max_tcount {
            return Err(GateError::BudgetTooLarge {
                requested: budget,
                max: table.max_tcount,
            });
        }
        Ok(Self {
            table,
            budget,
            domain: OracleDomain::Su2,
        })
    }

    /// Restricts accepted targets to axial rotations (outputs need not be axial).
    pub fn axial(mut self) -> Self {
        self.domain = OracleDomain::Axial;
        self
    }

    pub fn table(&self) -> &CliffordTTable {
        &self.table
    }
}

impl SynthesisOracle for ExhaustiveOracle {
    fn domain(&self) -> OracleDomain {
        self.domain
    }

    fn gate_set(&self) -> &GateSet {
        &self.table.gates
    }

    fn cost_bound(&self, _eps: f64) -> f64 {
        self.budget as f64
    }

    fn synth(&self, target: &UnitaryMatrix, eps: f64, _call_index: u64) -> Result<CostedUnitary, GateError> {
        if !self.domain.contains(target) {
            return Err(GateError::OutOfDomain(self.domain));
        }
        exhaustive_synth(&self.table, target, eps, self.budget)
    }
}

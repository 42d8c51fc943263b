use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{check_eps, phase_fingerprint, CostedUnitary, GateError, GateSet, OracleDomain, SynthesisOracle};
use crate::linalg::{expi, pauli, HermitianMatrix, UnitaryMatrix};
use crate::sampling::random_traceless_hermitian;
use crate::savings::CostModel;
use crate::seed::derive_seed;

/// Deterministic stand-in for a synthesis algorithm in the small-`ε` regime.
///
/// Returns `U = V e^{iH}` where `H` is pseudo-random given
/// `(seed, call_index, V)`: traceless for the SU(2)/U(D) domains, proportional
/// to `Z` for the axial domain, with `‖H‖ ∈ [0.2ε, 0.9ε]`. Since
/// `‖e^{iH} − 𝟙‖ ≤ ‖H‖`, the output is always within `ε` of `V`.
#[derive(Debug, Clone)]
pub struct SyntheticOracle {
    seed: u64,
    domain: OracleDomain,
    cost_model: CostModel,
    gates: GateSet,
}

impl SyntheticOracle {
    pub fn new(seed: u64, domain: OracleDomain) -> Self {
        let cost_model = match domain {
            OracleDomain::Axial => CostModel::axial_worst_case(),
            _ => CostModel::ross_selinger(),
        };
        Self {
            seed,
            domain,
            cost_model,
            gates: GateSet::clifford_t(),
        }
    }

    pub fn with_cost_model(mut self, model: CostModel) -> Self {
        self.cost_model = model;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl SynthesisOracle for SyntheticOracle {
    fn domain(&self) -> OracleDomain {
        self.domain
    }

    fn gate_set(&self) -> &GateSet {
        &self.gates
    }

    fn cost_bound(&self, eps: f64) -> f64 {
        self.cost_model.cost(eps)
    }

    fn synth(&self, target: &UnitaryMatrix, eps: f64, call_index: u64) -> Result<CostedUnitary, GateError> {
        if !self.domain.contains(target) {
            return Err(GateError::OutOfDomain(self.domain));
        }
        synthetic_synth(target, eps, self.seed, call_index, self.domain, &self.cost_model)
    }
}

pub fn synthetic_synth(
    v: &UnitaryMatrix,
    eps: f64,
    seed: u64,
    call_index: u64,
    domain: OracleDomain,
    cost_model: &CostModel,
) -> Result<CostedUnitary, GateError> {
    check_eps(eps)?;
    let fp = fingerprint_hash(v);
    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed("synthetic-oracle", &[seed, call_index, fp]));
    let norm = eps * (0.2 + 0.7 * rng.random::<f64>());
    let h = match domain {
        OracleDomain::Axial => {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            HermitianMatrix::symmetrized(&pauli::z().scale_real(sign * norm))
        }
        _ => random_traceless_hermitian(&mut rng, v.dim(), norm),
    };
    let unitary = v.compose(&expi(&h)?);
    let distance = unitary.distance(v);
    Ok(CostedUnitary {
        unitary,
        word: None,
        global_phase: 0.0,
        cost: cost_model.cost(eps),
        distance,
    })
}

fn fingerprint_hash(v: &UnitaryMatrix) -> u64 {
    let key = phase_fingerprint(v.matrix(), 1e-9);
    let parts: Vec<u64> = key.iter().map(|&k| k as u64).collect();
    derive_seed("target-fingerprint", &parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{operator_norm, principal_log_relative};
    use crate::sampling::{random_unitary, rng};

    #[test]
    fn deterministic_per_call() {
        let o = SyntheticOracle::new(9, OracleDomain::Su2);
        let v = random_unitary(&mut rng(1), 2);
        let a = o.synth(&v, 1e-3, 4).unwrap();
        let b = o.synth(&v, 1e-3, 4).unwrap();
        assert_eq!(a, b);
        let c = o.synth(&v, 1e-3, 5).unwrap();
        assert_ne!(a.unitary, c.unitary);
    }

    #[test]
    fn axial_outputs_commute_with_z() {
        let o = SyntheticOracle::new(3, OracleDomain::Axial);
        let v = pauli::axial(0.3);
        for k in 0..50 {
            let u = o.synth(&v, 1e-3, k).unwrap();
            let h = principal_log_relative(&v, &u.unitary).unwrap();
            let z = pauli::z();
            let comm = &(h.matrix() * &z) - &(&z * h.matrix());
            assert!(operator_norm(&comm) < 1e-12);
        }
    }

    #[test]
    fn axial_domain_rejects_general_targets() {
        let o = SyntheticOracle::new(3, OracleDomain::Axial);
        let v = pauli::rotation(0.3, [1.0, 0.0, 0.0]);
        assert!(matches!(o.synth(&v, 1e-3, 0), Err(GateError::OutOfDomain(_))));
    }
}

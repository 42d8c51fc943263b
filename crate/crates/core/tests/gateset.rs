use std::collections::BTreeSet;

use mixsynth::gateset::{
    conjugate_by_z, enumerate_clifford_t, exhaustive_synth, synthetic_synth, CliffordTTable, GateSet, OracleDomain,
    SynthesisOracle, SyntheticOracle,
};
use mixsynth::linalg::{operator_norm, pauli, principal_log_relative, ComplexMatrix};
use mixsynth::sampling::{random_unitary, rng};
use mixsynth::savings::CostModel;
use num_complex::Complex64;

/// Matrix divided by the phase of its largest-modulus entry (first of the
/// near-ties), rounded to a 1e-7 grid.
fn canonical(m: &ComplexMatrix) -> Vec<i64> {
    let entries: Vec<Complex64> = (0..m.dim()).flat_map(|i| (0..m.dim()).map(move |j| (i, j))).map(|ij| m[ij]).collect();
    let top = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = *entries.iter().find(|z| z.norm() > top - 1e-6).unwrap();
    let phase = pivot / pivot.norm();
    entries
        .iter()
        .flat_map(|z| {
            let w = z / phase;
            [(w.re * 1e7).round() as i64, (w.im * 1e7).round() as i64]
        })
        .collect()
}

fn mat(g: &GateSet, name: &str) -> ComplexMatrix {
    g.get(name).unwrap().unitary.matrix().clone()
}

/// The Clifford group mod phase as the closure of ⟨H, S⟩ under multiplication.
fn clifford_closure(g: &GateSet) -> Vec<ComplexMatrix> {
    let gens = [mat(g, "H"), mat(g, "S")];
    let mut seen = BTreeSet::new();
    let mut out = vec![ComplexMatrix::identity(2)];
    seen.insert(canonical(&out[0]));
    let mut k = 0;
    while k < out.len() {
        for gen in &gens {
            let next = &out[k] * gen;
            if seen.insert(canonical(&next)) {
                out.push(next);
            }
        }
        k += 1;
    }
    out
}

#[test]
fn tcount_zero_is_the_clifford_group() {
    let g = GateSet::clifford_t();
    let cliffords = clifford_closure(&g);
    assert_eq!(cliffords.len(), 24);
    let table = enumerate_clifford_t(0).unwrap();
    assert_eq!(table.len(), 24);
    let ours: BTreeSet<_> = table.entries().iter().map(|e| canonical(e.word.matrix().matrix())).collect();
    let theirs: BTreeSet<_> = cliffords.iter().map(canonical).collect();
    assert_eq!(ours, theirs);
}

#[test]
fn enumeration_matches_brute_force_to_tcount_two() {
    let g = GateSet::clifford_t();
    let cliffords = clifford_closure(&g);
    let t = mat(&g, "T");
    // Words C₀ (T C₁)^k for k ≤ 2, all interleavings.
    let mut layers: Vec<Vec<ComplexMatrix>> = vec![cliffords.clone()];
    for _ in 0..2 {
        let prev = layers.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() * cliffords.len());
        let mut seen = BTreeSet::new();
        for p in prev {
            let pt = p * &t;
            for c in &cliffords {
                let m = &pt * c;
                if seen.insert(canonical(&m)) {
                    next.push(m);
                }
            }
        }
        layers.push(next);
    }
    let brute: BTreeSet<_> = layers.iter().flatten().map(canonical).collect();

    let table = CliffordTTable::build(2).unwrap();
    let ours: BTreeSet<_> = table.entries().iter().map(|e| canonical(e.word.matrix().matrix())).collect();
    assert_eq!(ours.len(), table.len(), "table has phase duplicates");
    assert_eq!(ours, brute);

    // The brute-force count at T-count exactly 1 agrees as well.
    let upto1: BTreeSet<_> = layers[..2].iter().flatten().map(canonical).collect();
    assert_eq!(table.count_with_tcount(0) + table.count_with_tcount(1), upto1.len());

    for e in table.entries() {
        let m = e.word.matrix().matrix();
        assert!(m.unitarity_defect() <= 1e-12);
        let product = e
            .word
            .names()
            .iter()
            .fold(ComplexMatrix::identity(2), |acc, n| &acc * &mat(&g, n));
        assert!((&product - m).max_abs() <= 1e-10);
        let tcount = e.word.names().iter().filter(|n| n.starts_with('T')).count();
        assert_eq!(tcount, e.t_count);
        assert_eq!(e.word.cost(), tcount as f64);
    }
}

#[test]
fn exhaustive_synthesis_is_verified_and_minimal() {
    let table = CliffordTTable::build(6).unwrap();
    let v = pauli::rotation(-0.35, [0.0, 0.0, 1.0]);
    let out = exhaustive_synth(&table, &v, 0.2, 6).unwrap();
    let word = out.word.as_ref().unwrap();
    // Recompute the distance from the word alone.
    let realized = word.matrix().with_phase(out.global_phase);
    let dist = operator_norm(&(realized.matrix() - v.matrix()));
    assert!(dist <= 0.2 && (dist - out.distance).abs() <= 1e-12, "{dist}");

    // Full scan: no cheaper enumerated word reaches 0.2. A 512-point phase grid
    // is within π/512 of the optimal phase, moving the distance by < 0.007.
    let cheaper_hit = table.entries().iter().filter(|e| e.word.cost() < out.cost).any(|e| {
        (0..512).any(|k| {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / 512.0;
            e.word.matrix().with_phase(phase).distance(&v) <= 0.2 - 0.007
        })
    });
    assert!(!cheaper_hit);

    let exact = exhaustive_synth(&table, &table.gates().get("T").unwrap().unitary, 1e-6, 6).unwrap();
    assert_eq!(exact.word.unwrap().to_string(), "T");
    let h = exhaustive_synth(&table, &table.gates().get("H").unwrap().unitary, 1e-6, 6).unwrap();
    assert_eq!(h.cost, 0.0);
}

#[test]
fn synthetic_oracle_over_a_thousand_calls() {
    let model = CostModel::ross_selinger();
    let mut r = rng(301);
    for call in 0..1000u64 {
        let v = random_unitary(&mut r, 2);
        let eps = 10f64.powi(-1 - (call % 5) as i32);
        let domain = if call % 2 == 0 { OracleDomain::Su2 } else { OracleDomain::Axial };
        let v = if domain == OracleDomain::Axial { pauli::axial(call as f64 * 0.01) } else { v };
        let out = synthetic_synth(&v, eps, 17, call, domain, &model).unwrap();
        let h = principal_log_relative(&v, &out.unitary).unwrap();
        assert!(h.norm() <= 0.9 * eps * (1.0 + 1e-12), "call {call}");
        assert!(operator_norm(&(out.unitary.matrix() - v.matrix())) <= eps);
        if domain == OracleDomain::Axial {
            let m = out.unitary.matrix();
            assert!(m[(0, 1)].norm() <= 1e-12 && m[(1, 0)].norm() <= 1e-12);
            let hz = &(h.matrix() * &pauli::z()) - &(&pauli::z() * h.matrix());
            assert!(hz.max_abs() <= 1e-12);
        }
    }
}

#[test]
fn synthetic_oracle_is_bit_deterministic() {
    let oracle = SyntheticOracle::new(9, OracleDomain::Su2);
    let v = random_unitary(&mut rng(302), 2);
    let a = oracle.synth(&v, 1e-3, 4).unwrap();
    let b = oracle.synth(&v, 1e-3, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, oracle.synth(&v, 1e-3, 5).unwrap());
}

#[test]
fn z_conjugation_keeps_cost_and_commutes_with_axial() {
    let table = CliffordTTable::build(3).unwrap();
    let g = table.gates();
    let out = exhaustive_synth(&table, &pauli::axial(0.4), 0.3, 3).unwrap();
    let conj = conjugate_by_z(g, &out).unwrap();
    assert_eq!(conj.cost, out.cost);
    let word = conj.word.unwrap();
    assert!(word.to_string().starts_with("Z ") && word.to_string().ends_with(" Z"));
}

#[test]
fn word_text_round_trips() {
    let g = GateSet::clifford_t();
    let w = g.parse_word("H T S T H").unwrap();
    assert_eq!(w.to_string(), "H T S T H");
    assert_eq!(w.cost(), 2.0);
    assert!(g.parse_word("H Q").is_err());
}

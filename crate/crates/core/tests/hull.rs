use mixsynth::gateset::{CostedUnitary, GateError, GateSet, OracleDomain, SynthesisOracle, SyntheticOracle};
use mixsynth::hull::{hull_c, min_norm_point, run_hull, theorem1_bound, HullConfig, HullError, HullTrace};
use mixsynth::linalg::{operator_norm, pauli, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use mixsynth::sampling::{random_hermitian, random_traceless_hermitian, random_unitary, rng};

/// Frobenius minimum over the simplex by projected gradient descent.
fn projected_gradient_min_norm(hs: &[HermitianMatrix]) -> f64 {
    let n = hs.len();
    let gram: Vec<Vec<f64>> = hs.iter().map(|a| hs.iter().map(|b| a.real_inner(b)).collect()).collect();
    let lipschitz: f64 = gram.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut w = vec![1.0 / n as f64; n];
    for _ in 0..200_000 {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| gram[i][j] * w[j]).sum()).collect();
        let step: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| x - g / lipschitz).collect();
        w = project_simplex(&step);
    }
    let q: f64 = (0..n).map(|i| (0..n).map(|j| w[i] * gram[i][j] * w[j]).sum::<f64>()).sum();
    q.max(0.0).sqrt()
}

fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[test]
fn min_norm_point_matches_projected_gradient() {
    let mut r = rng(401);
    for case in 0..20 {
        let dim = 2 + case % 2;
        let hs: Vec<_> = (0..2 + case % 6).map(|_| random_hermitian(&mut r, dim, 1.0)).collect();
        let mnp = min_norm_point(&hs).unwrap();
        let oracle = projected_gradient_min_norm(&hs);
        assert!((mnp.frobenius_norm - oracle).abs() <= 1e-7, "case {case}: {} vs {oracle}", mnp.frobenius_norm);
        assert!(mnp.kkt_residual <= 1e-12);
        assert!(mnp.operator_norm <= mnp.frobenius_norm + 1e-15);
        let sum: f64 = mnp.weights.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12 && mnp.weights.iter().all(|&w| w >= 0.0));
    }
}

#[test]
fn min_norm_point_on_symmetric_sets() {
    let x = HermitianMatrix::new(pauli::x()).unwrap();
    let y = HermitianMatrix::new(pauli::y()).unwrap();
    let mnp = min_norm_point(&[x.clone(), y.clone(), x.add(&y).scale(-1.0)]).unwrap();
    assert!(mnp.operator_norm <= 1e-14);
    assert!(mnp.weights.iter().all(|w| (w - 1.0 / 3.0).abs() <= 1e-12));
    assert!(matches!(min_norm_point(&[]), Err(HullError::Empty)));
}

/// Checks every trace inequality; returns the worst ratio in the μ-step bound.
fn check_trace(trace: &HullTrace, eps: f64) -> f64 {
    let c = hull_c(eps);
    let mu = trace.mu_norms();
    for r in &trace.records {
        if let Some(h) = r.h_norm {
            assert!(h <= c + 1e-12, "‖H_{}‖ = {h:e}", r.n);
        }
        if let Some(d) = r.delta_norm {
            assert!(d <= eps + 7.0 * eps * eps + 1e-12, "‖Δ_{}‖ = {d:e}", r.n);
        }
    }
    let h1 = trace.records[0].h_norm.unwrap();
    assert!(h1 <= eps + 0.5 * eps * eps);
    assert!((mu[0].1 - h1).abs() <= 1e-15 * h1.max(1e-300) + 1e-300, "μ₂ must equal H₁");
    let mut worst: f64 = 0.0;
    for w in mu.windows(2) {
        let ((n, a), (_, b)) = (w[0], w[1]);
        assert!(b < a, "‖μ‖ not decreasing at n = {n}");
        let delta = trace.records[n - 1].delta_norm.unwrap();
        let bound = a * delta / (a + 2.0 * eps);
        assert!(b <= bound, "step inequality fails at n = {n}");
        worst = worst.max(b / bound);
    }
    for &(n, m) in &mu {
        assert!(m < 6.0 * eps * (-0.62548 * n as f64).exp(), "decay bound fails at n = {n}");
    }
    assert!(mu.last().unwrap().1 <= trace.mu_tol);
    worst
}

#[test]
fn synthetic_runs_satisfy_trace_bounds() {
    for eps in [1e-3, 1e-4] {
        for seed in 0..5 {
            let v = random_unitary(&mut rng(410 + seed), 2);
            let oracle = SyntheticOracle::new(seed, OracleDomain::Su2);
            let cfg = HullConfig::new(eps);
            let (ens, trace) = run_hull(&v, &oracle, &cfg).unwrap();
            check_trace(&trace, eps);

            // a and b recomputed from the members.
            let c = hull_c(eps);
            let a = ens.members().iter().map(|m| operator_norm(&(m.unitary.matrix() - v.matrix()))).fold(0.0, f64::max);
            let mean = ens
                .members()
                .iter()
                .fold(ComplexMatrix::zeros(2), |acc, m| &acc + &m.unitary.matrix().scale_real(m.p));
            let b = operator_norm(&(&mean - v.matrix()));
            assert!((a - ens.a()).abs() <= 1e-15 && (b - ens.b()).abs() <= 1e-15);
            assert!(a <= c + 0.5 * c * c);
            assert!(b <= 0.5 * c * c + 2.0 * cfg.mu_tol);
            assert!(ens.residual().unwrap() <= cfg.mu_tol);
            assert!(0.5 * (a * a + 2.0 * b) <= theorem1_bound(eps).unwrap());
        }
    }
}

#[test]
fn dimension_three_run() {
    let v = random_unitary(&mut rng(420), 3);
    let oracle = SyntheticOracle::new(3, OracleDomain::Unitary(3));
    let (ens, trace) = run_hull(&v, &oracle, &HullConfig::new(1e-3)).unwrap();
    check_trace(&trace, 1e-3);
    assert!(ens.members().len() >= 2);
}

struct ExactOracle(GateSet);

impl SynthesisOracle for ExactOracle {
    fn domain(&self) -> OracleDomain {
        OracleDomain::Su2
    }

    fn gate_set(&self) -> &GateSet {
        &self.0
    }

    fn cost_bound(&self, _eps: f64) -> f64 {
        0.0
    }

    fn synth(&self, target: &UnitaryMatrix, _eps: f64, _call: u64) -> Result<CostedUnitary, GateError> {
        Ok(CostedUnitary {
            unitary: target.clone(),
            word: None,
            global_phase: 0.0,
            cost: 0.0,
            distance: 0.0,
        })
    }
}

/// Returns `V·e^{iH}` with `‖H‖ = 2ε`, breaking the oracle contract.
struct SloppyOracle(GateSet);

impl SynthesisOracle for SloppyOracle {
    fn domain(&self) -> OracleDomain {
        OracleDomain::Su2
    }

    fn gate_set(&self) -> &GateSet {
        &self.0
    }

    fn cost_bound(&self, _eps: f64) -> f64 {
        0.0
    }

    fn synth(&self, target: &UnitaryMatrix, eps: f64, call: u64) -> Result<CostedUnitary, GateError> {
        let h = random_traceless_hermitian(&mut rng(call), 2, 2.0 * eps);
        let unitary = target.compose(&mixsynth::linalg::expi(&h)?);
        Ok(CostedUnitary {
            distance: unitary.distance(target),
            unitary,
            word: None,
            global_phase: 0.0,
            cost: 0.0,
        })
    }
}

#[test]
fn exact_oracle_stops_at_first_call() {
    let v = random_unitary(&mut rng(430), 2);
    let (ens, trace) = run_hull(&v, &ExactOracle(GateSet::clifford_t()), &HullConfig::new(1e-3)).unwrap();
    assert_eq!(trace.oracle_calls, 1);
    assert_eq!(ens.members().len(), 1);
    assert_eq!(ens.b(), 0.0);
}

#[test]
fn contract_breach_and_iteration_cap_are_reported() {
    let v = random_unitary(&mut rng(431), 2);
    let err = run_hull(&v, &SloppyOracle(GateSet::clifford_t()), &HullConfig::new(1e-3)).unwrap_err();
    assert!(matches!(err, HullError::OracleContract { .. }));

    let oracle = SyntheticOracle::new(1, OracleDomain::Su2);
    let cfg = HullConfig {
        max_iter: 2,
        ..HullConfig::new(1e-3)
    };
    match run_hull(&v, &oracle, &cfg) {
        Err(HullError::MaxIterExceeded(trace)) => assert_eq!(trace.oracle_calls, 2),
        other => panic!("expected MaxIterExceeded, got {other:?}"),
    }
    let axial_only = SyntheticOracle::new(1, OracleDomain::Axial);
    assert!(matches!(run_hull(&v, &axial_only, &HullConfig::new(1e-3)), Err(HullError::OutOfDomain(_))));
}

#[test]
fn polish_keeps_the_guarantees() {
    let v = pauli::rotation(0.4, [0.6, 0.0, 0.8]);
    let oracle = SyntheticOracle::new(5, OracleDomain::Su2);
    let cfg = HullConfig {
        polish: true,
        ..HullConfig::new(1e-3)
    };
    let (ens, _) = run_hull(&v, &oracle, &cfg).unwrap();
    assert!(ens.residual().unwrap() <= cfg.mu_tol);
}

#[test]
fn theorem_bound_regime() {
    assert!(theorem1_bound(0.009).unwrap() <= 8.1e-4);
    let ratio = theorem1_bound(1e-6).unwrap() / 1e-12;
    assert!((ratio - 9.0).abs() < 1e-4, "{ratio}");
    assert!(matches!(theorem1_bound(0.02), Err(HullError::OutOfRegime(_))));
}

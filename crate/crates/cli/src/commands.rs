use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;

use log::warn;
use mixsynth::axial::{build_axial_ensemble, theorem2_bound};
use mixsynth::channels::{certify as certify_channel, ChannelError, DiamondCertificate};
use mixsynth::gateset::{CliffordTTable, ExhaustiveOracle, GateSet, OracleDomain, SynthesisOracle, SyntheticOracle};
use mixsynth::hull::{run_hull, theorem1_bound, HullConfig, HullError, THEOREM_REGIME_EPS};
use mixsynth::io::{self, Claim, RunReport};
use mixsynth::linalg::pauli;
use mixsynth::mixing::{lemma1_report, Construction, MixingEnsemble};
use mixsynth::savings::{fig1_curve, log_grid, to_csv, CostModel};
use mixsynth::seed::derive_seed;

use crate::exit::{CliError, BOUND_VIOLATED, NUMERICAL_ERROR, OK};
use crate::target::parse_target;
use crate::{AxialArgs, CertifyArgs, ClaimChoice, MixArgs, ModelChoice, OracleArgs, OracleChoice, SavingsArgs};

pub const SDP_TOL_ENV: &str = "MIXSYNTH_SDP_TOL";
const DEFAULT_SDP_TOL: f64 = 1e-7;

fn check_eps(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::write(path, e))
}

fn build_oracle(args: &OracleArgs, label: &str, domain: OracleDomain) -> Result<Box<dyn SynthesisOracle>, CliError> {
    match args.oracle {
        OracleChoice::Synthetic => {
            let seed = derive_seed(label, &[args.seed]);
            Ok(Box::new(SyntheticOracle::new(seed, domain)))
        }
        OracleChoice::Exhaustive => {
            if domain.dim() != 2 {
                return Err(CliError::config("the exhaustive oracle only handles single-qubit targets"));
            }
            let table = Arc::new(CliffordTTable::build(args.tcount)?);
            let oracle = ExhaustiveOracle::new(table, args.tcount)?;
            Ok(Box::new(match domain {
                OracleDomain::Axial => oracle.axial(),
                _ => oracle,
            }))
        }
    }
}

/// The stated `10ε²`; [`theorem1_bound`] is the tighter value it rounds up.
fn theorem1_claim(eps: f64) -> Result<f64, HullError> {
    theorem1_bound(eps).map(|_| 10.0 * eps * eps)
}

fn run_report(
    command: &str,
    eps: f64,
    oracle: &OracleArgs,
    oracle_calls: usize,
    ens: &MixingEnsemble,
    claim: Option<Claim>,
) -> RunReport {
    let lemma = lemma1_report(ens);
    RunReport {
        command: command.into(),
        eps,
        seed: oracle.seed,
        oracle: oracle.oracle.as_str().into(),
        oracle_calls,
        members: ens.members().len(),
        max_cost: ens.max_cost(),
        bound: lemma.bound_diamond_distance,
        lemma,
        claim,
        q: None,
        delta: None,
        note: None,
    }
}

pub fn mix(args: &MixArgs) -> Result<u8, CliError> {
    check_eps(args.eps)?;
    let v = parse_target(&args.target)?;
    let domain = if v.dim() == 2 { OracleDomain::Su2 } else { OracleDomain::Unitary(v.dim()) };
    let oracle = build_oracle(&args.oracle, "mix/oracle", domain)?;
    let cfg = HullConfig {
        r: args.r,
        max_iter: args.max_iter,
        polish: args.polish,
        ..HullConfig::new(args.eps)
    };
    // run_hull itself warns when eps is outside the theorem regime.
    let (ens, trace) = run_hull(&v, oracle.as_ref(), &cfg)?;
    let claim = theorem1_claim(args.eps).ok().map(|bound| Claim {
        kind: "theorem1".into(),
        bound,
    });
    let report = run_report("mix", args.eps, &args.oracle, trace.oracle_calls, &ens, claim);

    write_file(&args.out_dir.join("ensemble.json"), &io::write_ensemble(&ens, None))?;
    write_file(&args.out_dir.join("trace.jsonl"), &io::write_trace_jsonl(&trace))?;
    write_file(&args.out_dir.join("report.json"), &io::write_run_report(&report))?;
    println!(
        "mix: {} members after {} oracle calls, bound {:.6e}{}",
        ens.members().len(),
        trace.oracle_calls,
        report.bound,
        claim_suffix(&report.claim)
    );
    Ok(OK)
}

fn claim_suffix(claim: &Option<Claim>) -> String {
    match claim {
        Some(c) => format!(" (claimed {} bound {:.6e})", c.kind, c.bound),
        None => String::new(),
    }
}

pub fn axial(args: &AxialArgs) -> Result<u8, CliError> {
    check_eps(args.eps)?;
    let v = match (&args.theta, &args.target) {
        (Some(theta), _) if theta.is_finite() => pauli::axial(*theta),
        (Some(theta), _) => return Err(CliError::config(format!("invalid --theta {theta}"))),
        (None, Some(t)) => parse_target(t)?,
        (None, None) => return Err(CliError::config("one of --theta and --target is required")),
    };
    if args.eps >= THEOREM_REGIME_EPS {
        warn!("eps = {} is outside the theorem regime eps < 0.01", args.eps);
    }
    let oracle = build_oracle(&args.oracle, "axial/oracle", OracleDomain::Axial)?;
    let built = build_axial_ensemble(&v, oracle.as_ref(), args.eps)?;
    let claim = theorem2_bound(args.eps).ok().map(|bound| Claim {
        kind: "theorem2".into(),
        bound,
    });
    let calls = if built.beta.is_some() { 2 } else { 1 };
    let mut report = run_report("axial", args.eps, &args.oracle, calls, &built.ensemble, claim);
    report.q = Some(built.q);
    report.delta = Some(built.delta);
    report.note = built.note.clone();

    write_file(
        &args.out_dir.join("ensemble.json"),
        &io::write_ensemble(&built.ensemble, built.note.as_deref()),
    )?;
    write_file(&args.out_dir.join("report.json"), &io::write_run_report(&report))?;
    println!(
        "axial: {} members, q = {:.6e}, delta = {:.6e}, bound {:.6e}{}",
        built.ensemble.members().len(),
        built.q,
        built.delta,
        report.bound,
        claim_suffix(&report.claim)
    );
    if let Some(note) = &built.note {
        println!("note: {note}");
    }
    Ok(OK)
}

fn default_tol() -> Result<f64, CliError> {
    match std::env::var(SDP_TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("{SDP_TOL_ENV} is not a number: {s:?}"))),
        Err(_) => Ok(DEFAULT_SDP_TOL),
    }
}

fn resolve_claim(choice: ClaimChoice, ens: &MixingEnsemble) -> Result<Option<Claim>, CliError> {
    let lemma1 = || Claim {
        kind: "lemma1".into(),
        bound: lemma1_report(ens).bound_diamond_distance,
    };
    let need_eps = |kind: &str| {
        ens.eps()
            .ok_or_else(|| CliError::config(format!("a {kind} claim needs an ensemble with eps")))
    };
    Ok(match choice {
        ClaimChoice::None => None,
        ClaimChoice::Lemma1 => Some(lemma1()),
        ClaimChoice::Theorem1 => Some(Claim {
            kind: "theorem1".into(),
            bound: theorem1_claim(need_eps("theorem1")?)?,
        }),
        ClaimChoice::Theorem2 => Some(Claim {
            kind: "theorem2".into(),
            bound: theorem2_bound(need_eps("theorem2")?)?,
        }),
        ClaimChoice::Auto => {
            let theorem = match (ens.construction(), ens.eps()) {
                (Construction::Hull, Some(eps)) => theorem1_claim(eps).ok().map(|b| ("theorem1", b)),
                (Construction::Axial { .. }, Some(eps)) => theorem2_bound(eps).ok().map(|b| ("theorem2", b)),
                _ => None,
            };
            Some(match theorem {
                Some((kind, bound)) => Claim {
                    kind: kind.into(),
                    bound,
                },
                None => lemma1(),
            })
        }
    })
}

fn cert_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    input.with_file_name(format!("{stem}.cert.json"))
}

struct Certified {
    line: String,
    code: u8,
}

fn certify_one(input: &Path, out: &Path, tol: f64, choice: ClaimChoice) -> Result<Certified, CliError> {
    let text = fs::read_to_string(input).map_err(|e| CliError::read(input, e))?;
    let (ens, _) = io::read_ensemble(&text, &GateSet::clifford_t()).map_err(|e| CliError::schema(input, e))?;
    let claim = resolve_claim(choice, &ens)?;
    let channel = ens.channel()?;
    let (cert, stalled): (DiamondCertificate, bool) = match certify_channel(&channel, ens.target(), tol) {
        Ok(c) => (c, false),
        Err(ChannelError::SolverStall(c)) => (*c, true),
        Err(e) => return Err(CliError::from(e).prefixed(input)),
    };
    write_file(out, &io::write_certificate(&cert, claim.as_ref()))?;

    let violated = claim.as_ref().is_some_and(|c| cert.lower > c.bound);
    let verdict = match &claim {
        _ if violated => "VIOLATED",
        _ if stalled => "solver stalled",
        Some(c) if cert.upper <= c.bound => "certified",
        Some(_) => "inconclusive",
        None => "no claim",
    };
    let code = if violated {
        BOUND_VIOLATED
    } else if stalled {
        NUMERICAL_ERROR
    } else {
        OK
    };
    Ok(Certified {
        line: format!(
            "{}: lower {:.6e} upper {:.6e} ({} iterations){} -> {verdict}",
            input.display(),
            cert.lower,
            cert.upper,
            cert.iterations,
            claim_suffix(&claim)
        ),
        code,
    })
}

pub fn certify(args: &CertifyArgs) -> Result<u8, CliError> {
    let tol = match args.tol {
        Some(t) => t,
        None => default_tol()?,
    };
    if args.out.is_some() && args.ensembles.len() != 1 {
        return Err(CliError::config("--out needs exactly one ensemble file"));
    }
    let jobs: Vec<(PathBuf, PathBuf)> = args
        .ensembles
        .iter()
        .map(|p| (p.clone(), args.out.clone().unwrap_or_else(|| cert_path(p))))
        .collect();
    let results: Vec<Result<Certified, CliError>> = thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(input, out)| s.spawn(move || certify_one(input, out, tol, args.claim)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("certify worker panicked")).collect()
    });

    let mut codes = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(c) => {
                println!("{}", c.line);
                codes.push(c.code);
            }
            Err(e) => {
                eprintln!("error: {e}");
                codes.push(e.code);
            }
        }
    }
    if codes.contains(&BOUND_VIOLATED) {
        return Ok(BOUND_VIOLATED);
    }
    Ok(codes.into_iter().find(|&c| c != OK).unwrap_or(OK))
}

pub fn savings(args: &SavingsArgs) -> Result<u8, CliError> {
    let range_ok = args.eps_min > 0.0 && args.eps_max < 1.0 && args.eps_min <= args.eps_max;
    if !range_ok {
        return Err(CliError::config(format!(
            "need 0 < --eps-min <= --eps-max < 1, got [{}, {}]",
            args.eps_min, args.eps_max
        )));
    }
    if args.points == 0 || (args.points > 1 && args.eps_min == args.eps_max) {
        return Err(CliError::config(format!(
            "--points {} does not fit the range [{}, {}]",
            args.points, args.eps_min, args.eps_max
        )));
    }
    let model = match args.model {
        ModelChoice::RossSelinger => CostModel::ross_selinger(),
        ModelChoice::AxialWorstCase => CostModel::axial_worst_case(),
        ModelChoice::AxialAverage => CostModel::axial_average(),
    };
    let curve = fig1_curve(&model, args.alpha, &log_grid(args.eps_min, args.eps_max, args.points))?;
    let csv = to_csv(&curve);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(OK)
}

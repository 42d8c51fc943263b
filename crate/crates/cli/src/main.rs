mod commands;
mod exit;
mod target;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "mixsynth", version, about = "Probabilistic gate synthesis by mixing unitary approximations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a hull-mixing ensemble for an arbitrary target.
    Mix(MixArgs),
    /// Build the four-member ensemble for an axial rotation.
    Axial(AxialArgs),
    /// Bound the diamond distance of ensemble files and check their claimed bound.
    Certify(CertifyArgs),
    /// Tabulate worst-case cost savings from mixing.
    Savings(SavingsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OracleChoice {
    /// Seeded random approximations at distance 0.2ε to 0.9ε.
    Synthetic,
    /// Exhaustive Clifford+T search up to `--tcount`.
    Exhaustive,
}

impl OracleChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleChoice::Synthetic => "synthetic",
            OracleChoice::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    pub oracle: OracleChoice,
    /// Seed for every random choice in the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// T-count budget of the exhaustive oracle.
    #[arg(long, default_value_t = 6)]
    pub tcount: usize,
}

#[derive(Args)]
pub struct MixArgs {
    /// `Rz(θ)`, `Rx(θ)`, `Ry(θ)` (meaning e^{−iθP/2}) or a matrix JSON path.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub eps: f64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Extrapolation factor of the hull search.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 64)]
    pub max_iter: usize,
    /// Refine the final weights towards the operator-norm minimum.
    #[arg(long)]
    pub polish: bool,
    /// Directory for ensemble.json, trace.jsonl and report.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct AxialArgs {
    /// Rotation angle θ of the target e^{iθZ}.
    #[arg(long, conflicts_with = "target", required_unless_present = "target")]
    pub theta: Option<f64>,
    /// Target as for `mix`; must be diagonal.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub eps: f64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Directory for ensemble.json and report.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClaimChoice {
    /// 10ε² for hull ensembles and 5ε² for axial ones when ε < 0.01, else ½(a² + 2b).
    Auto,
    Theorem1,
    Theorem2,
    Lemma1,
    None,
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Ensemble JSON files.
    #[arg(required = true)]
    pub ensembles: Vec<PathBuf>,
    /// Relative SDP tolerance; defaults to $MIXSYNTH_SDP_TOL or 1e-7.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub claim: ClaimChoice,
    /// Certificate path; only with a single ensemble. Defaults to `<stem>.cert.json` beside the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModelChoice {
    #[value(name = "f_RS")]
    RossSelinger,
    #[value(name = "f_ax")]
    AxialWorstCase,
    #[value(name = "f_ax_avg")]
    AxialAverage,
}

#[derive(Args)]
pub struct SavingsArgs {
    /// 10 for general targets, 5 for axial rotations.
    #[arg(long, default_value_t = 10.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "f_RS")]
    pub model: ModelChoice,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, rec| {
            let level = match rec.level() {
                log::Level::Warn => "warning".to_string(),
                l => l.as_str().to_lowercase(),
            };
            writeln!(buf, "{level}: {}", rec.args())
        })
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mix(a) => commands::mix(&a),
        Command::Axial(a) => commands::axial(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Savings(a) => commands::savings(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

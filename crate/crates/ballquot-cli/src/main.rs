mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Exit status for unreadable or malformed input.
pub const EXIT_PARSE: u8 = 2;
/// Exit status when the mathematics rejects the input.
pub const EXIT_REJECTED: u8 = 3;
/// Exit status when a numerical verdict could not be reached.
pub const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_PARSE,
            CliError::Rejected(_) => EXIT_REJECTED,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
        }
    }
}

/// Exact arithmetic, isometry classification and curve-volume checks on the complex hyperbolic plane.
#[derive(Parser, Debug, Serialize)]
#[command(name = "ballquot", version)]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Also write the main table as CSV.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Seed for sampling-based checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Run data-parallel kernels on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Classify an isometry by its trace and eigenstructure.
    Classify(ClassifyArgs),
    /// Distance between two points, or from a point to a complex line.
    Dist(DistArgs),
    /// Lattice membership, torsion search and pair certificates.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Curve-volume integrals.
    #[command(subcommand)]
    Volume(VolumeCommand),
    /// Inequality certificates.
    #[command(subcommand)]
    Certificate(CertificateCommand),
    /// Hodge structure and period matrix.
    #[command(subcommand)]
    Hodge(HodgeCommand),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Dist(_) => "dist",
            Command::Lattice(LatticeCommand::Check(_)) => "lattice check",
            Command::Lattice(LatticeCommand::Search(_)) => "lattice search",
            Command::Lattice(LatticeCommand::Certify(_)) => "lattice certify",
            Command::Volume(VolumeCommand::Curve(_)) => "volume curve",
            Command::Volume(VolumeCommand::Psh(_)) => "volume psh",
            Command::Certificate(CertificateCommand::Genus(_)) => "certificate genus",
            Command::Hodge(HodgeCommand::Build(_)) => "hodge build",
        }
    }
}

/// Field and form descriptors shared by several commands.
#[derive(Args, Debug, Serialize)]
pub struct Ambient {
    /// Field descriptor `{"d": D, "alpha": [a, b]}`; enables exact mode.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Form descriptor; defaults to diag(1,1,-sqrt D) with a field, diag(1,1,-1) without.
    #[arg(long)]
    pub form: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub ambient: Ambient,
    /// Matrix descriptor.
    #[arg(long)]
    pub matrix: PathBuf,
    /// In numeric mode, accept |f| < 1e-9 as a repeated eigenvalue.
    #[arg(long)]
    pub assume_repeated: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct DistArgs {
    #[command(flatten)]
    pub ambient: Ambient,
    /// First point (vector descriptor).
    #[arg(long)]
    pub p: PathBuf,
    /// Second point.
    #[arg(long, required_unless_present = "line")]
    pub q: Option<PathBuf>,
    /// Polar vector of a complex line, instead of a second point.
    #[arg(long, conflicts_with = "q")]
    pub line: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum LatticeCommand {
    /// Test membership of a matrix in the arithmetic lattice.
    Check(LatticeCheckArgs),
    /// Enumerate torsion elements with bounded coordinate heights.
    Search(LatticeSearchArgs),
    /// Repulsion certificate for a pair of torsion elements.
    Certify(LatticeCertifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct LatticeAmbient {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub form: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LatticeCheckArgs {
    #[command(flatten)]
    pub ambient: LatticeAmbient,
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct LatticeSearchArgs {
    #[command(flatten)]
    pub ambient: LatticeAmbient,
    /// Height cap on integral coordinates of the matrix entries.
    #[arg(long, default_value_t = 1)]
    pub cap: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct LatticeCertifyArgs {
    #[command(flatten)]
    pub ambient: LatticeAmbient,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum VolumeCommand {
    /// Integrate a form over a curve inside a ball or tube.
    Curve(VolumeCurveArgs),
    /// Sample the plurisubharmonicity criterion for a profile f(log mu).
    Psh(PshArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Tube,
    Ball,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Bergman,
    #[value(name = "omegaF", alias = "omega-f")]
    OmegaF,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    OmegaFOverSinh2,
    VolOverCosh2Tube,
    VolOverCosh2Ball,
}

#[derive(Args, Debug, Serialize)]
pub struct VolumeCurveArgs {
    /// Curve descriptor: a named family or polynomial coefficients.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long, value_enum, default_value_t = RegionKind::Ball)]
    pub region: RegionKind,
    /// Radii; repeat or comma-separate.
    #[arg(long = "r", value_delimiter = ',', required = true)]
    pub radii: Vec<f64>,
    #[arg(long, value_enum, default_value_t = FormKind::Bergman)]
    pub form: FormKind,
    /// Curve parameter whose image is the ball center (re,im).
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
    pub center: Vec<f64>,
    /// Also extrapolate the Lelong ratio about z = 0 from the radii.
    #[arg(long)]
    pub lelong: bool,
    /// Also run a monotonicity scan over the radii.
    #[arg(long, value_enum)]
    pub scan: Option<ScanMode>,
    /// Target relative quadrature error.
    #[arg(long, default_value_t = 1e-7)]
    pub rel_tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Log,
    F,
    NegLog,
}

#[derive(Args, Debug, Serialize)]
pub struct PshArgs {
    #[arg(long, value_enum, default_value_t = Profile::F)]
    pub profile: Profile,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum CertificateCommand {
    /// Volume upper bound for a curve of genus g.
    Genus(GenusArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GenusArgs {
    #[arg(long)]
    pub g: i64,
    /// sinh^2(r/2).
    #[arg(long, required_unless_present = "r")]
    pub sinh2: Option<f64>,
    /// The radius r itself.
    #[arg(long, conflicts_with = "sinh2")]
    pub r: Option<f64>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum HodgeCommand {
    /// Polarization, Hodge frame and period matrix at a point.
    Build(HodgeArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct HodgeArgs {
    /// Point of the ball (vector descriptor).
    #[arg(long)]
    pub v: PathBuf,
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub form: Option<PathBuf>,
    /// Purely imaginary field element; defaults to the square root of alpha.
    #[arg(long)]
    pub alpha: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

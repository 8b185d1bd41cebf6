use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "calogero",
    version,
    about = "Rational Calogero model: geometry, identities, dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root vectors of the reduced system with their cosine matrix.
    Roots(RootsArgs),
    /// Polyhedra spanned by the four-particle roots.
    Geometry(GeometryArgs),
    /// Run a verification sweep and print a JSON report.
    Verify(VerifyArgs),
    /// Integrate a trajectory and write it as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootsFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Number of particles (>= 2).
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = RootsFormat::Json)]
    pub format: RootsFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solid {
    Cuboctahedron,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryFormat {
    Json,
    Obj,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value_t = Solid::Cuboctahedron)]
    pub solid: Solid,
    #[arg(long, value_enum, default_value_t = GeometryFormat::Json)]
    pub format: GeometryFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SuiteArg {
    Roots,
    IdentitiesN3,
    AngularN4,
    Brackets,
    Ksq,
}

impl From<SuiteArg> for calogero::verify::Suite {
    fn from(s: SuiteArg) -> Self {
        use calogero::verify::Suite;
        match s {
            SuiteArg::Roots => Suite::Roots,
            SuiteArg::IdentitiesN3 => Suite::IdentitiesN3,
            SuiteArg::AngularN4 => Suite::AngularN4,
            SuiteArg::Brackets => Suite::Brackets,
            SuiteArg::Ksq => Suite::Ksq,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    /// Particle count. The roots suite defaults to 4; the others are fixed.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sample count (default: 100 for roots and brackets, 1000 otherwise).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Required by every randomized suite. With roots it adds the Higgs sweep.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides every per-check default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Evaluate samples on one thread.
    #[arg(long)]
    pub sequential: bool,
    /// Report file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Lab,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    Leapfrog,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrajectoryFormat {
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Particle count.
    #[arg(long)]
    pub n: usize,
    /// Pair coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, value_enum, default_value_t = FrameArg::Reduced)]
    pub frame: FrameArg,
    /// Initial coordinates, comma separated (N in the lab frame, N-1 reduced).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "p",
        conflicts_with = "init"
    )]
    pub q: Option<Vec<f64>>,
    /// Initial momenta, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "q",
        conflicts_with = "init"
    )]
    pub p: Option<Vec<f64>>,
    /// JSON file `{"q": [...], "p": [...]}` with the initial state.
    #[arg(long, required_unless_present = "q")]
    pub init: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Record every `stride` steps.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Leapfrog)]
    pub integrator: IntegratorArg,
    #[arg(long, value_enum, default_value_t = TrajectoryFormat::Csv)]
    pub format: TrajectoryFormat,
    /// CSV output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

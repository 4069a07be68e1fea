//! The `spheroreg` command line: moment tables, moment maps, Monte Carlo
//! verification and the kurtosis reference table. [`run`] is the whole
//! program, so it can also be driven in-process.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 data error, 3 usage error.

mod commands;
mod output;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spheroreg::Scheme;

#[derive(Debug, Parser)]
#[command(
    name = "spheroreg",
    version,
    about = "Soft-thresholded Gaussian fields on the sphere"
)]
struct Cli {
    /// Worker threads for Monte Carlo work (default: all cores).
    #[arg(long, global = true, env = "SPHEROREG_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form coefficient moments and pole kurtosis per multipole.
    Moments(MomentsArgs),
    /// Second or fourth moment of one multipole along a meridian.
    Map(MapArgs),
    /// Monte Carlo verification of the closed forms.
    Verify(VerifyArgs),
    /// Pole kurtosis for the reference spectrum, beside the tabulated values.
    #[command(alias = "paper-table")]
    ReferenceTable(ReferenceTableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Complex,
    Real,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Complex => Scheme::ComplexModulus,
            SchemeArg::Real => Scheme::RealBasis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    /// Without it, data go to stdout and the manifest to stderr.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["spectrum", "power_law"])))]
struct MomentsArgs {
    /// CSV spectrum with header `ell,c_ell`.
    #[arg(long)]
    spectrum: Option<std::path::PathBuf>,

    /// Power law `C_l = K l^-ALPHA` as `K,ALPHA`.
    #[arg(long, value_name = "K,ALPHA", requires = "ell_max")]
    power_law: Option<String>,

    #[arg(long)]
    ell_max: Option<usize>,

    /// Decay envelope `K,ALPHA` the spectrum file must respect. Without it
    /// the smallest `K` for ALPHA = 2.1 is fitted.
    #[arg(long, value_name = "K,ALPHA", requires = "spectrum")]
    envelope: Option<String>,

    #[arg(long)]
    lambda: f64,

    #[arg(long, value_enum, default_value_t = SchemeArg::Complex)]
    scheme: SchemeArg,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long)]
    ell: usize,

    #[arg(long)]
    lambda: f64,

    #[arg(long, default_value_t = 1.0)]
    c_ell: f64,

    #[arg(long, value_enum, default_value_t = SchemeArg::Complex)]
    scheme: SchemeArg,

    /// Moment order, 2 or 4.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["2", "4"]))]
    order: String,

    /// Number of equispaced θ values in [0, π].
    #[arg(long, default_value_t = 181)]
    grid: usize,

    /// Azimuth of the meridian.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,

    /// Closed-form map (default).
    #[arg(long, conflicts_with = "montecarlo")]
    analytic: bool,

    /// Monte Carlo map with this many replicates; adds an `se` column.
    #[arg(long, value_name = "R")]
    montecarlo: Option<u64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Coeff,
    Field,
    Probability,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BudgetArg {
    Small,
    Full,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = BudgetArg::Small)]
    budget: BudgetArg,

    /// Harness self-test: scale the expected γ₁ by this factor.
    #[arg(long, hide = true)]
    tamper_gamma1: Option<f64>,

    /// Report file (JSON); a manifest sidecar is written next to it.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct ReferenceTableArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,

    #[command(flatten)]
    output: OutputArgs,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
enum Failure {
    Verification(String),
    Data(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Data(_) => 2,
            Failure::Usage(_) => 3,
        }
    }
}

impl From<spheroreg::Error> for Failure {
    fn from(e: spheroreg::Error) -> Self {
        use spheroreg::Error as E;
        match e {
            E::Domain { .. } | E::Config(_) | E::VacuousPenaltyBound { .. } | E::BasisMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code. Parallel work runs on a pool sized by `--threads`, or on rayon's
/// default pool when the flag is absent.
pub fn run<I, A>(args: I) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
        }
    };
    let dispatch = move || match cli.command {
        Command::Moments(a) => commands::moments(a),
        Command::Map(a) => commands::map(a),
        Command::Verify(a) => commands::verify(a),
        Command::ReferenceTable(a) => commands::reference_table(a),
    };
    let result = match cli.threads {
        None => dispatch(),
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(dispatch),
            Err(e) => Err(Failure::Usage(format!("thread pool: {e}"))),
        },
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Verification(m) | Failure::Data(m) | Failure::Usage(m) => m,
            };
            eprintln!("error: {msg}");
            f.code()
        }
    }
}

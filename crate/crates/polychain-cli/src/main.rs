use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod report;

use report::{CliError, RunReport};

#[derive(Parser, Debug)]
#[command(name = "polychain", version, about = "Exact polyhedral chains, tensor chains and flat norms")]
pub struct Cli {
    /// Print the full JSON report on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Re-solve flat norms on a padded complex and report any change.
    #[arg(long, global = true)]
    pub pad_check: bool,
    /// Allowed absolute difference for `--expect` comparisons.
    #[arg(long, global = true, default_value = "0")]
    pub tolerance: String,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ChainArg {
    /// Chain JSON file.
    #[arg(long)]
    pub chain: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TypeArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub k1: usize,
    #[arg(long)]
    pub k2: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Shape, group, cell count and mass of a chain.
    Info(ChainArg),
    /// Boundary chain.
    Boundary(ChainArg),
    /// Mass, optionally certified against overlaps and compared to a value.
    Mass {
        #[command(flatten)]
        input: ChainArg,
        /// Check that the stored cells overlap only in measure zero.
        #[arg(long)]
        certify: bool,
        /// Expected mass (rational); mismatch beyond --tolerance exits 2.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Restriction to an open box `lo:hi,lo:hi,...` (`*` or empty for unbounded).
    Restrict {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long = "box")]
        region: String,
    },
    /// Cartesian product of two chains (the first over ℤ).
    Product {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Slice by fixing the coordinates in γ (1-based) to the given values.
    Slice {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        at: String,
        /// Keep the section in the ambient space instead of projecting.
        #[arg(long)]
        unprojected: bool,
    },
    /// Upper bound for the integral of slice masses over γ.
    Coarea {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        gamma: String,
    },
    /// Whether the chain is (k1,k2)-split for the split n = n1 + n2.
    SplitTest {
        #[command(flatten)]
        input: ChainArg,
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Whether the (k1,k2) component vanishes, decided through slices.
    JtypeTest {
        #[command(flatten)]
        input: ChainArg,
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Type components of a tensor-representable chain.
    Jdecompose {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        n1: usize,
    },
    /// Tensor chain as an ordinary chain.
    Embed {
        #[arg(long)]
        tensor: PathBuf,
    },
    /// Sum of coefficients of a 0-chain or a (0,0) tensor chain.
    Chi {
        #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
        chain: Option<PathBuf>,
        #[arg(long)]
        tensor: Option<PathBuf>,
    },
    /// Dyadic collapse of a (0,k) tensor chain.
    Collapse {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        level: u32,
    },
    /// Flat norm on a cubical complex `ORIGIN:H:EXTENTS`, e.g. `-1,-1:1:3,3`.
    Flatnorm {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        complex: String,
        /// First-factor dimension of the complex (default: half the ambient dimension).
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Tensor flat norm on a cubical complex.
    Tflatnorm {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        complex: String,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long, requires = "k2")]
        k1: Option<usize>,
        #[arg(long, requires = "k1")]
        k2: Option<usize>,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Bounds between the mass and the cross mass.
    Crossmass {
        #[command(flatten)]
        input: ChainArg,
        #[arg(long)]
        n1: usize,
    },
    /// Constructions from the worked examples.
    #[command(subcommand)]
    Lab(LabCommand),
    /// Run the acceptance suite and report each criterion.
    ReproduceAll {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LabCommand {
    /// Truncated dyadic staircase.
    Staircase {
        #[arg(long)]
        level: u32,
        /// Also fill the jump at x = 1.
        #[arg(long)]
        terminal_jump: bool,
        /// Table of boundary masses for levels 0..=level.
        #[arg(long)]
        boundary_growth: bool,
        /// Include both chains in the report.
        #[arg(long)]
        chains: bool,
    },
    /// Theta-graph counterexample.
    Counterexample {
        /// Spec file `{"paths": [[["x","y"], ...], ...]}`.
        #[arg(long, conflicts_with_all = ["default", "fan"])]
        spec: Option<PathBuf>,
        /// Built-in spec: `rational` or `irrational`.
        #[arg(long)]
        default: Option<String>,
        /// Built-in family with N paths (3..=7).
        #[arg(long, conflicts_with = "default")]
        fan: Option<usize>,
        /// Run every check; a failed check exits 2.
        #[arg(long)]
        verify: bool,
        /// Include the tensor chain in the report.
        #[arg(long)]
        emit: bool,
    },
    /// Minimal cost of integer product decompositions.
    IpSearch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        bound: i64,
    },
    /// Hyperplane probe: slice vanishing and boundary additivity per level.
    Probe {
        #[command(flatten)]
        input: ChainArg,
        /// 1-based axis.
        #[arg(long)]
        axis: usize,
        #[arg(long)]
        levels: String,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = std::time::Instant::now();
    match commands::run(&cli) {
        Ok(outcome) => {
            let report = RunReport::new(&argv[1..], &outcome, cli.timing.then(|| start.elapsed().as_millis() as u64));
            let body = if cli.json {
                serde_json::to_string_pretty(&report).expect("serialisable")
            } else {
                outcome.text.trim_end().to_string()
            };
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if outcome.verification_failed {
                if !cli.json {
                    eprintln!("verification failed");
                }
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

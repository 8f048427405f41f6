use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relhyp_core::experiment::{self, Command, ExperimentConfig, Report, Window, EXIT_CONFIG};
use relhyp_core::rips::FacetList;
use relhyp_core::{Error, Limits};

const ENV_HELP: &str = "\
Exit status: 0 all asserted properties hold, 1 a property failed (witness JSON on stderr),
2 invalid configuration, 3 resource budget exceeded.

Environment:
  RELHYP_MAX_VERTICES   cap on vertices of any built graph (default 4000000)
  RELHYP_MAX_SIMPLICES  cap on simplices of any built complex (default 2000000)

Flags override the matching config field; unset fields take the config defaults.
Every artifact embeds the toolkit version, the config hash and the seed.";

/// Finite-stage experiments on relatively hyperbolic groups: horoballs,
/// augmented spaces, Rips homology and blown-up coronas.
#[derive(Debug, Parser)]
#[command(name = "relhyp", version, after_help = ENV_HELP)]
struct Cli {
    /// JSON experiment config; `{}` gives all defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the primary artifact here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Seed recorded in every artifact and used by sampled scans (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Normal-form, Gromov-product and depth-shift suites on integer-segment horoballs.
    HoroballCheck(HoroballArgs),
    /// Four-point δ of the Cayley and augmented metrics per radius, as CSV.
    DeltaScan(DeltaArgs),
    /// Integral homology of a Rips complex on the augmented space or of a facet list.
    Betti(BettiArgs),
    /// Collapse then blow up the stage-d boundary and check it returns the stage cylinders.
    Roundtrip(StageArgs),
    /// Cocycle, chain and action identities of φ, ψ and the corona action.
    ActionCheck(ActionArgs),
    /// Reduced cohomology of the blown corona of ℤⁿ∗ℤⁿ with m blown cosets.
    CoronaBetti(CoronaArgs),
}

#[derive(Debug, Args)]
struct HoroballArgs {
    /// Base segment {0..N} (default 32).
    #[arg(long)]
    base_len: Option<u32>,
    /// Horoball depth (default 6).
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Debug, Args)]
struct DeltaArgs {
    /// Comma-separated, strictly increasing (default 3,4,5,6).
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<usize>>,
    /// Horoball depth L (default 4).
    #[arg(long)]
    depth: Option<u32>,
    /// Non-peripheral ball vertices sampled per radius (default 48).
    #[arg(long)]
    sample: Option<usize>,
    /// Also write the augmented graph of the truncation parameters as DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BettiArgs {
    /// Cayley-ball radius r_c (default 3).
    #[arg(long)]
    radius: Option<usize>,
    /// Horoball depth L (default 4).
    #[arg(long)]
    depth: Option<u32>,
    /// Coset cutoff radius (default 4).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Rips scale D (default 1).
    #[arg(long)]
    scale: Option<u32>,
    /// Highest simplex dimension built (default 3).
    #[arg(long)]
    dim_cap: Option<usize>,
    /// Depth window r,R with r + D < R; the Cayley ball when absent.
    #[arg(long, value_delimiter = ',', num_args = 2, value_names = ["r", "R"])]
    window: Option<Vec<u32>>,
    /// Facet-list JSON {"facets": [[v, ...], ...]} to use instead of a Rips complex.
    #[arg(long, value_name = "FILE")]
    complex: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StageArgs {
    /// Stage d (default 5).
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Debug, Args)]
struct ActionArgs {
    /// Radius of the ball h and k range over (default 3).
    #[arg(long)]
    radius: Option<usize>,
    /// Stage d of the blown points (default 5).
    #[arg(long)]
    depth: Option<usize>,
    /// Coset cutoff, below d (default 4).
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Debug, Args)]
struct CoronaArgs {
    /// Rank of each free abelian factor, 2 or 3 (default 2).
    #[arg(long)]
    n: Option<usize>,
    /// Number of blown cosets (default 3).
    #[arg(long)]
    m: Option<usize>,
    /// Stage d (default 3).
    #[arg(long)]
    depth: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Sub {
    fn command(&self) -> Command {
        match self {
            Sub::HoroballCheck(_) => Command::HoroballCheck,
            Sub::DeltaScan(_) => Command::DeltaScan,
            Sub::Betti(_) => Command::Betti,
            Sub::Roundtrip(_) => Command::Roundtrip,
            Sub::ActionCheck(_) => Command::ActionCheck,
            Sub::CoronaBetti(_) => Command::CoronaBetti,
        }
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        match self {
            Sub::HoroballCheck(a) => {
                set(&mut cfg.horoball.base_len, a.base_len);
                set(&mut cfg.horoball.depth, a.depth);
            }
            Sub::DeltaScan(a) => {
                set(&mut cfg.radii, a.radii.clone());
                set(&mut cfg.truncation.depth, a.depth);
                set(&mut cfg.sample, a.sample);
            }
            Sub::Betti(a) => {
                set(&mut cfg.truncation.cayley_radius, a.radius);
                set(&mut cfg.truncation.depth, a.depth);
                set(&mut cfg.truncation.cutoff, a.cutoff);
                set(&mut cfg.rips.scale, a.scale);
                set(&mut cfg.rips.dim_cap, a.dim_cap);
                if let Some(w) = &a.window {
                    cfg.rips.window = Some(Window { lower: w[0], upper: w[1] });
                }
            }
            Sub::Roundtrip(a) => set(&mut cfg.truncation.stage, a.depth),
            Sub::ActionCheck(a) => {
                set(&mut cfg.action_radius, a.radius);
                set(&mut cfg.truncation.stage, a.depth);
                set(&mut cfg.truncation.cutoff, a.cutoff);
            }
            Sub::CoronaBetti(a) => {
                set(&mut cfg.corona.n, a.n);
                set(&mut cfg.corona.m, a.m);
                set(&mut cfg.corona.stage, a.depth);
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Error> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::config("(file)", format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn write_artifact(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::config("out", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Report, Error> {
    let cmd = cli.command.command();
    let mut cfg = load_config(cli.config.as_deref())?;
    cli.command.apply(&mut cfg);
    set(&mut cfg.seed, cli.seed);
    if let Some(out) = &cli.out {
        cfg.output = Some(out.display().to_string());
    }
    let limits = Limits::from_env()?;

    let report = match &cli.command {
        Sub::Betti(BettiArgs { complex: Some(path), .. }) => {
            cfg.validate(cmd)?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("complex", format!("{}: {e}", path.display())))?;
            let facets = FacetList::from_json(&text).map_err(|e| match e {
                Error::InvalidConfig { path, message } => Error::config(format!("complex:{path}"), message),
                other => other,
            })?;
            experiment::betti_report(&facets.build(&limits)?, false)?
        }
        _ => experiment::run(cmd, &cfg, &limits)?,
    };
    if let Sub::DeltaScan(DeltaArgs { dot: Some(path), .. }) = &cli.command {
        let aug = experiment::augmented_graph(cmd, &cfg, &limits)?;
        write_artifact(Some(path), &aug.to_dot())?;
    }
    let out = cfg.output.as_ref().map(PathBuf::from);
    write_artifact(out.as_deref(), &report.render(&cfg)?)?;
    if let Some(w) = report.witness_json() {
        eprintln!("{w}");
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(report) => ExitCode::from(report.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code(&e))
        }
    }
}

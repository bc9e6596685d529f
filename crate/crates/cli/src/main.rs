//! `riffle`: distances, simulations and asymptotics for biased riffle shuffles.
//!
//! Exit status: 0 on success, 2 for bad usage, 3 when a size cap is hit,
//! 4 for divergence, validity errors, or a failed `validate` run.
//! `RIFFLE_THREADS` sets the worker count (default: all cores).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riffle_core::experiments::{self, parse_c_range, parse_k_range, Command, RunConfig};
use riffle_core::report::Format;
use riffle_core::shuffle::Direction;
use riffle_core::{Backend, Caps, Error};

const THREADS_ENV: &str = "RIFFLE_THREADS";

#[derive(Parser)]
#[command(name = "riffle", version, about = "Mixing of biased riffle shuffles")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Separation, ℓ∞, birthday bound and (small n) enumerated distances per k.
    Distances(Common),
    /// Empirical law of k shuffles against the exact law.
    Simulate(Common),
    /// Tail of the strong stationary time against the exact separation.
    Sst(Common),
    /// Exact distances at the cutoff k(c) next to their limits.
    Cutoff(Common),
    /// Eigenvalues and multiplicities of one shuffle.
    Spectrum(Common),
    /// Large-n approximation of n!·P^{*k}(id) with its validity flag.
    Asym(Common),
    /// Run the acceptance checks.
    Validate(Common),
    /// Re-run the configuration stored in an output file's header.
    Replay {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Deck size.
    #[arg(long)]
    n: Option<usize>,
    /// θ as p/q or decimal, or a comma-separated bias vector.
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    theta: String,
    /// Number of shuffles: `7` or `1,2,5`.
    #[arg(long, conflicts_with = "k_range")]
    k: Option<String>,
    /// Inclusive range of shuffle counts: `1..30` or `2..30:4`.
    #[arg(long)]
    k_range: Option<String>,
    /// Window offsets: `-4..4`, `-1..1:0.25` or `0,1,2`.
    #[arg(long, allow_hyphen_values = true)]
    c_range: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "float")]
    backend: Backend,
    /// `forward` (cut and drop) or `inverse` (digit sort) sampler.
    #[arg(long, default_value = "forward")]
    sampler: String,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    partition_cap: Option<usize>,
    #[arg(long)]
    enum_cap: Option<usize>,
}

impl Common {
    fn into_config(self, command: Command) -> Result<RunConfig, Error> {
        let defaults = Caps::default();
        let caps = Caps {
            partitions: self.partition_cap.unwrap_or(defaults.partitions),
            enumeration: self.enum_cap.unwrap_or(defaults.enumeration),
            ..defaults
        };
        let k = match (&self.k, &self.k_range) {
            (Some(s), _) | (None, Some(s)) => parse_k_range(s)?,
            (None, None) => Vec::new(),
        };
        let c = self
            .c_range
            .as_deref()
            .map(parse_c_range)
            .transpose()?
            .unwrap_or_default();
        Ok(RunConfig {
            n: self.n.unwrap_or(0),
            theta: self.theta,
            k,
            c,
            trials: self.trials,
            seed: self.seed,
            backend: self.backend,
            sampler: self.sampler.parse::<Direction>()?,
            caps,
            format: self.format,
            out: self.out.map(|p| p.display().to_string()),
            ..RunConfig::new(command)
        })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::Capacity { .. } => 3,
        Error::Divergence(_) | Error::Validity(_) => 4,
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<u8, Error> {
    init_threads()?;
    let (cfg, out) = match cli.command {
        Cmd::Replay { file, out } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", file.display())))?;
            (RunConfig::from_output(&text)?, out)
        }
        Cmd::Distances(c) => (c.clone().into_config(Command::Distances)?, c.out),
        Cmd::Simulate(c) => (c.clone().into_config(Command::Simulate)?, c.out),
        Cmd::Sst(c) => (c.clone().into_config(Command::Sst)?, c.out),
        Cmd::Cutoff(c) => (c.clone().into_config(Command::Cutoff)?, c.out),
        Cmd::Spectrum(c) => (c.clone().into_config(Command::Spectrum)?, c.out),
        Cmd::Asym(c) => (c.clone().into_config(Command::Asym)?, c.out),
        Cmd::Validate(c) => (c.clone().into_config(Command::Validate)?, c.out),
    };
    let table = experiments::run(&cfg)?;
    let text = table.render(cfg.format);
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if cfg.command == Command::Validate && !experiments::all_passed(&table) {
        eprintln!("riffle: some acceptance checks failed");
        return Ok(4);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("riffle: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

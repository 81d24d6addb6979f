use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fermi_ent::dm::{build_ghz, build_paired_state};
use fermi_ent::hypergraph::parse_hypergraph;
use fermi_ent::random::{run_ensemble, EnsembleConfig, EnsembleKind, DEFAULT_BINS};
use fermi_ent::report::{analyze, design_report, histogram_csv, search_json};
use fermi_ent::search::{search_maximal_state, ExistenceVerdict, SearchBudget};
use fermi_ent::statefile::{read_state_file, write_state_file};
use fermi_ent::Error;

#[derive(Parser)]
#[command(
    name = "fermi-ent",
    version,
    about = "M-body entanglement of fermionic states"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectra and entropies of rho^(M) for a state file.
    Analyze {
        file: PathBuf,
        /// Cuts to analyse, comma separated (default: 1..N-1).
        #[arg(short = 'm', long = "m", value_delimiter = ',')]
        cuts: Vec<usize>,
        #[arg(long)]
        renormalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GHZ_r state on D orbitals as a state file.
    Ghz { d: usize, r: usize },
    /// Paired state with k pairs on D orbitals as a state file.
    Paired { d: usize, k: usize },
    /// Checks whether a hypergraph file is a t-design.
    Design { file: PathBuf, t: usize },
    /// Decides whether a maximally M-body entangled state exists.
    Search {
        d: usize,
        n: usize,
        m: usize,
        #[arg(long)]
        max_edges: Option<usize>,
        #[arg(long)]
        budget_classes: Option<u64>,
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Writes the found state as a state file.
        #[arg(long)]
        emit_state: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral statistics of random states or trace-fixed WL matrices.
    Random {
        d: usize,
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 1000)]
        realizations: usize,
        #[arg(long, env = "FERMI_ENT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Kind::State)]
        kind: Kind,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        hist: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    State,
    Wl,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceExhausted(_) => 2,
        Error::NumericalFailure(_) => 3,
        _ => 1,
    }
}

fn emit(text: &str, out: Option<&Path>) -> fermi_ent::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> fermi_ent::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(&s, out)
}

fn run(cli: Cli) -> fermi_ent::Result<u8> {
    match cli.command {
        Command::Analyze {
            file,
            cuts,
            renormalize,
            out,
        } => {
            let state = read_state_file(&file, renormalize)?;
            let cuts = if cuts.is_empty() {
                (1..state.num_particles()).collect()
            } else {
                cuts
            };
            emit_json(&analyze(&state, &cuts)?, out.as_deref())?;
        }
        Command::Ghz { d, r } => emit(&write_state_file(&build_ghz(d, r)?), None)?,
        Command::Paired { d, k } => emit(&write_state_file(&build_paired_state(d, k)?), None)?,
        Command::Design { file, t } => {
            let hg = parse_hypergraph(&std::fs::read_to_string(&file)?)?;
            emit_json(&design_report(&hg, t), None)?;
        }
        Command::Search {
            d,
            n,
            m,
            max_edges,
            budget_classes,
            budget_seconds,
            emit_state,
            out,
        } => {
            let defaults = SearchBudget::default();
            let budget = SearchBudget {
                max_classes: budget_classes.or(defaults.max_classes),
                max_seconds: budget_seconds.or(defaults.max_seconds),
                ..defaults
            };
            let report = search_maximal_state(d, n, m, max_edges, budget)?;
            if let (Some(path), Some(s)) = (&emit_state, report.verdict.maximal_state()) {
                std::fs::write(path, write_state_file(&s.state))?;
            }
            emit_json(&search_json(&report)?, out.as_deref())?;
            if let ExistenceVerdict::Unknown { .. } = report.verdict {
                return Ok(2);
            }
        }
        Command::Random {
            d,
            n,
            m,
            realizations,
            seed,
            kind,
            bins,
            out,
            hist,
        } => {
            let kind = match kind {
                Kind::State => EnsembleKind::State,
                Kind::Wl => EnsembleKind::Wl,
            };
            let cfg = EnsembleConfig {
                d,
                n,
                m,
                realizations,
                seed,
                bins,
                kind,
            };
            let report = run_ensemble(&cfg)?;
            if let Some(path) = hist {
                std::fs::write(path, histogram_csv(&report))?;
            }
            emit_json(&report, out.as_deref())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

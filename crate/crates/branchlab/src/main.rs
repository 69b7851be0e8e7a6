use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use branchlab::cli::{
    cmd_correlate, cmd_gen, cmd_run, cmd_verify_lemmas, parse_init_state, Algo, CliError,
    GraphSource, OutputFormat, RunConfig, VariantSelection, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "branchlab",
    about = "Branch-based vs. branch-avoiding graph algorithms under a simulated 2-bit branch predictor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random G(n, m) graph and write it as a METIS file.
    Gen {
        /// Number of vertices.
        n: usize,
        /// Number of undirected edges.
        m: usize,
        /// Generator seed; falls back to BRANCHLAB_SEED, then 42.
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an algorithm with predictor simulation and separate timing.
    Run {
        /// METIS graph file to load.
        #[arg(long, conflicts_with = "gen")]
        graph: Option<PathBuf>,
        /// Generator spec N,M[,SEED] instead of a file.
        #[arg(long, value_name = "N,M[,SEED]")]
        gen: Option<String>,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "both")]
        variant: VariantArg,
        /// BFS root vertex (required for --algo bfs).
        #[arg(long)]
        root: Option<usize>,
        /// Initial predictor state per site: snt, wnt, wt, or st.
        #[arg(long, default_value = "wnt")]
        init_state: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Timing-pass repetitions (per-iteration medians are reported).
        #[arg(long, default_value_t = 5)]
        timing_reps: usize,
    },
    /// Check the predictor lemmas and closed-form expectations.
    VerifyLemmas {
        /// Seed for the random-prior sweep.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pool per-iteration samples from run reports and correlate T,I,B,M,L,S.
    Correlate {
        /// Report files produced by `run` (CSV or JSON).
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum AlgoArg {
    Cc,
    Bfs,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum VariantArg {
    Based,
    Avoiding,
    Both,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn env_seed() -> u64 {
    std::env::var("BRANCHLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Gen { n, m, seed, out } => {
            cmd_gen(n, m, seed.unwrap_or_else(env_seed), &out)?;
            Ok(true)
        }
        Command::Run {
            graph,
            gen,
            algo,
            variant,
            root,
            init_state,
            format,
            out,
            timing_reps,
        } => {
            let source = match (graph, gen) {
                (Some(path), None) => GraphSource::File(path),
                (None, Some(spec)) => GraphSource::parse_gen_spec(&spec, env_seed())?,
                _ => {
                    eprintln!("exactly one of --graph or --gen is required");
                    return Ok(false);
                }
            };
            let config = RunConfig {
                source,
                algo: match algo {
                    AlgoArg::Cc => Algo::Cc,
                    AlgoArg::Bfs => Algo::Bfs,
                },
                variant: match variant {
                    VariantArg::Based => VariantSelection::Based,
                    VariantArg::Avoiding => VariantSelection::Avoiding,
                    VariantArg::Both => VariantSelection::Both,
                },
                root,
                init_state: parse_init_state(&init_state)?,
                format: match format {
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Json => OutputFormat::Json,
                },
                out,
                timing_reps,
            };
            let outcome = cmd_run(&config)?;
            if !outcome.checks_passed {
                eprintln!("equivalence check FAILED");
            }
            Ok(outcome.checks_passed)
        }
        Command::VerifyLemmas { seed } => {
            let (checks, rendered) = cmd_verify_lemmas(seed.unwrap_or_else(env_seed));
            print!("{rendered}");
            Ok(branchlab::lemmas::all_passed(&checks))
        }
        Command::Correlate { files, format, out } => {
            let format = match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
            cmd_correlate(&files, format, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}

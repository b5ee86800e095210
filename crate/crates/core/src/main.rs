use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use iecc::adversary::{default_fraction, default_suite, StrategySpec};
use iecc::codes::{derive_params, parse_rational, Codebook, ProtocolParams, Rational};
use iecc::harness::{
    audit_transcript, run_experiment, sweep_budget, trial_input, worker_pool, write_metrics,
    write_sweep_csv, ExperimentConfig, OutputFormat,
};
use iecc::oracle::{attack_search, reduced_inner_code, AttackOutcome, TinyCodeTable};
use iecc::protocol::Transcript;

/// Interactive erasure-correcting code: simulator, audits and experiments.
#[derive(Parser)]
#[command(
    name = "iecc",
    version,
    after_help = "Worker thread count: IECC_WORKERS (default: all cores)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived parameters as JSON.
    Params(Scale),
    /// Run a batch of trials against one strategy.
    Run(RunArgs),
    /// Success rate per budget fraction across strategies (CSV).
    Sweep(SweepArgs),
    /// Audit transcript files.
    Audit(AuditArgs),
    /// Code property audits.
    Codes {
        #[command(subcommand)]
        command: CodesCommand,
    },
    /// Counterexample search.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum CodesCommand {
    /// Sampled distance and segment audits at full scale plus the
    /// exhaustive audit of the reduced inner code.
    Audit {
        #[command(flatten)]
        scale: Scale,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Run the bundled strategies and random adversaries; exit 1 on any failure.
    Search {
        #[command(flatten)]
        scale: Scale,
        /// Budget fraction; `6/11 − 4ε` if absent.
        #[arg(long, value_parser = parse_rational)]
        fraction: Option<Rational>,
        #[arg(long, default_value_t = 1000)]
        tries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Input seed; Alice's input is drawn from it.
        #[arg(long, default_value_t = 0)]
        input_seed: u64,
        /// Where a counterexample transcript is written.
        #[arg(long, default_value = "counterexample.jsonl")]
        archive: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct Scale {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value = "1/10", value_parser = parse_rational)]
    epsilon: Rational,
}

impl Scale {
    fn params(&self) -> Result<ProtocolParams> {
        Ok(derive_params(self.n, self.epsilon)?)
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_rational)]
    epsilon: Option<Rational>,
    /// Strategy as JSON, e.g. '{"kind":"IidRate","rate":0.3}'.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, value_parser = parse_rational)]
    fraction: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    slack: Option<Rational>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Directory for per-trial transcripts.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scale: Scale,
    /// Comma-separated fractions, e.g. `0,8/55,0.3,1`.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational, default_value = "0,8/55,3/10,6/11,1")]
    fractions: Vec<Rational>,
    /// One strategy as JSON; the bundled suite if absent.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fractions up to this must reach a success rate of 1; `6/11 − slack·ε`.
    #[arg(long, value_parser = parse_rational, default_value = "4")]
    slack: Rational,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    files: Vec<PathBuf>,
    /// Skip re-running each transcript.
    #[arg(long)]
    no_replay: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every asserted gate passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Params(scale) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&scale.params()?.report())?
            );
            Ok(true)
        }
        Command::Run(args) => run_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Audit(args) => audit_cmd(args),
        Command::Codes {
            command:
                CodesCommand::Audit {
                    scale,
                    samples,
                    seed,
                },
        } => codes_audit_cmd(scale, samples, seed),
        Command::Oracle {
            command:
                OracleCommand::Search {
                    scale,
                    fraction,
                    tries,
                    seed,
                    input_seed,
                    archive,
                },
        } => {
            let params = scale.params()?;
            let fraction = fraction
                .unwrap_or_else(|| default_fraction(scale.epsilon, Rational::from_integer(4)));
            let book = Arc::new(Codebook::new(params)?);
            let x = trial_input(scale.n, input_seed);
            let outcome = worker_pool()?
                .install(|| attack_search(&book, &x, fraction, tries, seed, &|_| {}))?;
            match outcome {
                AttackOutcome::NoneFound { runs } => {
                    println!("NoneFound: {runs} runs at fraction {fraction}");
                    Ok(true)
                }
                AttackOutcome::Counterexample(t) => {
                    t.write_jsonl(BufWriter::new(File::create(&archive)?))?;
                    println!(
                        "counterexample ({}) written to {}",
                        t.header.strategy,
                        archive.display()
                    );
                    Ok(false)
                }
            }
        }
    }
}

fn parse_strategy(s: &str) -> Result<StrategySpec> {
    serde_json::from_str(s).with_context(|| format!("bad strategy {s}"))
}

fn run_cmd(args: RunArgs) -> Result<bool> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => {
            let (Some(n), Some(strategy)) = (args.n, &args.strategy) else {
                bail!("without --config, --n and --strategy are required");
            };
            ExperimentConfig::new(n, Rational::new(1, 10), parse_strategy(strategy)?)
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = &args.strategy {
        cfg.strategy = parse_strategy(s)?;
    }
    if args.fraction.is_some() {
        cfg.budget_fraction = args.fraction;
    }
    if let Some(s) = args.slack {
        cfg.slack = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.output.is_some() {
        cfg.output_path = args.output;
    }
    if let Some(f) = args.format {
        cfg.format = f.into();
    }
    if args.transcripts.is_some() {
        cfg.transcript_dir = args.transcripts;
    }
    let metrics = run_experiment(&cfg)?;
    if cfg.output_path.is_none() {
        write_metrics(&metrics, cfg.format, io::stdout().lock())?;
    }
    let successes = metrics.iter().filter(|m| m.success).count();
    let gated = cfg.fraction() <= default_fraction(cfg.epsilon, cfg.slack);
    eprintln!(
        "{successes}/{} succeeded at fraction {}{}",
        metrics.len(),
        cfg.fraction(),
        if gated {
            ""
        } else {
            " (above the safe fraction, not gated)"
        }
    );
    Ok(!gated || successes == metrics.len())
}

fn sweep_cmd(args: SweepArgs) -> Result<bool> {
    let params = args.scale.params()?;
    let strategies = match &args.strategy {
        Some(s) => vec![parse_strategy(s)?],
        None => default_suite(&params),
    };
    let book = Arc::new(Codebook::new(params)?);
    let rows = worker_pool()?.install(|| {
        sweep_budget(
            &book,
            &strategies,
            &args.fractions,
            args.trials,
            args.seed,
            &|_, _| Ok(()),
        )
    })?;
    match &args.output {
        Some(path) => write_sweep_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    let safe = default_fraction(args.scale.epsilon, args.slack);
    let mut ok = true;
    for r in rows
        .iter()
        .filter(|r| r.fraction <= safe && r.successes < r.trials)
    {
        eprintln!(
            "gate failed: {} at {} succeeded {}/{}",
            r.strategy, r.fraction, r.successes, r.trials
        );
        ok = false;
    }
    Ok(ok)
}

fn audit_cmd(args: AuditArgs) -> Result<bool> {
    if args.files.is_empty() {
        bail!("no transcript files given");
    }
    let mut books: Vec<Arc<Codebook>> = Vec::new();
    let mut clean = true;
    let mut out = io::stdout().lock();
    for path in &args.files {
        let t = Transcript::read_jsonl(BufReader::new(
            File::open(path).with_context(|| path.display().to_string())?,
        ))
        .with_context(|| path.display().to_string())?;
        let params = t.params()?;
        let book = match books.iter().find(|b| b.params() == &params) {
            Some(b) => b.clone(),
            None => {
                let b = Arc::new(Codebook::new(params)?);
                books.push(b.clone());
                b
            }
        };
        let report = audit_transcript(&t, &book, !args.no_replay)?;
        clean &= report.is_clean();
        writeln!(
            out,
            "{}: {} chunks, {} bits, {} erased, success={}, {}",
            path.display(),
            report.chunks,
            report.total_bits,
            report.erased_bits,
            report.success,
            if report.is_clean() {
                "clean".to_string()
            } else {
                format!("{} violations", report.violations.len())
            }
        )?;
        for v in report.violations.iter().take(20) {
            writeln!(out, "  {v}")?;
        }
    }
    Ok(clean)
}

fn codes_audit_cmd(scale: Scale, samples: usize, seed: u64) -> Result<bool> {
    let params = scale.params()?;
    let book = Codebook::new(params.clone())?;
    let sampled = book.quick_audit(samples, seed);
    let sampled_ok = sampled.check(&params).is_ok();
    let reduced = reduced_inner_code(scale.epsilon)?;
    let table = TinyCodeTable::of_inner(&reduced)?;
    let exact = table.exhaustive_min_distance();
    let exact_ok = exact.meets_bound(&scale.epsilon, reduced.len());
    let report = serde_json::json!({
        "sampled": {
            "samples": sampled.samples,
            "p": params.p,
            "minPairDistance": sampled.min_pair_distance,
            "minDistanceToZero": sampled.min_distance_to_zero,
            "minDistanceToOne": sampled.min_distance_to_one,
            "maxEqualSegments": sampled.max_equal_segments,
            "maxEqualSegmentsBound": params.max_equal_segments(),
            "pass": sampled_ok,
        },
        "reduced": {
            "codewords": table.len(),
            "p": reduced.len(),
            "minPairDistance": exact.pairwise,
            "minDistanceToZero": exact.to_zero,
            "minDistanceToOne": exact.to_one,
            "pass": exact_ok,
        },
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(sampled_ok && exact_ok)
}

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::sync::Arc;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::StrategySpec;
use crate::codes::{rational_to_f64, Codebook, Rational};
use crate::gf2::BitVector;
use crate::protocol::{run_protocol, BobCase, RunSetup, Transcript};

use super::config::{rational_serde, ExperimentConfig, OutputFormat};
use super::{HarnessError, WORKERS_ENV};

/// Called with `(trial, transcript)` for every finished trial.
pub type TrialSink<'a> = dyn Fn(usize, &Transcript) -> Result<(), HarnessError> + Sync + 'a;

/// Per-run measurements. Everything except `wall_time_ms` is a function of
/// the transcript alone (see [`metrics_from_transcript`]).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMetrics {
    pub trial: usize,
    pub seed: u64,
    pub strategy: String,
    pub success: bool,
    pub erased_alice_bits: u64,
    pub erased_bob_bits: u64,
    pub total_bits: u64,
    #[serde(with = "rational_serde")]
    pub erased_fraction: Rational,
    pub chunks_in_p0: usize,
    pub chunks_in_p1: usize,
    pub chunks_in_p2: usize,
    pub clamped: u64,
    pub bob_case_histogram: BTreeMap<String, usize>,
    pub wall_time_ms: f64,
}

impl RunMetrics {
    /// The same metrics with the timing zeroed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

pub fn metrics_from_transcript(
    trial: usize,
    t: &Transcript,
    wall_time_ms: f64,
) -> Result<RunMetrics, HarnessError> {
    let total_bits = t.params()?.total_bits();
    let mut histogram: BTreeMap<String, usize> = BobCase::ALL
        .iter()
        .map(|c| (c.name().to_string(), 0))
        .collect();
    let mut phases = [0usize; 3];
    for c in &t.chunks {
        *histogram.entry(c.bob_case.name().to_string()).or_default() += 1;
        phases[c.phase.number() as usize] += 1;
    }
    Ok(RunMetrics {
        trial,
        seed: t.header.seed,
        strategy: t.header.strategy.clone(),
        success: t.success(),
        erased_alice_bits: t.trailer.erased_alice,
        erased_bob_bits: t.trailer.erased_bob,
        total_bits,
        erased_fraction: Rational::new(t.erased_bits(), total_bits),
        chunks_in_p0: phases[0],
        chunks_in_p1: phases[1],
        chunks_in_p2: phases[2],
        clamped: t.trailer.clamped,
        bob_case_histogram: histogram,
        wall_time_ms,
    })
}

/// Seed of trial `k` in a batch seeded with `base`.
pub fn trial_seed(base: u64, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(k as u64);
    rng.next_u64()
}

/// The input Alice holds in a trial with the given seed.
pub fn trial_input(n: usize, seed: u64) -> BitVector {
    BitVector::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Runs `trials` independent trials on the current rayon pool. Results are
/// in trial order regardless of scheduling.
pub fn run_trials(
    book: &Arc<Codebook>,
    strategy: &StrategySpec,
    budget_fraction: Rational,
    trials: usize,
    base_seed: u64,
    sink: &TrialSink<'_>,
) -> Result<Vec<RunMetrics>, HarnessError> {
    let params = book.params();
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = trial_seed(base_seed, k);
            let x = trial_input(params.n, seed);
            let mut adversary = strategy.build(params, seed);
            let setup = RunSetup {
                seed,
                strategy: strategy.label(),
                budget_fraction,
            };
            let start = Instant::now();
            let t = run_protocol(book, &x, adversary.as_mut(), &setup)?;
            let wall = start.elapsed().as_secs_f64() * 1e3;
            sink(k, &t)?;
            metrics_from_transcript(k, &t, wall)
        })
        .collect()
}

/// A pool sized by `IECC_WORKERS`, or rayon's default when unset.
pub fn worker_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let workers: usize = v
            .parse()
            .map_err(|_| HarnessError::Config(format!("{WORKERS_ENV}={v} is not a count")))?;
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Runs the configured batch, writing transcripts and metrics where the
/// config says to.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunMetrics>, HarnessError> {
    let params = cfg.validate()?;
    let book = Arc::new(Codebook::new(params)?);
    if let Some(dir) = &cfg.transcript_dir {
        fs::create_dir_all(dir)?;
    }
    let sink = |k: usize, t: &Transcript| -> Result<(), HarnessError> {
        if let Some(dir) = &cfg.transcript_dir {
            let file = File::create(dir.join(format!("trial-{k:05}.jsonl")))?;
            t.write_jsonl(BufWriter::new(file))?;
        }
        Ok(())
    };
    let metrics = worker_pool()?.install(|| {
        run_trials(
            &book,
            &cfg.strategy,
            cfg.fraction(),
            cfg.trials,
            cfg.seed,
            &sink,
        )
    })?;
    if let Some(path) = &cfg.output_path {
        write_metrics(&metrics, cfg.format, BufWriter::new(File::create(path)?))?;
    }
    Ok(metrics)
}

pub fn write_metrics(
    metrics: &[RunMetrics],
    format: OutputFormat,
    mut out: impl Write,
) -> Result<(), HarnessError> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, metrics)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Vec<String> = [
                "trial",
                "seed",
                "strategy",
                "success",
                "erasedAliceBits",
                "erasedBobBits",
                "totalBits",
                "erasedFraction",
                "chunksInP0",
                "chunksInP1",
                "chunksInP2",
                "clamped",
                "wallTimeMs",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend(BobCase::ALL.iter().map(|c| format!("case{}", c.name())));
            w.write_record(&header)?;
            for m in metrics {
                let mut row = vec![
                    m.trial.to_string(),
                    m.seed.to_string(),
                    m.strategy.clone(),
                    m.success.to_string(),
                    m.erased_alice_bits.to_string(),
                    m.erased_bob_bits.to_string(),
                    m.total_bits.to_string(),
                    rational_to_f64(&m.erased_fraction).to_string(),
                    m.chunks_in_p0.to_string(),
                    m.chunks_in_p1.to_string(),
                    m.chunks_in_p2.to_string(),
                    m.clamped.to_string(),
                    format!("{:.3}", m.wall_time_ms),
                ];
                row.extend(BobCase::ALL.iter().map(|c| {
                    m.bob_case_histogram
                        .get(c.name())
                        .copied()
                        .unwrap_or(0)
                        .to_string()
                }));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_single_trial() {
        let cfg = ExperimentConfig::new(64, Rational::new(1, 10), StrategySpec::NoNoise);
        let m = run_experiment(&cfg).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].success);
        assert_eq!(m[0].erased_fraction, Rational::from_integer(0));
        assert_eq!(
            m[0].chunks_in_p0 + m[0].chunks_in_p1 + m[0].chunks_in_p2,
            600
        );
        assert_eq!(m[0].bob_case_histogram["P0Unique"], 1);
    }

    #[test]
    fn repeated_config_gives_identical_metrics() {
        let mut cfg = ExperimentConfig::new(
            16,
            Rational::new(1, 10),
            StrategySpec::IidRate { rate: 0.3 },
        );
        cfg.trials = 3;
        cfg.seed = 5;
        let a: Vec<_> = run_experiment(&cfg)
            .unwrap()
            .iter()
            .map(RunMetrics::without_timing)
            .collect();
        let b: Vec<_> = run_experiment(&cfg)
            .unwrap()
            .iter()
            .map(RunMetrics::without_timing)
            .collect();
        assert_eq!(a, b);
        assert_ne!(a[0].seed, a[1].seed);
    }

    #[test]
    fn csv_and_transcripts_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(16, Rational::new(1, 10), StrategySpec::SilenceBob);
        cfg.trials = 2;
        cfg.format = OutputFormat::Csv;
        cfg.output_path = Some(dir.path().join("m.csv"));
        cfg.transcript_dir = Some(dir.path().join("t"));
        run_experiment(&cfg).unwrap();
        let csv = fs::read_to_string(dir.path().join("m.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("trial,seed,strategy,success,"));
        let f = File::open(dir.path().join("t/trial-00001.jsonl")).unwrap();
        let t = Transcript::read_jsonl(std::io::BufReader::new(f)).unwrap();
        assert_eq!(t.header.strategy, "SilenceBob");
    }
}

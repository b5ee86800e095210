use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::adversary::StrategySpec;
use crate::codes::{rational_to_f64, Codebook, Rational};

use super::config::rational_serde;
use super::experiment::{run_trials, TrialSink};
use super::HarnessError;

/// One `(fraction, strategy)` cell of a budget sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    #[serde(with = "rational_serde")]
    pub fraction: Rational,
    pub strategy: String,
    pub trials: usize,
    pub successes: usize,
    pub mean_erased_fraction: f64,
    pub mean_wall_time_ms: f64,
}

impl SweepRow {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        self.successes as f64 / self.trials as f64
    }
}

/// Runs `trials` trials of every strategy at every fraction. Each cell uses
/// the same trial seeds, so cells differ only in the budget.
pub fn sweep_budget(
    book: &Arc<Codebook>,
    strategies: &[StrategySpec],
    fractions: &[Rational],
    trials: usize,
    seed: u64,
    sink: &TrialSink<'_>,
) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rows = Vec::with_capacity(strategies.len() * fractions.len());
    for &fraction in fractions {
        for spec in strategies {
            let metrics = run_trials(book, spec, fraction, trials, seed, sink)?;
            let count = metrics.len().max(1) as f64;
            rows.push(SweepRow {
                fraction,
                strategy: spec.label(),
                trials,
                successes: metrics.iter().filter(|m| m.success).count(),
                mean_erased_fraction: metrics
                    .iter()
                    .map(|m| rational_to_f64(&m.erased_fraction))
                    .sum::<f64>()
                    / count,
                mean_wall_time_ms: metrics.iter().map(|m| m.wall_time_ms).sum::<f64>() / count,
            });
        }
    }
    Ok(rows)
}

/// Columns: fraction, strategy, trials, successes, meanErasedFraction,
/// meanWallTimeMs.
pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "fraction",
        "strategy",
        "trials",
        "successes",
        "meanErasedFraction",
        "meanWallTimeMs",
    ])?;
    for r in rows {
        w.write_record([
            format!("{:.6}", rational_to_f64(&r.fraction)),
            r.strategy.clone(),
            r.trials.to_string(),
            r.successes.to_string(),
            format!("{:.6}", r.mean_erased_fraction),
            format!("{:.3}", r.mean_wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

use serde::{Deserialize, Serialize};

use crate::codes::ProtocolParams;

use super::strategies::{
    AnalysisGuided, FrontLoad, GuidedProfile, IidRate, NoNoise, RandomAdversary, SilenceBob,
    TailErase,
};
use super::Adversary;

/// Serializable description of an adversary, e.g.
/// `{"kind": "IidRate", "rate": 0.3}` or `{"kind": "TailErase", "fromChunk": 500}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all_fields = "camelCase")]
pub enum StrategySpec {
    NoNoise,
    IidRate {
        rate: f64,
    },
    SilenceBob,
    FrontLoad,
    TailErase {
        from_chunk: usize,
    },
    AnalysisGuided {
        #[serde(default = "one")]
        stall_blocks: usize,
        /// Flipped bit defining the decoy; drawn from the trial seed if absent.
        #[serde(default)]
        decoy_bit: Option<usize>,
        #[serde(default = "yes")]
        silence_bob: bool,
        #[serde(default)]
        tail_from: Option<usize>,
    },
    /// Each trial draws a fresh [`RandomAdversary`] from its seed; `tries`
    /// is the trial count used by the attack search.
    RandomSearch {
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        tries: usize,
    },
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl StrategySpec {
    pub fn build(&self, params: &ProtocolParams, seed: u64) -> Box<dyn Adversary + Send> {
        match self {
            StrategySpec::NoNoise => Box::new(NoNoise),
            StrategySpec::IidRate { rate } => Box::new(IidRate::new(*rate, seed)),
            StrategySpec::SilenceBob => Box::new(SilenceBob),
            StrategySpec::FrontLoad => Box::new(FrontLoad),
            StrategySpec::TailErase { from_chunk } => Box::new(TailErase::new(*from_chunk)),
            StrategySpec::AnalysisGuided {
                stall_blocks,
                decoy_bit,
                silence_bob,
                tail_from,
            } => Box::new(AnalysisGuided::new(GuidedProfile {
                stall_blocks: *stall_blocks,
                decoy_bit: decoy_bit.unwrap_or((seed % params.n as u64) as usize),
                silence_bob: *silence_bob,
                tail_from: *tail_from,
            })),
            StrategySpec::RandomSearch { seed: base, .. } => Box::new(RandomAdversary::new(
                base ^ seed,
                params.t,
                params.block_len,
                params.n,
            )),
        }
    }

    /// Short label used in tables, e.g. `IidRate(0.3)`.
    pub fn label(&self) -> String {
        match self {
            StrategySpec::NoNoise => "NoNoise".into(),
            StrategySpec::IidRate { rate } => format!("IidRate({rate})"),
            StrategySpec::SilenceBob => "SilenceBob".into(),
            StrategySpec::FrontLoad => "FrontLoad".into(),
            StrategySpec::TailErase { from_chunk } => format!("TailErase({from_chunk})"),
            StrategySpec::AnalysisGuided {
                stall_blocks,
                tail_from,
                ..
            } => match tail_from {
                Some(r) => format!("AnalysisGuided({stall_blocks},tail={r})"),
                None => format!("AnalysisGuided({stall_blocks})"),
            },
            StrategySpec::RandomSearch { seed, .. } => format!("RandomSearch({seed})"),
        }
    }
}

/// The bundled deterministic strategies: no noise, two i.i.d. rates,
/// silencing Bob, front loading, five tail starts and the guided attack.
pub fn default_suite(params: &ProtocolParams) -> Vec<StrategySpec> {
    let t = params.t;
    let mut suite = vec![
        StrategySpec::NoNoise,
        StrategySpec::IidRate { rate: 0.3 },
        StrategySpec::IidRate { rate: 0.5 },
        StrategySpec::SilenceBob,
        StrategySpec::FrontLoad,
    ];
    for k in [0, 1, 2, 3, 4] {
        suite.push(StrategySpec::TailErase {
            from_chunk: 1 + k * t / 5,
        });
    }
    suite.push(StrategySpec::AnalysisGuided {
        stall_blocks: 1,
        decoy_bit: None,
        silence_bob: true,
        tail_from: None,
    });
    suite
}

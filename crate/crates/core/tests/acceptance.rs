//! Acceptance gates. Each test prints one `PASS`/`FAIL` line (straight to
//! stdout, so it shows up even when output is captured) and then asserts.
//!
//! Criteria 4, 7 and 8 share one run of the resilience suite; 5 feeds its
//! transcripts into 7 and 8 as well.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iecc::adversary::{default_fraction, default_suite, NoNoise, StrategySpec};
use iecc::codes::{
    derive_params, Candidate, Codebook, InnerDecode, InnerMessage, ProtocolParams, Rational,
};
use iecc::gf2::{BitVector, TriString};
use iecc::harness::{audit_transcript, run_trials, trial_input, AuditCheck};
use iecc::oracle::{attack_search, reduced_inner_code, AttackOutcome, TinyCodeTable};
use iecc::protocol::{run_protocol, RunSetup, Transcript};

fn eps() -> Rational {
    Rational::new(1, 10)
}

fn safe_fraction() -> Rational {
    default_fraction(eps(), Rational::from_integer(4))
}

fn book(n: usize) -> Arc<Codebook> {
    Arc::new(Codebook::new(derive_params(n, eps()).unwrap()).unwrap())
}

fn report(id: &str, name: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let tag = if ok { "PASS" } else { "FAIL" };
    writeln!(out, "{tag} [{id}] {name}: {detail}").unwrap();
}

/// `a ≥ (1/2 − ε)·len`, in integers.
fn at_least_half_minus_eps(a: usize, len: usize) -> bool {
    let (num, den) = (*eps().numer() as u128, *eps().denom() as u128);
    2 * den * a as u128 >= (den - 2 * num) * len as u128
}

fn random_inner_message(params: &ProtocolParams, rng: &mut impl Rng) -> InnerMessage {
    let len = rng.gen_range(0..=params.ind_cap);
    InnerMessage {
        segment: BitVector::random(params.alpha, rng),
        ind: iecc::codes::IndexBits::from_bits((0..len).map(|_| rng.gen()).collect()),
    }
}

fn mask_of(len: usize, positions: impl IntoIterator<Item = usize>) -> BitVector {
    let mut m = BitVector::zeros(len);
    for i in positions {
        m.set(i, true);
    }
    m
}

/// Most erasures allowed strictly below `(3/4 − 3/2·ε)·len`.
fn list_decoding_erasure_cap(len: usize) -> usize {
    let (a, d) = (*eps().numer() as u128, *eps().denom() as u128);
    // largest e with 4·d·e < (3d − 6a)·len
    let bound = (3 * d - 6 * a) * len as u128;
    ((bound - 1) / (4 * d)) as usize
}

#[test]
fn criterion_1_noiseless_correctness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0;
    for n in [64, 256, 1024] {
        let book = book(n);
        let metrics = run_trials(
            &book,
            &StrategySpec::NoNoise,
            Rational::from_integer(0),
            50,
            n as u64,
            &|_, _| Ok(()),
        )
        .unwrap();
        runs += metrics.len();
        failures.extend(
            metrics
                .iter()
                .filter(|m| !m.success)
                .map(|m| format!("n={n} trial {}", m.trial)),
        );
    }
    let ok = failures.is_empty() && runs == 150;
    report(
        "1",
        "noiseless correctness",
        ok,
        &format!(
            "{}/{runs} decoded, {:.1}s",
            runs - failures.len(),
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_2a_segment_distinctness() {
    let params = derive_params(256, eps()).unwrap();
    let book = book(256);
    let mut rng = ChaCha8Rng::seed_from_u64(0x2a);
    let (num, den) = (*eps().numer() as usize, *eps().denom() as usize);
    let mut worst = 0;
    let mut bad_pairs = 0;
    for k in 0..1000 {
        let x = BitVector::random(256, &mut rng);
        let mut y = BitVector::random(256, &mut rng);
        // a quarter of the pairs differ in a single bit
        if k % 4 == 0 {
            y = x.clone();
            y.flip(rng.gen_range(0..256));
        }
        if x == y {
            continue;
        }
        let (cx, cy) = (
            book.outer().encode(&x).unwrap(),
            book.outer().encode(&y).unwrap(),
        );
        let equal = (0..params.m / params.alpha)
            .filter(|&j| {
                cx.slice(j * params.alpha, params.alpha) == cy.slice(j * params.alpha, params.alpha)
            })
            .count();
        worst = worst.max(equal);
        // |bad| ≤ ε·m/α  ⇔  |bad|·α·den ≤ num·m
        if equal * params.alpha * den > num * params.m {
            bad_pairs += 1;
        }
    }
    let ok = bad_pairs == 0;
    report(
        "2a",
        "segment distinctness",
        ok,
        &format!(
            "1000 pairs, max equal segments {worst}, bound εm/α = {}",
            num * params.m / (den * params.alpha)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2b_inner_distance() {
    let reduced = reduced_inner_code(eps()).unwrap();
    let table = TinyCodeTable::of_inner(&reduced).unwrap();
    let exact = table.exhaustive_min_distance();
    let p_r = reduced.len();
    let reduced_ok = [exact.pairwise, exact.to_zero, exact.to_one]
        .iter()
        .all(|&d| at_least_half_minus_eps(d, p_r));

    let params = derive_params(256, eps()).unwrap();
    let book = book(256);
    let p = params.p;
    let mut rng = ChaCha8Rng::seed_from_u64(0x2b);
    let mut violations = 0;
    let (mut min_pair, mut min_zero, mut min_one) = (p, p, p);
    for _ in 0..100_000 {
        let a = random_inner_message(&params, &mut rng);
        let b = random_inner_message(&params, &mut rng);
        let ca = book.inner().encode(&a).unwrap();
        let w = ca.count_ones();
        min_zero = min_zero.min(w);
        min_one = min_one.min(p - w);
        if !at_least_half_minus_eps(w, p) || !at_least_half_minus_eps(p - w, p) {
            violations += 1;
        }
        if a != b {
            let d = ca.hamming_distance(&book.inner().encode(&b).unwrap());
            min_pair = min_pair.min(d);
            if !at_least_half_minus_eps(d, p) {
                violations += 1;
            }
        }
    }
    let ok = reduced_ok && violations == 0;
    report(
        "2b",
        "inner distance",
        ok,
        &format!(
            "reduced exhaustive ({} words, p={p_r}): pair {} / to 0 {} / to 1 {}; full sampled 1e5 (p={p}): pair {min_pair} / to 0 {min_zero} / to 1 {min_one}; {violations} violations",
            table.len(),
            exact.pairwise,
            exact.to_zero,
            exact.to_one
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2c_three_codeword_overlap() {
    let params = derive_params(256, eps()).unwrap();
    let book = book(256);
    let p = params.p;
    let (a, d) = (*eps().numer() as u128, *eps().denom() as u128);
    let mut rng = ChaCha8Rng::seed_from_u64(0x2c);
    let mut worst = 0;
    let mut violations = 0;
    let mut triples = 0;
    while triples < 10_000 {
        let mut m: Vec<InnerMessage> = (0..3)
            .map(|_| random_inner_message(&params, &mut rng))
            .collect();
        // half the triples differ only in their index strings
        if triples % 2 == 1 {
            let seg = m[0].segment.clone();
            m[1].segment = seg.clone();
            m[2].segment = seg;
        }
        if m[0] == m[1] || m[0] == m[2] || m[1] == m[2] {
            continue;
        }
        triples += 1;
        let c: Vec<BitVector> = m.iter().map(|x| book.inner().encode(x).unwrap()).collect();
        let agree = (0..p)
            .filter(|&i| c[0].get(i) == c[1].get(i) && c[1].get(i) == c[2].get(i))
            .count();
        worst = worst.max(agree);
        // agree ≤ (1/4 + 3/2·ε)·p  ⇔  4·d·agree ≤ (d + 6a)·p
        if 4 * d * agree as u128 > (d + 6 * a) * p as u128 {
            violations += 1;
        }
    }
    let ok = violations == 0;
    report(
        "2c",
        "three-codeword overlap",
        ok,
        &format!("1e4 triples (half sharing a segment), max agreement {worst} of {p}, bound (1/4 + 3ε/2)p = {}", (d + 6 * a) * p as u128 / (4 * d)),
    );
    assert!(ok);
}

/// Erasure patterns for list-decoding trials: uniform, covering the
/// disagreement of two codewords, or of three.
fn adversarial_mask(
    kind: usize,
    truth: &BitVector,
    others: &[BitVector],
    cap: usize,
    rng: &mut impl Rng,
) -> BitVector {
    let len = truth.len();
    let target = rng.gen_range(0..=cap);
    let mut forced: Vec<usize> = match kind {
        1 => truth.xor(&others[0]).iter_ones().collect(),
        2 => truth
            .xor(&others[0])
            .iter_ones()
            .chain(truth.xor(&others[1]).iter_ones())
            .collect(),
        _ => Vec::new(),
    };
    forced.sort_unstable();
    forced.dedup();
    if forced.len() > cap {
        let keep = sample(rng, forced.len(), cap);
        return mask_of(len, keep.iter().map(|k| forced[k]));
    }
    let mut mask = mask_of(len, forced.iter().copied());
    let extra = target.saturating_sub(forced.len());
    let free: Vec<usize> = mask.not().iter_ones().collect();
    for k in sample(rng, free.len(), extra.min(free.len())).iter() {
        mask.set(free[k], true);
    }
    mask
}

#[test]
fn criterion_3_list_decoding_contract() {
    let params = derive_params(256, eps()).unwrap();
    let book = book(256);
    let inner = book.inner();
    let p = params.p;
    let cap = list_decoding_erasure_cap(p);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut largest_list = 0;
    for k in 0..10_000 {
        let truth_msg = random_inner_message(&params, &mut rng);
        let truth = inner.encode(&truth_msg).unwrap();
        let others: Vec<BitVector> = (0..2)
            .map(|_| {
                inner
                    .encode(&random_inner_message(&params, &mut rng))
                    .unwrap()
            })
            .collect();
        let mask = adversarial_mask(k % 3, &truth, &others, cap, &mut rng);
        let received = TriString::with_mask(&truth, &mask).unwrap();
        match inner.list_decode(&received) {
            Ok(InnerDecode::Candidates { list, malformed }) => {
                largest_list = largest_list.max(list.len() + malformed);
                if list.len() + malformed > 2
                    || !list.contains(&Candidate::Message(truth_msg.clone()))
                {
                    failures.push(format!(
                        "trial {k}: {} candidates, truth missing",
                        list.len()
                    ));
                }
            }
            other => failures.push(format!("trial {k}: {other:?}")),
        }
    }

    let reduced = reduced_inner_code(eps()).unwrap();
    let table = TinyCodeTable::of_inner(&reduced).unwrap();
    let layout = reduced.layout();
    let reduced_cap = list_decoding_erasure_cap(reduced.len());
    let mut disagreements = 0;
    for k in 0..1000 {
        let pick = |rng: &mut ChaCha8Rng| table.entries()[rng.gen_range(0..table.len())].1.clone();
        let truth = pick(&mut rng);
        let others = [pick(&mut rng), pick(&mut rng)];
        // a third of the masks go beyond the list-decoding radius, where the
        // comparison is against the raw solution set
        let over = k % 3 == 0;
        let mask = adversarial_mask(
            k % 3,
            &truth,
            &others,
            if over { reduced.len() } else { reduced_cap },
            &mut rng,
        );
        let received = TriString::with_mask(&truth, &mask).unwrap();
        let brute = table.brute_list_decode(&received);
        let fast: Vec<u64> = match reduced.list_decode(&received) {
            Ok(InnerDecode::Candidates { list, .. }) => list
                .iter()
                .filter_map(|c| match c {
                    Candidate::Message(m) => Some(layout.serialize(m).unwrap()),
                    Candidate::Const(_) => None,
                })
                .collect(),
            Err(_) => {
                disagreements += 1;
                continue;
            }
            Ok(InnerDecode::TooErased) => {
                let mut all: Vec<u64> = reduced
                    .consistent_words(&received, 1 << 12)
                    .unwrap()
                    .into_iter()
                    .filter(|&v| layout.deserialize(v).is_some())
                    .collect();
                all.sort_unstable();
                all
            }
        };
        let mut fast = fast;
        fast.sort_unstable();
        if fast != brute {
            disagreements += 1;
        }
    }
    let ok = failures.is_empty() && disagreements == 0;
    report(
        "3",
        "list-decoding contract",
        ok,
        &format!(
            "1e4 trials up to {cap}/{p} erased, largest list {largest_list}, {} failures; 1e3 reduced brute-force comparisons, {disagreements} disagreements",
            failures.len()
        ),
    );
    assert!(ok, "{:?}", &failures[..failures.len().min(5)]);
}

/// What the auditor found across a batch of transcripts.
#[derive(Default, Debug)]
struct AuditTally {
    transcripts: usize,
    replayed: usize,
    accounting_or_ledger: Vec<String>,
    prefix: Vec<String>,
    other: Vec<String>,
}

impl AuditTally {
    fn add(&mut self, t: &Transcript, book: &Arc<Codebook>, replay: bool) {
        let r = audit_transcript(t, book, replay).unwrap();
        self.transcripts += 1;
        self.replayed += replay as usize;
        for v in &r.violations {
            let line = format!("{} seed {}: {v}", t.header.strategy, t.header.seed);
            match v.check {
                AuditCheck::Accounting | AuditCheck::Ledger => self.accounting_or_ledger.push(line),
                AuditCheck::Prefix => self.prefix.push(line),
                _ => self.other.push(line),
            }
        }
    }
}

struct SuiteOutcome {
    rows: Vec<(String, usize, usize)>,
    seconds: f64,
    audit: AuditTally,
}

fn resilience_suite() -> &'static SuiteOutcome {
    static CELL: OnceLock<SuiteOutcome> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let book = book(256);
        let audit = Mutex::new(AuditTally::default());
        let mut rows = Vec::new();
        for spec in default_suite(book.params()) {
            let sink = |k: usize, t: &Transcript| {
                audit.lock().unwrap().add(t, &book, k == 0);
                Ok(())
            };
            let metrics = run_trials(&book, &spec, safe_fraction(), 100, 0x5117e, &sink).unwrap();
            rows.push((
                spec.label(),
                metrics.len(),
                metrics.iter().filter(|m| m.success).count(),
            ));
        }
        SuiteOutcome {
            rows,
            seconds: start.elapsed().as_secs_f64(),
            audit: audit.into_inner().unwrap(),
        }
    })
}

struct SearchOutcome {
    runs: usize,
    counterexamples: Vec<String>,
    seconds: f64,
    audit: AuditTally,
}

fn attack_search_outcome() -> &'static SearchOutcome {
    static CELL: OnceLock<SearchOutcome> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let book = book(64);
        let audit = Mutex::new(AuditTally::default());
        let seen = AtomicUsize::new(0);
        let inspect = |t: &Transcript| {
            let replay = seen.fetch_add(1, Ordering::Relaxed).is_multiple_of(100);
            audit.lock().unwrap().add(t, &book, replay);
        };
        let archive = std::env::temp_dir().join("iecc-counterexamples");
        let mut runs = 0;
        let mut counterexamples = Vec::new();
        // ten inputs, a thousand random adversaries each
        for k in 0..10u64 {
            let x = trial_input(64, 0xa77ac << 8 | k);
            match attack_search(&book, &x, safe_fraction(), 1000, k * 1000, &inspect).unwrap() {
                AttackOutcome::NoneFound { runs: r } => runs += r,
                AttackOutcome::Counterexample(t) => {
                    std::fs::create_dir_all(&archive).unwrap();
                    let path = archive.join(format!("input-{k}.jsonl"));
                    t.write_jsonl(std::fs::File::create(&path).unwrap())
                        .unwrap();
                    counterexamples.push(format!(
                        "{} archived at {}",
                        t.header.strategy,
                        path.display()
                    ));
                }
            }
        }
        SearchOutcome {
            runs,
            counterexamples,
            seconds: start.elapsed().as_secs_f64(),
            audit: audit.into_inner().unwrap(),
        }
    })
}

#[test]
fn criterion_4_resilience_suite() {
    let suite = resilience_suite();
    let failed: Vec<String> = suite
        .rows
        .iter()
        .filter(|(_, trials, ok)| ok != trials)
        .map(|(s, trials, ok)| format!("{s} {ok}/{trials}"))
        .collect();
    let total: usize = suite.rows.iter().map(|r| r.1).sum();
    let ok = failed.is_empty() && suite.rows.len() == 11 && total == 1100;
    report(
        "4",
        "resilience suite",
        ok,
        &format!(
            "n=256, fraction {}, {} strategies x 100 trials, {} failing strategies, {:.0}s",
            safe_fraction(),
            suite.rows.len(),
            failed.len(),
            suite.seconds
        ),
    );
    assert!(ok, "{failed:?}");
}

#[test]
fn criterion_5_attack_search() {
    let s = attack_search_outcome();
    let ok = s.counterexamples.is_empty() && s.runs >= 10_000;
    report(
        "5",
        "attack search",
        ok,
        &format!(
            "n=64, fraction {}, {} runs (1e4 random + suite per input), {} counterexamples, {:.0}s",
            safe_fraction(),
            s.runs,
            s.counterexamples.len(),
            s.seconds
        ),
    );
    assert!(ok, "{:?}", s.counterexamples);
}

#[test]
fn criterion_6_communication_linearity() {
    let mut ratios = Vec::new();
    for n in [64, 256, 1024] {
        let book = book(n);
        let x = trial_input(n, 6);
        let setup = RunSetup {
            seed: 6,
            strategy: "NoNoise".into(),
            budget_fraction: Rational::from_integer(0),
        };
        let t = run_protocol(&book, &x, &mut NoNoise, &setup).unwrap();
        let sent: usize = t
            .chunks
            .iter()
            .map(|c| c.alice_clean.len() + c.bob_clean.len())
            .sum();
        ratios.push((n, sent as f64 / n as f64));
    }
    let max = ratios.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let min = ratios.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let ok = max < 2.0 * min;
    let shown: Vec<String> = ratios
        .iter()
        .map(|(n, r)| format!("n={n}: {r:.0}"))
        .collect();
    report(
        "6",
        "communication linearity",
        ok,
        &format!("bits/n {}, spread {:.3}x", shown.join(", "), max / min),
    );
    assert!(ok);
}

#[test]
fn criterion_7_accounting_identity() {
    let suite = resilience_suite();
    let search = attack_search_outcome();
    let count = suite.audit.transcripts + search.audit.transcripts;
    let bad: Vec<&String> = suite
        .audit
        .accounting_or_ledger
        .iter()
        .chain(&search.audit.accounting_or_ledger)
        .chain(&suite.audit.other)
        .chain(&search.audit.other)
        .collect();
    let ok = bad.is_empty() && count > 0;
    report(
        "7",
        "accounting identity",
        ok,
        &format!(
            "{count} transcripts audited ({} replayed), totalBits = 11/8·p·T and ledger exact; {} violations",
            suite.audit.replayed + search.audit.replayed,
            bad.len()
        ),
    );
    assert!(ok, "{:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn criterion_8_prefix_invariant() {
    let suite = resilience_suite();
    let search = attack_search_outcome();
    let count = suite.audit.transcripts + search.audit.transcripts;
    let bad: Vec<&String> = suite
        .audit
        .prefix
        .iter()
        .chain(&search.audit.prefix)
        .collect();
    let ok = bad.is_empty() && count > 0;
    report(
        "8",
        "prefix invariant",
        ok,
        &format!(
            "{count} transcripts, every chunk before x̂ is set checked; {} violations",
            bad.len()
        ),
    );
    assert!(ok, "{:?}", &bad[..bad.len().min(5)]);
}

//! Interactive error correcting code over an adversarial erasure channel.
//!
//! Alice holds `x ∈ {0,1}^n` and talks to Bob over a fixed schedule of
//! chunks: a `p`-bit message from Alice followed by a `3p/8`-bit reply from
//! Bob. The adversary may erase any bits it likes within a global budget.
//! Bob narrows `x` down to two candidates by list decoding a concatenated
//! code, then steers Alice bit by bit towards an index where the candidates
//! differ; any message that gets through afterwards settles the question.
//!
//! Modules, bottom up:
//!
//! * [`gf2`]: packed bit vectors, matrices, `{0,1,⊥}` strings, the affine solver.
//! * [`codes`]: parameter derivation, the Reed–Solomon outer code, the inner
//!   coset code, the block code and Bob's four feedback words.
//! * [`protocol`]: Alice and Bob state machines, transcripts, the runner.
//! * [`adversary`]: erasure budgets and strategies.
//! * [`oracle`]: brute-force references and randomized attack search.
//! * [`harness`]: experiments, sweeps and transcript auditing.

pub mod adversary;
pub mod codes;
pub mod gf2;
pub mod harness;
pub mod oracle;
pub mod protocol;

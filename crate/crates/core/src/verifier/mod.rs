//! Bounded verification suites and case replays.
//!
//! Every suite returns a [`VerificationReport`]. Work is sharded by index over
//! a private rayon pool and merged in index order, so reports do not depend on
//! the schedule. The factorization budget applies to each number separately.

mod lemmas;
mod theorems;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ArithError, Factorization, Nat};
use crate::sequences::{pell_pair, term, SequenceKind};

pub use theorems::{EXPECTED_TABLE_1, EXPECTED_TABLE_2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Verified,
    Counterexample,
    Unresolved,
}

/// One data point in a report: a hit, a confirmation or a violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Index or index tuple, e.g. `[7]` or `[1, 7]`.
    pub index: Vec<u64>,
    /// Decimal value the witness is about.
    pub value: String,
    pub note: String,
    /// True when this witness contradicts the claim.
    #[serde(default)]
    pub violation: bool,
}

impl Witness {
    pub fn hit(index: Vec<u64>, value: impl ToString, note: impl Into<String>) -> Self {
        Witness {
            index,
            value: value.to_string(),
            note: note.into(),
            violation: false,
        }
    }

    pub fn violation(index: Vec<u64>, value: impl ToString, note: impl Into<String>) -> Self {
        Witness {
            violation: true,
            ..Witness::hit(index, value, note)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub description: String,
    pub computed: String,
    pub expected: String,
    pub matched: bool,
}

/// Machine-checked steps of a case analysis, each compared against the value
/// the written argument states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub steps: Vec<TraceStep>,
}

impl ProofTrace {
    pub fn passes(&self) -> bool {
        self.steps.iter().all(|s| s.matched)
    }

    pub(crate) fn step(
        &mut self,
        description: impl Into<String>,
        computed: impl ToString,
        expected: impl ToString,
        matched: bool,
    ) {
        self.steps.push(TraceStep {
            description: description.into(),
            computed: computed.to_string(),
            expected: expected.to_string(),
            matched,
        });
    }

    /// Records a step whose computed and expected values are compared by equality.
    pub(crate) fn compare<T: PartialEq + std::fmt::Display>(
        &mut self,
        description: impl Into<String>,
        computed: T,
        expected: T,
    ) {
        let matched = computed == expected;
        self.step(description, computed, expected, matched);
    }

    /// Mismatched steps as violation witnesses, indexed by step number.
    pub(crate) fn mismatch_witnesses(&self) -> Vec<Witness> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.matched)
            .map(|(i, s)| {
                Witness::violation(
                    vec![i as u64 + 1],
                    &s.computed,
                    format!("{}: expected {}", s.description, s.expected),
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub elapsed: Duration,
    pub budget: Duration,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub unresolved: Vec<u64>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<ProofTrace>,
    pub meta: ReportMeta,
}

impl VerificationReport {
    pub fn elapsed(&self) -> Duration {
        self.meta.elapsed
    }

    pub fn violations(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.violation)
    }

    /// Witness indices, for the common single-index case.
    pub fn witness_indices(&self) -> Vec<u64> {
        self.witnesses.iter().filter_map(|w| w.index.first().copied()).collect()
    }

    /// Combines several reports into one under a new claim id. The worst status
    /// wins (Counterexample over Unresolved over Verified).
    pub fn merge(claim_id: &str, parts: Vec<VerificationReport>) -> VerificationReport {
        let mut builder = ReportBuilder::new(claim_id, Duration::ZERO);
        let mut trace: Option<ProofTrace> = None;
        let mut elapsed = Duration::ZERO;
        for part in parts {
            builder.budget = builder.budget.max(part.meta.budget);
            elapsed += part.meta.elapsed;
            for (k, v) in part.params {
                builder.params.insert(format!("{}.{}", part.claim_id, k), v);
            }
            builder.witnesses.extend(part.witnesses.into_iter().map(|mut w| {
                w.note = format!("[{}] {}", part.claim_id, w.note);
                w
            }));
            builder.unresolved.extend(part.unresolved);
            builder
                .notes
                .extend(part.notes.into_iter().map(|n| format!("[{}] {}", part.claim_id, n)));
            builder.force_counterexample |= part.status == Status::Counterexample;
            if let Some(t) = part.trace {
                trace.get_or_insert_with(ProofTrace::default).steps.extend(t.steps);
            }
        }
        let mut report = builder.finish_with_trace(trace);
        report.meta.elapsed = elapsed;
        report
    }
}

/// Accumulates report contents and derives the status.
pub(crate) struct ReportBuilder {
    claim_id: String,
    started: Instant,
    budget: Duration,
    pub params: BTreeMap<String, String>,
    pub witnesses: Vec<Witness>,
    pub unresolved: Vec<u64>,
    pub notes: Vec<String>,
    force_counterexample: bool,
}

impl ReportBuilder {
    pub fn new(claim_id: &str, budget: Duration) -> Self {
        ReportBuilder {
            claim_id: claim_id.to_string(),
            started: Instant::now(),
            budget,
            params: BTreeMap::new(),
            witnesses: Vec::new(),
            unresolved: Vec::new(),
            notes: Vec::new(),
            force_counterexample: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn finish(self) -> VerificationReport {
        self.finish_with_trace(None)
    }

    pub fn finish_with_trace(mut self, trace: Option<ProofTrace>) -> VerificationReport {
        if let Some(t) = &trace {
            self.witnesses.extend(t.mismatch_witnesses());
        }
        self.witnesses
            .sort_by(|a, b| a.index.cmp(&b.index).then_with(|| a.note.cmp(&b.note)));
        self.unresolved.sort_unstable();
        self.unresolved.dedup();
        let status = if self.force_counterexample || self.witnesses.iter().any(|w| w.violation) {
            Status::Counterexample
        } else if !self.unresolved.is_empty() {
            Status::Unresolved
        } else {
            Status::Verified
        };
        VerificationReport {
            claim_id: self.claim_id,
            params: self.params,
            status,
            witnesses: self.witnesses,
            unresolved: self.unresolved,
            notes: self.notes,
            trace,
            meta: ReportMeta {
                elapsed: self.started.elapsed(),
                budget: self.budget,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }
}

/// Runs the verification suites with a per-number factorization budget and a
/// fixed number of worker threads.
#[derive(Clone)]
pub struct Verifier {
    budget: Duration,
    jobs: usize,
    pool: Arc<rayon::ThreadPool>,
}

impl std::fmt::Debug for Verifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Verifier")
            .field("budget", &self.budget)
            .field("jobs", &self.jobs)
            .finish()
    }
}

impl Default for Verifier {
    fn default() -> Self {
        let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        Verifier::new(arith::DEFAULT_BUDGET, jobs)
    }
}

impl Verifier {
    pub fn new(budget: Duration, jobs: usize) -> Self {
        let jobs = jobs.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("failed to build worker pool");
        Verifier {
            budget,
            jobs,
            pool: Arc::new(pool),
        }
    }

    pub fn budget(&self) -> Duration {
        self.budget
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    /// Maps `f` over an index range in parallel, returning results in index order.
    pub(crate) fn par_map<T, F>(&self, range: RangeInclusive<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        if range.is_empty() {
            return Vec::new();
        }
        self.pool.install(|| range.into_par_iter().map(f).collect())
    }

    pub(crate) fn builder(&self, claim_id: &str) -> ReportBuilder {
        ReportBuilder::new(claim_id, self.budget)
    }

    /// Factors the `n`-th term of `kind`, seeding the split with algebraic
    /// divisors: `P(d)` for `d | n`, `Q(d)` for `2d | n`, and `Q(d)` for
    /// `d | n` with `n/d` odd.
    pub fn factor_term(&self, kind: SequenceKind, n: u64) -> Factorization {
        let value = term(kind, n);
        if value.is_zero() {
            return arith::factorize(&value, self.budget);
        }
        let hints = term_hints(kind, n);
        arith::factorize_with_hints(&value, &hints, self.budget)
    }

    /// Primes dividing `u(n)` but no `u(i)` with `1 <= i < n`.
    pub fn primitive_factors(&self, kind: SequenceKind, n: u64) -> Result<Vec<Nat>, ArithError> {
        let f = self.factor_term(kind, n);
        if !f.is_complete() {
            return Err(ArithError::IncompleteFactorization(f.cofactor().clone()));
        }
        Ok(primitive_among(kind, n, f.primes()))
    }
}

/// Of the given primes dividing `u(n)`, those that divide no earlier positive-index term.
pub(crate) fn primitive_among<'a>(
    kind: SequenceKind,
    n: u64,
    primes: impl Iterator<Item = &'a Nat>,
) -> Vec<Nat> {
    primes
        .filter(|p| first_zero_index(kind, p, n).is_none())
        .cloned()
        .collect()
}

/// Smallest `1 <= i < below` with `p | u(i)`.
fn first_zero_index(kind: SequenceKind, p: &Nat, below: u64) -> Option<u64> {
    let (a, b) = kind.seeds();
    let mut prev = Nat::from(a) % p;
    let mut cur = Nat::from(b) % p;
    for i in 1..below {
        if cur.is_zero() {
            return Some(i);
        }
        let next = match kind {
            SequenceKind::Pell | SequenceKind::AssocPell => (&cur * 2u32 + &prev) % p,
            SequenceKind::Balancing => (&cur * 6u32 + p - &prev) % p,
        };
        prev = std::mem::replace(&mut cur, next);
    }
    None
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn term_hints(kind: SequenceKind, n: u64) -> Vec<Nat> {
    if n < 2 {
        return Vec::new();
    }
    let mut hints = Vec::new();
    let divs = divisors(n);
    let pell_hints = |hints: &mut Vec<Nat>| {
        for &d in divs.iter().filter(|&&d| d > 2 && d < n) {
            hints.push(pell_pair(d).p);
        }
        for &d in divs.iter().filter(|&&d| n.is_multiple_of(2 * d)) {
            hints.push(pell_pair(d).q);
        }
    };
    let assoc_hints = |hints: &mut Vec<Nat>| {
        for &d in divs.iter().filter(|&&d| d > 1 && d < n && (n / d) % 2 == 1) {
            hints.push(pell_pair(d).q);
        }
    };
    match kind {
        SequenceKind::Pell => pell_hints(&mut hints),
        SequenceKind::AssocPell => assoc_hints(&mut hints),
        SequenceKind::Balancing => {
            let pair = pell_pair(n);
            hints.push(pair.p);
            hints.push(pair.q);
            pell_hints(&mut hints);
            assoc_hints(&mut hints);
        }
    }
    hints
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Verifier {
        Verifier::new(Duration::from_secs(10), 2)
    }

    #[test]
    fn primitive_examples() {
        let v = quick();
        assert_eq!(v.primitive_factors(SequenceKind::Pell, 7).unwrap(), vec![Nat::from(13u32)]);
        assert_eq!(v.primitive_factors(SequenceKind::Pell, 3).unwrap(), vec![Nat::from(5u32)]);
        assert_eq!(
            v.primitive_factors(SequenceKind::AssocPell, 2).unwrap(),
            vec![Nat::from(3u32)]
        );
        // P(6) = 70 = 2 * 5 * 7: 2 | P(2), 5 | P(3)
        assert_eq!(v.primitive_factors(SequenceKind::Pell, 6).unwrap(), vec![Nat::from(7u32)]);
    }

    #[test]
    fn hinted_factorization_of_large_terms() {
        let v = quick();
        for (kind, n) in [
            (SequenceKind::Pell, 118),
            (SequenceKind::Pell, 94),
            (SequenceKind::AssocPell, 94),
            (SequenceKind::AssocPell, 97),
        ] {
            let f = v.factor_term(kind, n);
            assert!(f.is_complete(), "{kind} {n}: {f}");
            assert_eq!(f.value(), term(kind, n));
        }
    }

    #[test]
    fn merge_takes_worst_status() {
        let v = quick();
        let mut ok = v.builder("a");
        ok.witnesses.push(Witness::hit(vec![1], 1, "fine"));
        let mut bad = v.builder("b");
        bad.unresolved.push(9);
        let merged = VerificationReport::merge("ab", vec![ok.finish(), bad.finish()]);
        assert_eq!(merged.status, Status::Unresolved);
        assert_eq!(merged.unresolved, vec![9]);
        assert_eq!(merged.witnesses[0].note, "[a] fine");
    }

    #[test]
    fn divisor_list() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }
}

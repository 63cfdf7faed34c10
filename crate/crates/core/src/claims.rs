//! Stable claim ids mapped onto verifier runs with default desk bounds.

use crate::sequences::SequenceKind;
use crate::verifier::{
    VerificationReport, Verifier, EXPECTED_TABLE_1, EXPECTED_TABLE_2,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClaimError {
    #[error("unknown claim id `{0}`")]
    Unknown(String),
    #[error("claim `{0}` has no case replay")]
    NoReplay(String),
}

pub struct Claim {
    pub id: &'static str,
    pub summary: &'static str,
    /// Default `max_n` (or sieve limit); `None` when the claim takes no bound.
    pub default_max_n: Option<u64>,
}

pub const CLAIMS: &[Claim] = &[
    Claim { id: "lemma-2.1", summary: "Pell and associated Pell identities", default_max_n: Some(400) },
    Claim { id: "lemma-2.2", summary: "P(n) perfect powers", default_max_n: Some(200) },
    Claim { id: "lemma-2.3", summary: "P(m) P(n) squares", default_max_n: Some(60) },
    Claim { id: "lemma-2.4", summary: "Q(n) perfect powers", default_max_n: Some(200) },
    Claim { id: "lemma-2.5", summary: "Q(m) Q(n) squares", default_max_n: Some(60) },
    Claim { id: "lemma-2.6", summary: "P(n) = 4 p^m", default_max_n: Some(120) },
    Claim { id: "lemma-2.7", summary: "primitive prime factors are +-1 (mod n)", default_max_n: Some(100) },
    Claim { id: "lemma-2.8", summary: "primitive prime factors exist", default_max_n: Some(100) },
    Claim { id: "lemma-2.9", summary: "P(n) has a prime factor 1 (mod 4)", default_max_n: Some(120) },
    Claim { id: "lemma-2.10", summary: "prime Q(n) has prime or power-of-two index", default_max_n: Some(100) },
    Claim { id: "lemma-2.11", summary: "3 phi(n)^2 >= 4n", default_max_n: Some(1_000_000) },
    Claim { id: "theorem-3.1", summary: "phi(P(n)) is never a repdigit of length >= 2", default_max_n: Some(60) },
    Claim { id: "eq-3.3", summary: "9 P(n) - 1 is never 8 * 10^m", default_max_n: Some(500) },
    Claim { id: "table-1", summary: "periods of P(n) mod 11, 20, 40", default_max_n: None },
    Claim { id: "theorem-4.1", summary: "phi(Q(n)) repdigits", default_max_n: Some(60) },
    Claim { id: "theorem-4.2", summary: "associated Pell prime factor structure", default_max_n: Some(80) },
    Claim { id: "theorem-4.3", summary: "associated Pell prime factor structure", default_max_n: Some(80) },
    Claim { id: "theorem-4.4", summary: "associated Pell prime factor structure", default_max_n: Some(80) },
    Claim { id: "table-2", summary: "periods of Q(n) mod 4, 5, 8, 20", default_max_n: None },
    Claim { id: "remark-balancing", summary: "P(2n) = 2 B(n); odd-index balancing totients", default_max_n: Some(30) },
];

/// Claims with a step-by-step case replay.
pub const REPLAYS: &[&str] = &["theorem-3.1", "eq-3.3"];

#[derive(Debug, Clone, Copy, Default)]
pub struct Bounds {
    pub max_n: Option<u64>,
    pub min_m: Option<u32>,
}

pub fn lookup(id: &str) -> Result<&'static Claim, ClaimError> {
    CLAIMS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| ClaimError::Unknown(id.to_string()))
}

fn renamed(mut r: VerificationReport, id: &str) -> VerificationReport {
    r.claim_id = id.to_string();
    r
}

/// Runs the bounded verification for a claim.
pub fn run_claim(v: &Verifier, id: &str, bounds: Bounds) -> Result<VerificationReport, ClaimError> {
    use SequenceKind::*;
    let claim = lookup(id)?;
    let n = bounds.max_n.or(claim.default_max_n).unwrap_or(0);
    let report = match id {
        "lemma-2.1" => v.verify_identities(n),
        "lemma-2.2" => v.search_perfect_powers(Pell, n),
        "lemma-2.3" => v.search_product_squares(Pell, n),
        "lemma-2.4" => v.search_perfect_powers(AssocPell, n),
        "lemma-2.5" => v.search_product_squares(AssocPell, n),
        "lemma-2.6" => v.search_4pm(n),
        "lemma-2.7" | "lemma-2.8" => VerificationReport::merge(
            id,
            vec![
                v.verify_primitive_congruence(Pell, n),
                v.verify_primitive_congruence(AssocPell, n),
            ],
        ),
        "lemma-2.9" => v.verify_1mod4_factor(n),
        "lemma-2.10" => v.verify_prime_index_structure(n),
        "lemma-2.11" => v.verify_totient_bound(n),
        "theorem-3.1" => v.search_repdigit_totients(Pell, n, bounds.min_m.unwrap_or(2)),
        "eq-3.3" => v.verify_eq33(n),
        "table-1" => v.verify_table(id, Pell, &EXPECTED_TABLE_1),
        "table-2" => v.verify_table(id, AssocPell, &EXPECTED_TABLE_2),
        "theorem-4.1" => v.search_repdigit_totients(AssocPell, n, bounds.min_m.unwrap_or(1)),
        "theorem-4.2" | "theorem-4.3" | "theorem-4.4" => v.verify_section4_structure(n),
        "remark-balancing" => v.verify_balancing_remark(n),
        _ => unreachable!("registry and dispatch disagree on {id}"),
    };
    Ok(renamed(report, id))
}

/// Runs the case replay for a claim, as a report carrying the trace.
pub fn replay(v: &Verifier, id: &str, bounds: Bounds) -> Result<VerificationReport, ClaimError> {
    match id {
        "theorem-3.1" => {
            let trace = v.replay_theorem31_cases();
            Ok(v.builder(id).finish_with_trace(Some(trace)))
        }
        "eq-3.3" => run_claim(v, id, bounds),
        other => {
            lookup(other)?;
            Err(ClaimError::NoReplay(other.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::verifier::Status;

    #[test]
    fn every_claim_dispatches() {
        let v = Verifier::new(Duration::from_secs(5), 2);
        for c in CLAIMS {
            let bounds = Bounds {
                max_n: c.default_max_n.map(|_| if c.id == "lemma-2.11" { 100 } else { 12 }),
                min_m: None,
            };
            let r = run_claim(&v, c.id, bounds).unwrap();
            assert_eq!(r.claim_id, c.id);
        }
    }

    #[test]
    fn unknown_and_replay_errors() {
        let v = Verifier::new(Duration::from_secs(5), 1);
        assert_eq!(
            run_claim(&v, "lemma-9.9", Bounds::default()).unwrap_err(),
            ClaimError::Unknown("lemma-9.9".into())
        );
        assert_eq!(
            replay(&v, "lemma-2.2", Bounds::default()).unwrap_err(),
            ClaimError::NoReplay("lemma-2.2".into())
        );
        let r = replay(&v, "theorem-3.1", Bounds::default()).unwrap();
        assert_eq!(r.status, Status::Counterexample);
        assert!(r.trace.is_some());
    }
}

//! Pell, associated Pell and balancing numbers.
//!
//! `P(n+1) = 2P(n) + P(n-1)` with `P(0)=0, P(1)=1`; `Q` has the same
//! recurrence from `Q(0)=Q(1)=1`; balancing numbers follow
//! `B(n+1) = 6B(n) - B(n-1)` from `B(0)=0, B(1)=1`, so that `P(2n) = 2B(n)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Nat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Pell,
    AssocPell,
    Balancing,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [
        SequenceKind::Pell,
        SequenceKind::AssocPell,
        SequenceKind::Balancing,
    ];

    pub fn seeds(self) -> (u64, u64) {
        match self {
            SequenceKind::Pell | SequenceKind::Balancing => (0, 1),
            SequenceKind::AssocPell => (1, 1),
        }
    }

    /// One recurrence step on residues mod `k`: `(u(n-1), u(n)) -> u(n+1)`.
    pub fn step_mod(self, prev: u64, cur: u64, k: u64) -> u64 {
        let (prev, cur) = (prev as u128, cur as u128);
        let k128 = k as u128;
        let next = match self {
            SequenceKind::Pell | SequenceKind::AssocPell => (2 * cur + prev) % k128,
            SequenceKind::Balancing => (6 * cur + k128 - prev % k128) % k128,
        };
        next as u64
    }

    fn step(self, prev: &Nat, cur: &Nat) -> Nat {
        match self {
            SequenceKind::Pell | SequenceKind::AssocPell => cur * 2u32 + prev,
            SequenceKind::Balancing => cur * 6u32 - prev,
        }
    }

    /// Short symbol used in reports (`P`, `Q`, `B`).
    pub fn symbol(self) -> &'static str {
        match self {
            SequenceKind::Pell => "P",
            SequenceKind::AssocPell => "Q",
            SequenceKind::Balancing => "B",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceKind::Pell => "pell",
            SequenceKind::AssocPell => "assoc-pell",
            SequenceKind::Balancing => "balancing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sequence kind `{0}` (expected pell, assoc-pell or balancing)")]
pub struct UnknownKind(pub String);

impl FromStr for SequenceKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pell" | "p" => Ok(SequenceKind::Pell),
            "assoc-pell" | "assocpell" | "associated-pell" | "pell-lucas" | "q" => {
                Ok(SequenceKind::AssocPell)
            }
            "balancing" | "b" => Ok(SequenceKind::Balancing),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

/// `(P(n), Q(n))` at a given index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellPair {
    pub index: u64,
    pub p: Nat,
    pub q: Nat,
}

/// Computes `(P(n), Q(n))` by binary index doubling:
/// `P(2k) = 2P(k)Q(k)`, `Q(2k) = Q(k)^2 + 2P(k)^2`, and the step
/// `P(k+1) = P(k) + Q(k)`, `Q(k+1) = 2P(k) + Q(k)`.
pub fn pell_pair(n: u64) -> PellPair {
    let mut p = Nat::zero();
    let mut q = Nat::one();
    let mut k = 0u64;
    for bit in (0..u64::BITS - n.leading_zeros()).rev() {
        let q_sq = &q * &q;
        let two_p_sq = (&p * &p) << 1u32;
        let p2 = (&p * &q) << 1u32;
        let q2 = &q_sq + &two_p_sq;
        // Q(2k) = 2Q(k)^2 - (-1)^k must agree with the doubling form
        let twice_q_sq = &q_sq << 1u32;
        let alt = if k.is_multiple_of(2) {
            twice_q_sq - 1u32
        } else {
            twice_q_sq + 1u32
        };
        assert_eq!(q2, alt, "Q doubling identities disagree at index {}", 2 * k);
        p = p2;
        q = q2;
        k *= 2;
        if (n >> bit) & 1 == 1 {
            let next_p = &p + &q;
            let next_q = (&p << 1u32) + &q;
            p = next_p;
            q = next_q;
            k += 1;
        }
    }
    debug_assert_eq!(k, n);
    PellPair { index: n, p, q }
}

/// The `n`-th term. Pell and associated Pell use index doubling; balancing
/// numbers use `B(n) = P(n)Q(n)`.
pub fn term(kind: SequenceKind, n: u64) -> Nat {
    let pair = pell_pair(n);
    match kind {
        SequenceKind::Pell => pair.p,
        SequenceKind::AssocPell => pair.q,
        SequenceKind::Balancing => pair.p * pair.q,
    }
}

/// The `n`-th term by plain linear recurrence.
pub fn term_by_recurrence(kind: SequenceKind, n: u64) -> Nat {
    let (a, b) = kind.seeds();
    let (mut prev, mut cur) = (Nat::from(a), Nat::from(b));
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = kind.step(&prev, &cur);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Terms `0..=n_max` by linear recurrence.
pub fn terms_upto(kind: SequenceKind, n_max: u64) -> Vec<Nat> {
    let (a, b) = kind.seeds();
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(Nat::from(a));
    if n_max >= 1 {
        out.push(Nat::from(b));
    }
    for i in 2..=n_max as usize {
        let next = kind.step(&out[i - 2], &out[i - 1]);
        out.push(next);
    }
    out
}

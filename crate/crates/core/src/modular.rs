//! Period tables of sequences modulo k, residue preimages, square sets and
//! polynomial square filters.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::Nat;
use crate::sequences::SequenceKind;

pub const MAX_TABLE_MODULUS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("modulus {0} out of range")]
    Modulus(u64),
    #[error("residue {residue} is not below modulus {modulus}")]
    Residue { residue: u64, modulus: u64 },
    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: i64, modulus: u64 },
}

/// Least residues of one full period of a sequence modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodTable {
    pub kind: SequenceKind,
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub period: usize,
}

impl PeriodTable {
    /// `u(n) mod k`, read off the cycle.
    pub fn residue_at(&self, n: u64) -> u64 {
        self.residues[(n % self.period as u64) as usize]
    }
}

/// Sorted set of least residues modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    pub modulus: u64,
    pub members: BTreeSet<u64>,
}

impl ResidueSet {
    pub fn new(modulus: u64, members: impl IntoIterator<Item = u64>) -> Self {
        ResidueSet {
            modulus,
            members: members.into_iter().map(|r| r % modulus).collect(),
        }
    }

    pub fn contains(&self, r: u64) -> bool {
        self.members.contains(&r)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(u64::to_string).collect();
        write!(f, "{{{}}} (mod {})", items.join(", "), self.modulus)
    }
}

/// Computes the pure period of `kind` modulo `k` by iterating the
/// consecutive-pair state until it returns to the seed pair.
pub fn period_table(kind: SequenceKind, k: u64) -> Result<PeriodTable, ModularError> {
    if !(2..=MAX_TABLE_MODULUS).contains(&k) {
        return Err(ModularError::Modulus(k));
    }
    let (a, b) = kind.seeds();
    let start = (a % k, b % k);
    let (mut prev, mut cur) = start;
    let mut residues = Vec::new();
    // The recurrence matrices have unit determinant, so the orbit is a pure
    // cycle of length at most k^2.
    let limit = k * k;
    loop {
        residues.push(prev);
        let next = kind.step_mod(prev, cur, k);
        prev = cur;
        cur = next;
        if (prev, cur) == start {
            break;
        }
        assert!(
            (residues.len() as u64) <= limit,
            "no return to the seed pair modulo {k}"
        );
    }
    let period = residues.len();
    Ok(PeriodTable {
        kind,
        modulus: k,
        residues,
        period,
    })
}

/// Indices `n mod period` with `u(n) = r (mod k)`.
pub fn residue_preimages(kind: SequenceKind, k: u64, r: u64) -> Result<ResidueSet, ModularError> {
    if r >= k {
        return Err(ModularError::Residue {
            residue: r,
            modulus: k,
        });
    }
    let table = period_table(kind, k)?;
    Ok(preimages_in(&table, r))
}

/// Preimages of `r` within an already computed table.
pub fn preimages_in(table: &PeriodTable, r: u64) -> ResidueSet {
    ResidueSet::new(
        table.period as u64,
        table
            .residues
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == r)
            .map(|(i, _)| i as u64),
    )
}

/// `{x^2 mod k}`, zero included.
pub fn qr_set(k: u64) -> Result<ResidueSet, ModularError> {
    if k < 2 {
        return Err(ModularError::Modulus(k));
    }
    Ok(ResidueSet::new(
        k,
        (0..k).map(|x| ((x as u128 * x as u128) % k as u128) as u64),
    ))
}

fn reduce_signed(c: i64, k: u64) -> u64 {
    c.rem_euclid(k as i64) as u64
}

/// Evaluates a polynomial (highest degree first, signed coefficients) at `x` mod `k`.
pub fn eval_poly_mod(coeffs: &[i64], x: u64, k: u64) -> u64 {
    let k128 = k as u128;
    coeffs.iter().fold(0u128, |acc, &c| {
        (acc * (x % k) as u128 + reduce_signed(c, k) as u128) % k128
    }) as u64
}

/// Residues `r` for which `poly(r) mod k` is a square modulo `k`.
pub fn poly_qr_filter(coeffs: &[i64], k: u64) -> Result<ResidueSet, ModularError> {
    let squares = qr_set(k)?;
    Ok(ResidueSet::new(
        k,
        (0..k).filter(|&r| squares.contains(eval_poly_mod(coeffs, r, k))),
    ))
}

/// The eventual cycle of `base^m mod k` for `m >= 1`.
pub fn power_residue_set(base: &Nat, k: u64) -> Result<ResidueSet, ModularError> {
    if k < 2 {
        return Err(ModularError::Modulus(k));
    }
    let b = (base % k).to_u64().expect("reduced below k") as u128;
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut x = b % k as u128;
    loop {
        let v = x as u64;
        if let Some(&first) = seen.get(&v) {
            return Ok(ResidueSet::new(k, order[first..].iter().copied()));
        }
        seen.insert(v, order.len());
        order.push(v);
        x = (x * b) % k as u128;
    }
}

/// Inverse of `a` modulo `k` via the extended Euclidean algorithm.
pub fn mod_inverse(a: i64, k: u64) -> Result<u64, ModularError> {
    let m = k as i128;
    let (mut old_r, mut r) = (reduce_signed(a, k) as i128, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(ModularError::NotInvertible { value: a, modulus: k });
    }
    Ok(old_s.rem_euclid(m) as u64)
}

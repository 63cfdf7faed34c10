//! Exact arbitrary-precision arithmetic: primality, factorization, totients,
//! 2-adic valuations, integer roots and the Jacobi symbol.

mod factor;
mod mont;
mod prime;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use prime::{
    is_prime_u64, primality, small_primes, Primality, DETERMINISTIC_BOUND, TRIAL_BOUND,
};

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// Default per-number factorization budget.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("factorization incomplete: cofactor {0} is composite and unfactored")]
    IncompleteFactorization(Nat),
}

/// Prime factorization, possibly partial.
///
/// `product(p^e) * cofactor` always equals the factored number; the cofactor
/// is 1 exactly when the factorization is complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(Nat, u32)>,
    cofactor: Nat,
}

impl Factorization {
    pub(crate) fn from_parts(primes: BTreeMap<Nat, u32>, cofactor: Nat) -> Self {
        Factorization {
            factors: primes.into_iter().filter(|(_, e)| *e > 0).collect(),
            cofactor,
        }
    }

    /// Prime powers in strictly increasing prime order.
    pub fn factors(&self) -> &[(Nat, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &Nat> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn cofactor(&self) -> &Nat {
        &self.cofactor
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// The number this factorization describes.
    pub fn value(&self) -> Nat {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// True when some listed prime lies above the deterministic primality range.
    pub fn has_probable_primes(&self) -> bool {
        let bound = Nat::from(DETERMINISTIC_BOUND);
        self.primes().any(|p| *p >= bound)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        if !self.cofactor.is_one() {
            parts.push(format!("[{}]", self.cofactor));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}

pub fn is_prime(n: &Nat) -> bool {
    primality(n).is_prime()
}

/// Factors `n` within `budget` wall-clock time.
///
/// Pipeline: trial division below [`TRIAL_BOUND`], strong probable-prime
/// screening, then Brent rho with fresh polynomial offsets and a p-1 pass.
/// When the budget runs out the remaining composite part is left as cofactor.
pub fn factorize(n: &Nat, budget: Duration) -> Factorization {
    factor::factorize_until(n, Instant::now() + budget)
}

/// Like [`factorize`], but first splits `n` by gcds with known related
/// numbers (for sequence terms: earlier terms that must share factors).
pub fn factorize_with_hints(n: &Nat, hints: &[Nat], budget: Duration) -> Factorization {
    let deadline = Instant::now() + budget;
    if n.is_zero() {
        return factor::factorize_until(n, deadline);
    }
    let mut primes: BTreeMap<Nat, u32> = BTreeMap::new();
    let mut cofactor = Nat::one();
    for part in factor::split_by_hints(n, hints) {
        let f = factor::factorize_until(&part, deadline);
        for (p, e) in f.factors {
            *primes.entry(p).or_insert(0) += e;
        }
        cofactor *= f.cofactor;
    }
    Factorization::from_parts(primes, cofactor)
}

/// Euler's totient from a complete factorization.
pub fn totient(f: &Factorization) -> Result<Nat, ArithError> {
    if !f.is_complete() {
        return Err(ArithError::IncompleteFactorization(f.cofactor.clone()));
    }
    Ok(f.factors.iter().fold(Nat::one(), |acc, (p, e)| {
        acc * p.pow(e - 1) * (p - 1u32)
    }))
}

/// Exponent of 2 in `n`.
pub fn v2(n: &Nat) -> Result<u64, ArithError> {
    n.trailing_zeros()
        .ok_or(ArithError::Domain("v2 is undefined at 0"))
}

fn jacobi_core(mut a: Nat, mut n: Nat) -> i8 {
    let mut sign = 1i8;
    a %= &n;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n % 8u32).to_u32().unwrap_or(0);
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == Nat::from(3u32) && (&n % 4u32) == Nat::from(3u32) {
            sign = -sign;
        }
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Jacobi symbol `(a / n)` for odd `n >= 3`.
pub fn jacobi(a: &Nat, n: &Nat) -> Result<i8, ArithError> {
    if n.is_even() || n <= &Nat::one() {
        return Err(ArithError::Domain("jacobi needs an odd modulus >= 3"));
    }
    Ok(jacobi_core(a.clone(), n.clone()))
}

/// Jacobi symbol with a signed numerator.
pub(crate) fn jacobi_i64(a: i64, n: &Nat) -> i8 {
    let abs = Nat::from(a.unsigned_abs()) % n;
    let reduced = if a < 0 && !abs.is_zero() { n - abs } else { abs };
    jacobi_core(reduced, n.clone())
}

/// `(floor(sqrt(n)), n is a perfect square)`.
pub fn isqrt(n: &Nat) -> (Nat, bool) {
    let root = n.sqrt();
    let exact = &root * &root == *n;
    (root, exact)
}

/// Writes `n = base^exp` with `exp >= 2` maximal, if possible.
///
/// Scans prime exponents up to `log2 n` with exact integer roots and composes
/// the hits. `1` is reported as `(1, 2)`; `0` has no answer.
pub fn perfect_power(n: &Nat) -> Option<(Nat, u32)> {
    if n.is_zero() {
        return None;
    }
    if n.is_one() {
        return Some((Nat::one(), 2));
    }
    let mut base = n.clone();
    let mut exp = 1u32;
    'compose: loop {
        let bits = base.bits();
        for &p in small_primes() {
            if p as u64 >= bits {
                break;
            }
            let root = base.nth_root(p);
            if root.pow(p) == base {
                base = root;
                exp *= p;
                continue 'compose;
            }
        }
        break;
    }
    (exp >= 2).then_some((base, exp))
}

/// Totients of `0..=limit` by a multiplicative sieve (`phi[0] = 0`).
pub fn totient_sieve(limit: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = (0..=limit as u32).collect();
    for i in 2..=limit {
        if phi[i] == i as u32 {
            let mut j = i;
            while j <= limit {
                phi[j] -= phi[j] / i as u32;
                j += i;
            }
        }
    }
    phi
}

//! Primality testing.
//!
//! Below [`DETERMINISTIC_BOUND`] a strong probable-prime test with the first
//! thirteen prime bases is exact. Above it we run 64 pseudo-random bases plus a
//! strong Lucas test (Selfridge parameters), so a composite slipping through is
//! far below 2^-128 for any input, and the answer is tagged as probable.

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{jacobi_i64, Nat};

/// Trial division bound of the factorization pipeline.
pub const TRIAL_BOUND: u32 = 100_000;

/// Strong pseudoprime tests to bases 2..=41 are exact below this value
/// (3 317 044 064 679 887 385 961 981).
pub const DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_ROUNDS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Primality {
    Composite,
    /// Certified by a deterministic witness set.
    Prime,
    /// Passed the strong probable-prime battery above the deterministic range.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// Primes below [`TRIAL_BOUND`].
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_BOUND))
}

pub(crate) fn sieve_primes(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[inline]
fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod64(acc, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic primality for 64-bit values.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &WITNESSES[..12] {
        let mut x = powmod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, base: &BigUint, d: &BigUint, s: u64) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = base.modpow(d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Classifies `n` as composite, prime or probable prime.
pub fn primality(n: &Nat) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    if n.is_even() {
        return Primality::Composite;
    }
    for &p in &small_primes()[..200] {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> s;

    let deterministic = n.to_u128().is_some_and(|v| v < DETERMINISTIC_BOUND);
    for &a in &WITNESSES {
        if !strong_probable_prime(n, &BigUint::from(a), &d, s) {
            return Primality::Composite;
        }
    }
    if deterministic {
        return Primality::Prime;
    }

    // Seeded from the candidate so the verdict is a pure function of n.
    let mut seed = [0u8; 32];
    for (slot, byte) in seed.iter_mut().zip(n.to_bytes_le()) {
        *slot = byte;
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    let upper = n - 2u32;
    for _ in 0..RANDOM_ROUNDS {
        let a = rng.gen_biguint_range(&BigUint::from(2u32), &upper);
        if !strong_probable_prime(n, &a, &d, s) {
            return Primality::Composite;
        }
    }
    if !strong_lucas_probable_prime(n) {
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

/// Halves `x` modulo odd `n`.
fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_even() {
        x >> 1u32
    } else {
        (x + n) >> 1u32
    }
}

fn signed_mod(v: i64, n: &BigUint) -> BigUint {
    if v >= 0 {
        BigUint::from(v as u64) % n
    } else {
        let r = BigUint::from(v.unsigned_abs()) % n;
        if r.is_zero() {
            r
        } else {
            n - r
        }
    }
}

/// Strong Lucas probable-prime test with Selfridge's method A parameters.
/// `n` must be odd, greater than 2^64 and free of small factors.
pub(crate) fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    if super::isqrt(n).1 {
        return false;
    }
    let mut d_val: i64 = 5;
    loop {
        match jacobi_i64(d_val, n) {
            -1 => break,
            0 => {
                // gcd(|D|, n) > 1; n is large so this exposes a factor
                return false;
            }
            _ => {}
        }
        d_val = if d_val > 0 { -(d_val + 2) } else { -d_val + 2 };
    }
    let p: i64 = 1;
    let q: i64 = (1 - d_val) / 4;

    let d_mod = signed_mod(d_val, n);
    let q_mod = signed_mod(q, n);
    let p_mod = signed_mod(p, n);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().expect("n + 1 > 0");
    let k = &n_plus_1 >> s;

    // U_1 = 1, V_1 = P, Q^1
    let mut u = BigUint::one();
    let mut v = p_mod.clone();
    let mut qk = q_mod.clone();
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        // doubling
        u = (&u * &v) % n;
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        qk = (&qk * &qk) % n;
        if k.bit(i) {
            let u_next = half_mod((&p_mod * &u + &v) % n, n);
            let v_next = half_mod((&d_mod * &u + &p_mod * &v) % n, n);
            u = u_next;
            v = v_next;
            qk = (&qk * &q_mod) % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk) % n;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_counts() {
        assert_eq!(small_primes().len(), 9592);
        assert_eq!(sieve_primes(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn u64_agrees_with_sieve() {
        let primes: std::collections::HashSet<u32> = sieve_primes(20_000).into_iter().collect();
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), primes.contains(&(n as u32)), "n={n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 1373653, 25326001, 3215031751, 3825123056546413051] {
            assert!(!is_prime_u64(n), "{n}");
        }
        assert!(is_prime_u64(18446744073709551557));
    }

    #[test]
    fn large_values() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert_eq!(primality(&m127), Primality::ProbablePrime);
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert_eq!(primality(&m89), Primality::ProbablePrime);
        let m61 = (BigUint::one() << 61u32) - 1u32;
        assert_eq!(primality(&m61), Primality::Prime);
        // (2^61-1)(2^89-1)
        assert_eq!(primality(&(&m61 * &m89)), Primality::Composite);
        // 2^67 - 1 = 193707721 * 761838257287
        let m67 = (BigUint::one() << 67u32) - 1u32;
        assert_eq!(primality(&m67), Primality::Composite);
        // 80-bit prime inside the deterministic window
        let p80 = (BigUint::one() << 80u32) - 65u32;
        assert_eq!(primality(&p80), Primality::Prime);
    }

    #[test]
    fn lucas_on_known_values() {
        let m107 = (BigUint::one() << 107u32) - 1u32;
        assert!(strong_lucas_probable_prime(&m107));
        let composite = ((BigUint::one() << 89u32) - 1u32) * 1_000_003u32;
        assert!(!strong_lucas_probable_prime(&composite));
        // square of a prime is rejected up front
        let sq = ((BigUint::one() << 61u32) - 1u32).pow(2);
        assert!(!strong_lucas_probable_prime(&sq));
    }
}

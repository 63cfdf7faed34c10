//! Integer factorization: trial division, Brent's variant of Pollard rho and a
//! two-stage Pollard p-1, all bounded by a wall-clock deadline.
//!
//! Cofactors below 2^127 run in Montgomery form over `u128`; larger ones fall
//! back to `BigUint` remainders. Whatever is still composite when the deadline
//! passes is returned as the unfactored cofactor.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::mont::{gcd_u128, Mont128};
use super::prime::{primality, sieve_primes, small_primes, TRIAL_BOUND};
use super::{perfect_power, Factorization, Nat};

const PM1_B1: u64 = 100_000;
const PM1_B2: u32 = 10_000_000;
const RHO_BLOCK: u64 = 128;

fn stage2_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(PM1_B2 + 1))
}

/// Arithmetic modulo the number being split.
trait Ring {
    type E: Clone;
    fn one(&self) -> Self::E;
    fn embed(&self, v: u64) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn pow(&self, a: &Self::E, e: u64) -> Self::E;
    /// gcd of the represented residue with the modulus.
    fn gcd_n(&self, a: &Self::E) -> Nat;
    fn modulus(&self) -> Nat;
}

impl Ring for Mont128 {
    type E = u128;
    fn one(&self) -> u128 {
        Mont128::one(self)
    }
    fn embed(&self, v: u64) -> u128 {
        self.enter(v as u128)
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        Mont128::mul(self, *a, *b)
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        Mont128::add(self, *a, *b)
    }
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        Mont128::sub(self, *a, *b)
    }
    fn pow(&self, a: &u128, e: u64) -> u128 {
        Mont128::pow(self, *a, e)
    }
    fn gcd_n(&self, a: &u128) -> Nat {
        // x*R and x share the same gcd with n since R is a power of two
        Nat::from(gcd_u128(*a, self.modulus()))
    }
    fn modulus(&self) -> Nat {
        Nat::from(Mont128::modulus(self))
    }
}

struct BigMod(BigUint);

impl Ring for BigMod {
    type E = BigUint;
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn embed(&self, v: u64) -> BigUint {
        BigUint::from(v) % &self.0
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.0
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.0 {
            s - &self.0
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.0 - (b - a)
        }
    }
    fn pow(&self, a: &BigUint, e: u64) -> BigUint {
        a.modpow(&BigUint::from(e), &self.0)
    }
    fn gcd_n(&self, a: &BigUint) -> Nat {
        a.gcd(&self.0)
    }
    fn modulus(&self) -> Nat {
        self.0.clone()
    }
}

fn nontrivial(g: Nat, n: &Nat) -> Option<Nat> {
    (!g.is_one() && &g != n && !g.is_zero()).then_some(g)
}

/// Brent's cycle-finding rho with `x -> x^2 + c`, batching `RHO_BLOCK`
/// differences per gcd and backtracking when a batch collapses to `n`.
fn rho<R: Ring>(ring: &R, c: u64, max_iters: u64, deadline: Instant) -> Option<Nat> {
    let n = ring.modulus();
    let c = ring.embed(c);
    let f = |x: &R::E| ring.add(&ring.mul(x, x), &c);

    let mut y = ring.embed(2);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = ring.one();
    let mut g = Nat::one();
    let mut r: u64 = 1;
    let mut iters: u64 = 0;

    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        iters += r;
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let block = RHO_BLOCK.min(r - k);
            for _ in 0..block {
                y = f(&y);
                q = ring.mul(&q, &ring.sub(&x, &y));
            }
            g = ring.gcd_n(&q);
            k += block;
            iters += block;
            if Instant::now() >= deadline {
                return None;
            }
        }
        r *= 2;
        if g.is_one() && iters > max_iters {
            return None;
        }
    }
    if g == n {
        // the batch overshot; replay it one step at a time
        loop {
            ys = f(&ys);
            g = ring.gcd_n(&ring.sub(&x, &ys));
            if !g.is_one() {
                break;
            }
        }
    }
    nontrivial(g, &n)
}

/// Prime powers `p^k <= PM1_B1`, one per prime, ascending by prime.
fn stage1_powers() -> &'static [(u64, u64)] {
    static POWERS: OnceLock<Vec<(u64, u64)>> = OnceLock::new();
    POWERS.get_or_init(|| {
        small_primes()
            .iter()
            .map(|&p| p as u64)
            .take_while(|&p| p <= PM1_B1)
            .map(|p| {
                let mut pk = p;
                while pk * p <= PM1_B1 {
                    pk *= p;
                }
                (p, pk)
            })
            .collect()
    })
}

enum Descent<E> {
    Found(Nat),
    /// Index of the prime power at which every factor reached 1 together,
    /// and the value just before it was applied.
    Leaf(usize, E),
}

/// Binary search for the first prefix of `units` after which `x` becomes 1
/// modulo some prime factor. Requires `x^(prod units) = 1 (mod n)`.
fn descend<R: Ring>(ring: &R, x: R::E, units: &[(u64, u64)], offset: usize) -> Descent<R::E> {
    if units.len() == 1 {
        return Descent::Leaf(offset, x);
    }
    let (left, right) = units.split_at(units.len() / 2);
    let y = left.iter().fold(x.clone(), |acc, &(_, pk)| ring.pow(&acc, pk));
    let g = ring.gcd_n(&ring.sub(&y, &ring.one()));
    let n = ring.modulus();
    if g.is_one() {
        descend(ring, y, right, offset + left.len())
    } else if g == n {
        descend(ring, x, left, offset)
    } else {
        Descent::Found(g)
    }
}

/// Separates the factors of `n` when `x^(prod of stage-1 powers) = 1` modulo
/// all of them at once. Each pass finds the prime power at which they
/// collide, tries it one prime at a time, then moves it in front and repeats,
/// until the remaining exponents reach the primes where the factors differ.
fn pm1_separate<R: Ring>(ring: &R, mut x: R::E, deadline: Instant) -> Option<Nat> {
    let one = ring.one();
    let n = ring.modulus();
    let mut units: Vec<(u64, u64)> = stage1_powers().to_vec();
    while !units.is_empty() && Instant::now() < deadline {
        let g = ring.gcd_n(&ring.sub(&x, &one));
        if let Some(f) = nontrivial(g.clone(), &n) {
            return Some(f);
        }
        if g == n {
            return None;
        }
        let (idx, before) = match descend(ring, x.clone(), &units, 0) {
            Descent::Found(g) => return nontrivial(g, &n),
            Descent::Leaf(idx, before) => (idx, before),
        };
        let (p, pk) = units[idx];
        let mut z = before;
        let mut q = 1;
        while q < pk {
            z = ring.pow(&z, p);
            q *= p;
            let g = ring.gcd_n(&ring.sub(&z, &one));
            if let Some(f) = nontrivial(g.clone(), &n) {
                return Some(f);
            }
            if g == n {
                break;
            }
        }
        x = ring.pow(&x, pk);
        units.remove(idx);
    }
    None
}

/// Pollard p-1 with stage-1 bound `PM1_B1` and prime-by-prime stage 2 up to `PM1_B2`.
fn pm1<R: Ring>(ring: &R, deadline: Instant) -> Option<Nat> {
    let n = ring.modulus();
    let base = ring.embed(2);
    let mut a = base.clone();
    for (i, &(_, pk)) in stage1_powers().iter().enumerate() {
        a = ring.pow(&a, pk);
        if i % 512 == 0 && Instant::now() >= deadline {
            return None;
        }
    }
    let one = ring.one();
    let g = ring.gcd_n(&ring.sub(&a, &one));
    if let Some(f) = nontrivial(g.clone(), &n) {
        return Some(f);
    }
    if g == n {
        return pm1_separate(ring, base, deadline);
    }

    // Stage 2: a^q for each prime q in (B1, B2], stepping by prime gaps.
    const BATCH: usize = 4096;
    let primes = stage2_primes();
    let start = primes.partition_point(|&q| (q as u64) <= PM1_B1);
    if start >= primes.len() {
        return None;
    }
    let mut gap_powers: Vec<Option<R::E>> = vec![None; 256];
    let mut step = |gap: usize| match gap_powers.get(gap) {
        Some(Some(s)) => s.clone(),
        _ => {
            let s = ring.pow(&a, gap as u64);
            if gap < gap_powers.len() {
                gap_powers[gap] = Some(s.clone());
            }
            s
        }
    };
    let mut b = ring.pow(&a, primes[start] as u64);
    let mut batch_start = (start, b.clone());
    let mut acc = ring.sub(&b, &one);
    for i in start + 1..=primes.len() {
        let batch_done = (i - start) % BATCH == 0 || i == primes.len();
        if batch_done {
            let g = ring.gcd_n(&acc);
            if let Some(f) = nontrivial(g.clone(), &n) {
                return Some(f);
            }
            if g == n {
                // replay the batch prime by prime to find the colliding prime
                let (j0, mut bj) = batch_start;
                for j in j0..i {
                    if j > j0 {
                        bj = ring.mul(&bj, &step((primes[j] - primes[j - 1]) as usize));
                    }
                    let g = ring.gcd_n(&ring.sub(&bj, &one));
                    if let Some(f) = nontrivial(g.clone(), &n) {
                        return Some(f);
                    }
                    if g == n {
                        let x = ring.pow(&base, primes[j] as u64);
                        return pm1_separate(ring, x, deadline);
                    }
                }
                return None;
            }
            if Instant::now() >= deadline || i == primes.len() {
                return None;
            }
        }
        let q = primes[i];
        b = ring.mul(&b, &step((q - primes[i - 1]) as usize));
        if batch_done {
            batch_start = (i, b.clone());
        }
        acc = ring.mul(&acc, &ring.sub(&b, &one));
    }
    None
}

fn split_with<R: Ring>(ring: &R, deadline: Instant) -> Option<Nat> {
    let mut c = 1u64;
    for iters in [1u64 << 16, 1 << 18] {
        if let Some(f) = rho(ring, c, iters, deadline) {
            return Some(f);
        }
        c += 1;
    }
    if let Some(f) = pm1(ring, deadline) {
        return Some(f);
    }
    let mut iters = 1u64 << 20;
    while Instant::now() < deadline {
        if let Some(f) = rho(ring, c, iters, deadline) {
            return Some(f);
        }
        c += 1;
        iters = (iters * 4).min(1 << 32);
    }
    None
}

/// Finds a nontrivial factor of an odd composite `n` with no small prime factors.
pub(crate) fn find_factor(n: &Nat, deadline: Instant) -> Option<Nat> {
    if n.bits() <= Mont128::MAX_BITS {
        let ring = Mont128::new(n.to_u128().expect("fits in 127 bits"));
        split_with(&ring, deadline)
    } else {
        split_with(&BigMod(n.clone()), deadline)
    }
}

/// Divides out every prime below the trial bound. Returns the prime powers
/// found and the remaining cofactor.
fn trial_divide(n: &Nat) -> (Vec<(u64, u32)>, Nat) {
    let mut found = Vec::new();
    if let Some(mut m) = n.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > m {
                break;
            }
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                found.push((p, e));
            }
        }
        return (found, Nat::from(m));
    }
    let mut m = n.clone();
    for &p in small_primes() {
        if m.bits() <= 64 {
            let (rest, rem) = trial_divide(&m);
            found.extend(rest.into_iter().filter(|&(q, _)| q >= p as u64));
            return (found, rem);
        }
        if (&m % p).is_zero() {
            let mut e = 0;
            loop {
                let (quot, rem) = m.div_rem(&BigUint::from(p));
                if !rem.is_zero() {
                    break;
                }
                m = quot;
                e += 1;
            }
            found.push((p as u64, e));
        }
    }
    (found, m)
}

pub(crate) fn factorize_until(n: &Nat, deadline: Instant) -> Factorization {
    if n.is_zero() {
        return Factorization::from_parts(BTreeMap::new(), Nat::zero());
    }
    let (small, rest) = trial_divide(n);
    let mut primes: BTreeMap<Nat, u32> = small
        .into_iter()
        .map(|(p, e)| (Nat::from(p), e))
        .collect();
    let mut leftover = Nat::one();

    let trial_sq = Nat::from(TRIAL_BOUND as u64 * TRIAL_BOUND as u64);
    let mut stack = Vec::new();
    if rest < trial_sq {
        if !rest.is_one() {
            *primes.entry(rest).or_insert(0) += 1;
        }
    } else {
        stack.push((rest, 1u32));
    }

    while let Some((c, mult)) = stack.pop() {
        if c < trial_sq || primality(&c).is_prime() {
            *primes.entry(c).or_insert(0) += mult;
            continue;
        }
        if let Some((base, e)) = perfect_power(&c) {
            stack.push((base, mult * e));
            continue;
        }
        match find_factor(&c, deadline) {
            Some(d) => {
                let other = &c / &d;
                stack.push((d, mult));
                stack.push((other, mult));
            }
            None => leftover *= c.pow(mult),
        }
    }
    Factorization::from_parts(primes, leftover)
}

/// Splits `n` into coprime-ish pieces using gcds against `hints`.
pub(crate) fn split_by_hints(n: &Nat, hints: &[Nat]) -> Vec<Nat> {
    let mut parts = vec![n.clone()];
    let mut changed = true;
    while changed {
        changed = false;
        for h in hints {
            if h.is_zero() || h.is_one() {
                continue;
            }
            let mut next = Vec::with_capacity(parts.len() + 1);
            for x in parts.drain(..) {
                let g = x.gcd(h);
                if !g.is_one() && g != x {
                    next.push(&x / &g);
                    next.push(g);
                    changed = true;
                } else {
                    next.push(x);
                }
            }
            parts = next;
        }
    }
    parts.retain(|p| !p.is_one());
    parts
}

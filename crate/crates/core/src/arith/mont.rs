//! Montgomery arithmetic modulo an odd modulus below 2^127, with R = 2^128.
//!
//! Elements stay in Montgomery form (`x * R mod n`) for the whole computation.
//! Products are 256-bit and reduced with REDC; the bound `n < 2^127` keeps the
//! intermediate sum `hi + mh + carry` below `2n < 2^128`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mont128 {
    n: u128,
    /// -n^{-1} mod 2^128
    neg_inv: u128,
    /// R^2 mod n
    r2: u128,
}

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_lo, a_hi) = (a & MASK, a >> 64);
    let (b_lo, b_hi) = (b & MASK, b >> 64);

    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;

    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

impl Mont128 {
    pub(crate) const MAX_BITS: u64 = 127;

    pub(crate) fn new(n: u128) -> Self {
        assert!(n & 1 == 1 && n >> 127 == 0 && n > 1);
        // Newton iteration for n^{-1} mod 2^128: n*n = 1 mod 8 seeds 3 correct bits.
        let mut inv = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r2 = {
            let big = (BigUint::from(1u8) << 256u32) % BigUint::from(n);
            big.to_u128().expect("reduced below n")
        };
        Mont128 {
            n,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    pub(crate) fn modulus(&self) -> u128 {
        self.n
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    #[inline]
    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        // a, b < n < 2^127 so the sum cannot overflow
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + (self.n - b)
        }
    }

    pub(crate) fn enter(&self, x: u128) -> u128 {
        self.mul(x % self.n, self.r2)
    }

    #[cfg(test)]
    pub(crate) fn leave(&self, x: u128) -> u128 {
        self.redc(0, x)
    }

    pub(crate) fn one(&self) -> u128 {
        self.enter(1)
    }

    pub(crate) fn pow(&self, base: u128, mut exp: u64) -> u128 {
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mulmod_ref(a: u128, b: u128, n: u128) -> u128 {
        ((BigUint::from(a) * BigUint::from(b)) % BigUint::from(n))
            .to_u128()
            .unwrap()
    }

    #[test]
    fn mul_matches_bigint() {
        let moduli = [
            3u128,
            1_000_000_007,
            (1u128 << 127) - 1,
            170_141_183_460_469_231_731_687_303_715_884_105_703,
            2448769 * 1409,
        ];
        for &n in &moduli {
            let m = Mont128::new(n);
            for &(a, b) in &[(0u128, 5u128), (1, 1), (n - 1, n - 1), (12345, n / 3), (n / 2, n / 7)] {
                let (a, b) = (a % n, b % n);
                let got = m.leave(m.mul(m.enter(a), m.enter(b)));
                assert_eq!(got, mulmod_ref(a, b, n), "n={n} a={a} b={b}");
            }
        }
    }

    #[test]
    fn pow_fermat() {
        let p = 2305843009213693951u128; // 2^61 - 1
        let m = Mont128::new(p);
        let x = m.enter(3);
        assert_eq!(m.leave(m.pow(x, (p - 1) as u64)), 1);
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd_u128(0, 7), 7);
        assert_eq!(gcd_u128(12, 18), 6);
        assert_eq!(gcd_u128(257 * 1409, 1409 * 3), 1409);
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use pellphi_core::arith::{factorize, is_prime, isqrt, perfect_power, totient, v2};
use pellphi_core::modular::{period_table, poly_qr_filter, qr_set};
use pellphi_core::repdigit::{as_repdigit, repdigit_value};
use pellphi_core::sequences::{pell_pair, term, term_by_recurrence};
use pellphi_core::{Nat, RepdigitForm, SequenceKind};

fn kind() -> impl Strategy<Value = SequenceKind> {
    prop_oneof![
        Just(SequenceKind::Pell),
        Just(SequenceKind::AssocPell),
        Just(SequenceKind::Balancing)
    ]
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn totient_matches_coprime_count() {
    for n in 1..=10_000u64 {
        let f = factorize(&Nat::from(n), Duration::from_secs(1));
        let count = (1..=n).filter(|&k| gcd(k, n) == 1).count();
        assert_eq!(totient(&f).unwrap(), Nat::from(count), "n={n}");
    }
}

#[test]
fn perfect_power_matches_exhaustive_table() {
    const LIMIT: u64 = 1_000_000;
    // largest exponent for every perfect power up to LIMIT
    let mut best: BTreeMap<u64, (u64, u32)> = BTreeMap::new();
    for y in 2..=1000u64 {
        let mut v = y * y;
        let mut m = 2;
        while v <= LIMIT {
            let e = best.entry(v).or_insert((y, m));
            if m > e.1 {
                *e = (y, m);
            }
            v *= y;
            m += 1;
        }
    }
    for n in 2..=LIMIT {
        let got = perfect_power(&Nat::from(n)).map(|(b, e)| (b.to_u64().unwrap(), e));
        assert_eq!(got, best.get(&n).copied(), "n={n}");
    }
    assert_eq!(perfect_power(&Nat::one()), Some((Nat::one(), 2)));
}

#[test]
fn repdigit_forms_round_trip() {
    let mut values = BTreeSet::new();
    for m in 1..=40 {
        for d in 1..=9 {
            let f = RepdigitForm::new(d, m).unwrap();
            let v = repdigit_value(f);
            assert_eq!(as_repdigit(&v), Some(f));
            assert!(values.insert(v), "value repeated for {f}");
        }
    }
}

#[test]
fn qr_filter_matches_exhaustive_squares() {
    // the two discriminant polynomials, evaluated independently
    let squares: BTreeSet<i64> = (0..11).map(|x: i64| x * x % 11).collect();
    for (coeffs, expect) in [([3i64, -1, 1], poly_qr_filter(&[3, -1, 1], 11)), ([3, 2, 5], poly_qr_filter(&[3, 2, 5], 11))] {
        let scan: BTreeSet<u64> = (0..11i64)
            .filter(|&x| squares.contains(&(coeffs[0] * x * x + coeffs[1] * x + coeffs[2]).rem_euclid(11)))
            .map(|x| x as u64)
            .collect();
        assert_eq!(expect.unwrap().members, scan);
    }
    assert_eq!(qr_set(11).unwrap().members, squares.iter().map(|&s| s as u64).collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decimal_round_trip(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let n = BigUint::from_bytes_le(&bytes);
        prop_assert_eq!(n.to_string().parse::<Nat>().unwrap(), n);
    }

    #[test]
    fn isqrt_brackets(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let n = BigUint::from_bytes_le(&bytes);
        let (r, exact) = isqrt(&n);
        prop_assert!(&r * &r <= n);
        let r1 = &r + 1u32;
        prop_assert!(&r1 * &r1 > n);
        prop_assert_eq!(exact, &r * &r == n);
    }

    #[test]
    fn factorization_invariants(parts in proptest::collection::vec(2u64..5_000_000, 1..5)) {
        let n: Nat = parts.iter().map(|&p| Nat::from(p)).product();
        let f = factorize(&n, Duration::from_secs(10));
        prop_assert!(f.is_complete());
        prop_assert_eq!(f.value(), n.clone());
        let primes: Vec<&Nat> = f.primes().collect();
        prop_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(f.factors().iter().all(|(p, e)| *e >= 1 && is_prime(p)));
    }

    #[test]
    fn factorization_of_two_large_primes(i in 0usize..6, j in 0usize..6) {
        let primes = [
            1_000_000_007u64,
            998_244_353,
            2_305_843_009_213_693_951,
            4_294_967_291,
            1_099_511_627_791,
            67_280_421_310_721,
        ];
        let n = Nat::from(primes[i]) * Nat::from(primes[j]);
        let f = factorize(&n, Duration::from_secs(10));
        prop_assert!(f.is_complete());
        prop_assert_eq!(f.value(), n);
    }

    #[test]
    fn doubling_agrees_with_recurrence(n in 0u64..3000) {
        let pair = pell_pair(n);
        prop_assert_eq!(&pair.p, &term_by_recurrence(SequenceKind::Pell, n));
        prop_assert_eq!(&pair.q, &term_by_recurrence(SequenceKind::AssocPell, n));
        let lhs = &pair.q * &pair.q;
        let rhs = Nat::from(2u32) * &pair.p * &pair.p;
        if n % 2 == 0 { prop_assert_eq!(lhs, rhs + 1u32); } else { prop_assert_eq!(lhs + 1u32, rhs); }
    }

    #[test]
    fn balancing_is_half_even_pell(n in 0u64..1500) {
        prop_assert_eq!(pell_pair(2 * n).p, term(SequenceKind::Balancing, n) * 2u32);
    }

    #[test]
    fn table_residue_matches_term(kind in kind(), k in 2u64..2000, n in 0u64..4000) {
        let t = period_table(kind, k).unwrap();
        prop_assert_eq!(t.residues.len(), t.period);
        prop_assert_eq!(Nat::from(t.residue_at(n)), term(kind, n) % k);
    }

    #[test]
    fn repdigit_valuation_is_digit_valuation(d in 1u8..=9, m in 1u32..60) {
        let v = repdigit_value(RepdigitForm::new(d, m).unwrap());
        prop_assert_eq!(v2(&v).unwrap(), d.trailing_zeros() as u64);
    }

    #[test]
    fn non_repdigits_rejected(n in 0u64..u64::MAX) {
        let s = n.to_string();
        let uniform = n > 0 && s.bytes().all(|b| b == s.as_bytes()[0]);
        prop_assert_eq!(as_repdigit(&Nat::from(n)).is_some(), uniform);
        if let Some(f) = as_repdigit(&Nat::from(n)) {
            prop_assert_eq!(f.len() as usize, s.len());
        }
        prop_assert!(as_repdigit(&Nat::zero()).is_none());
    }
}

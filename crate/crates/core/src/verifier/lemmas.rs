//! Identity, Diophantine-search and prime-factor suites over bounded index ranges.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{primitive_among, VerificationReport, Verifier, Witness};
use crate::arith::{self, is_prime, isqrt, perfect_power, primality, totient_sieve, Nat, Primality};
use crate::sequences::{term, terms_upto, SequenceKind};

const ONE_MOD_4_EXCEPTIONS: [u64; 5] = [0, 1, 2, 4, 14];
const TOTIENT_BOUND_EXCEPTIONS: [u64; 3] = [1, 2, 6];

fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// `(m, n)` is in the `n = 3m`, `m` odd, `3 ∤ m` family.
pub(crate) fn in_triple_family(m: u64, n: u64) -> bool {
    n == 3 * m && m % 2 == 1 && !m.is_multiple_of(3)
}

/// The family of index pairs a product-square search is compared against.
pub(crate) fn product_square_family(kind: SequenceKind, m: u64, n: u64) -> bool {
    match kind {
        SequenceKind::Pell => (m, n) == (1, 7) || in_triple_family(m, n),
        SequenceKind::AssocPell => in_triple_family(m, n),
        SequenceKind::Balancing => false,
    }
}

impl Verifier {
    /// Checks the nine Pell/associated-Pell identities for indices up to `n_max`.
    pub fn verify_identities(&self, n_max: u64) -> VerificationReport {
        let p = terms_upto(SequenceKind::Pell, 2 * n_max);
        let q = terms_upto(SequenceKind::AssocPell, 2 * n_max);
        self.verify_identities_on(&p, &q, n_max)
    }

    /// The identity suite over caller-supplied term lists, indexed from 0.
    /// Identities needing `P(2n)` are checked only while `2n` is in range.
    pub fn verify_identities_on(&self, p: &[Nat], q: &[Nat], n_max: u64) -> VerificationReport {
        let mut rb = self.builder("lemma-2.1");
        rb.param("max_n", n_max);
        let len = p.len().min(q.len()) as u64;
        let top = n_max.min(len.saturating_sub(1));
        let three = Nat::from(3u32);

        let per_n = self.par_map(1..=top, |n| {
            let i = n as usize;
            let (pn, qn) = (&p[i], &q[i]);
            let mut bad = Vec::new();
            if 2 * n < len && p[2 * i] != Nat::from(2u32) * pn * qn {
                bad.push(Witness::violation(vec![n], &p[2 * i], "(1) P(2n) = 2 P(n) Q(n)"));
            }
            let lhs = qn * qn;
            let rhs = Nat::from(2u32) * pn * pn;
            let expect_plus = n % 2 == 0;
            let ok = if expect_plus {
                lhs == rhs + 1u32
            } else {
                lhs + 1u32 == rhs
            };
            if !ok {
                bad.push(Witness::violation(vec![n], qn, "(2) Q(n)^2 - 2 P(n)^2 = (-1)^n"));
            }
            if !pn.gcd(qn).is_one() {
                bad.push(Witness::violation(vec![n], pn.gcd(qn), "(3) gcd(P(n), Q(n)) = 1"));
            }
            for m in 1..=n {
                let (pm, qm) = (&p[m as usize], &q[m as usize]);
                let p_div = !pm.is_zero() && (pn % pm).is_zero();
                if p_div != (n % m == 0) {
                    bad.push(Witness::violation(vec![m, n], pn, "(4) P(m) | P(n) iff m | n"));
                }
                if m >= 2 {
                    let q_div = !qm.is_zero() && (qn % qm).is_zero();
                    if q_div != (n % m == 0 && (n / m) % 2 == 1) {
                        bad.push(Witness::violation(
                            vec![m, n],
                            qn,
                            "(5) Q(m) | Q(n) iff m | n with n/m odd",
                        ));
                    }
                }
            }
            let v2_ok = !pn.is_zero() && arith::v2(pn).ok() == Some(n.trailing_zeros() as u64);
            if !v2_ok {
                bad.push(Witness::violation(vec![n], pn, "(6) v2(P(n)) = v2(n)"));
            }
            if qn.is_even() {
                bad.push(Witness::violation(vec![n], qn, "(6) Q(n) odd"));
            }
            if (qn % &three).is_zero() != (n % 4 == 2) {
                bad.push(Witness::violation(vec![n], qn, "(7) 3 | Q(n) iff n = 2 (mod 4)"));
            }
            if (qn % 5u32).is_zero() {
                bad.push(Witness::violation(vec![n], qn, "(8) 5 does not divide Q(n)"));
            }
            bad
        });
        rb.witnesses.extend(per_n.into_iter().flatten());

        let mut t = 1u32;
        while 3u64 << t <= top {
            let a = &q[1usize << t];
            let b = &q[3usize << t];
            let rhs = a * (Nat::from(4u32) * a * a - 3u32);
            if *b != rhs {
                rb.witnesses.push(Witness::violation(
                    vec![3u64 << t],
                    b,
                    format!("(9) Q(3*2^{t}) = Q(2^{t}) (4 Q(2^{t})^2 - 3)"),
                ));
            }
            t += 1;
        }
        rb.note("(5) is checked for m >= 2 since Q(1) = 1 divides every term");
        rb.note(format!(
            "(9) is checked for 1 <= t <= {}; at t = 0 the identity reads Q(3) = 1",
            t - 1
        ));
        rb.finish()
    }

    /// Indices `2 <= n <= n_max` where the term is a perfect power.
    pub fn search_perfect_powers(&self, kind: SequenceKind, n_max: u64) -> VerificationReport {
        let mut rb = self.builder(match kind {
            SequenceKind::Pell => "lemma-2.2",
            SequenceKind::AssocPell => "lemma-2.4",
            SequenceKind::Balancing => "perfect-powers-balancing",
        });
        rb.param("kind", kind).param("max_n", n_max);
        let hits = self.par_map(2..=n_max, |n| {
            let v = term(kind, n);
            perfect_power(&v).map(|(base, e)| (n, v, base, e))
        });
        for (n, v, base, e) in hits.into_iter().flatten() {
            let expected = kind == SequenceKind::Pell && n == 7;
            let note = format!("{base}^{e}");
            rb.witnesses.push(if expected {
                Witness::hit(vec![n], v, note)
            } else {
                Witness::violation(vec![n], v, note)
            });
        }
        rb.finish()
    }

    /// Pairs `m < n <= n_max` whose term product is a perfect square.
    ///
    /// Pairs with product 1 are reported but flagged trivial. Every other hit
    /// must lie in the lemma families; family members that are not squares are
    /// listed in the notes.
    pub fn search_product_squares(&self, kind: SequenceKind, n_max: u64) -> VerificationReport {
        let mut rb = self.builder(match kind {
            SequenceKind::Pell => "lemma-2.3",
            SequenceKind::AssocPell => "lemma-2.5",
            SequenceKind::Balancing => "product-squares-balancing",
        });
        rb.param("kind", kind).param("max_n", n_max);
        let seq = terms_upto(kind, n_max);
        let m_min = match kind {
            SequenceKind::AssocPell => 0,
            _ => 1,
        };
        let per_n = self.par_map(m_min + 1..=n_max, |n| {
            (m_min..n)
                .filter_map(|m| {
                    let prod = &seq[m as usize] * &seq[n as usize];
                    let (root, exact) = isqrt(&prod);
                    exact.then_some((m, n, prod, root))
                })
                .collect::<Vec<_>>()
        });
        let mut found = BTreeSet::new();
        for (m, n, prod, root) in per_n.into_iter().flatten() {
            found.insert((m, n));
            let w = if prod.is_one() {
                Witness::hit(vec![m, n], prod, "trivial: unit product")
            } else if product_square_family(kind, m, n) {
                Witness::hit(vec![m, n], prod, format!("{root}^2"))
            } else {
                Witness::violation(vec![m, n], prod, format!("{root}^2 outside the family"))
            };
            rb.witnesses.push(w);
        }
        let missing: Vec<String> = (m_min..=n_max)
            .flat_map(|m| (m + 1..=n_max).map(move |n| (m, n)))
            .filter(|&(m, n)| product_square_family(kind, m, n) && !found.contains(&(m, n)))
            .map(|(m, n)| format!("({m},{n})"))
            .collect();
        if !missing.is_empty() {
            rb.note(format!(
                "{} family pairs are not squares: {}",
                missing.len(),
                missing.join(" ")
            ));
        }
        rb.finish()
    }

    /// Indices with `P(n) = 4 p^m` for an odd prime `p` and `m >= 1`.
    pub fn search_4pm(&self, n_max: u64) -> VerificationReport {
        let mut rb = self.builder("lemma-2.6");
        rb.param("max_n", n_max);
        let hits = self.par_map(1..=n_max, |n| {
            let v = term(SequenceKind::Pell, n);
            if !(&v % 4u32).is_zero() {
                return None;
            }
            let x: Nat = &v >> 2u32;
            if x.is_even() || x.is_one() {
                return None;
            }
            let (base, e) = match perfect_power(&x) {
                Some((b, e)) if is_prime(&b) => (b, e),
                Some(_) => return None,
                None if is_prime(&x) => (x, 1),
                None => return None,
            };
            Some(Witness {
                index: vec![n],
                value: v.to_string(),
                note: format!("4 * {base}^{e}"),
                violation: n != 4,
            })
        });
        rb.witnesses.extend(hits.into_iter().flatten());
        if n_max >= 4 && !rb.witnesses.iter().any(|w| w.index == [4]) {
            rb.witnesses.push(Witness::violation(vec![4], 12, "expected 4 * 3^1 not found"));
        }
        rb.finish()
    }

    /// Every index in range has a primitive prime factor and each one is
    /// `±1 (mod n)`. Pell starts at 3, associated Pell and balancing at 2 and 3.
    pub fn verify_primitive_congruence(&self, kind: SequenceKind, n_max: u64) -> VerificationReport {
        let mut rb = self.builder(match kind {
            SequenceKind::AssocPell => "lemma-2.8",
            _ => "lemma-2.7",
        });
        rb.param("kind", kind).param("max_n", n_max);
        let start = match kind {
            SequenceKind::AssocPell => 2,
            _ => 3,
        };
        let results = self.par_map(start..=n_max, |n| {
            let f = self.factor_term(kind, n);
            let prim = primitive_among(kind, n, f.primes());
            (n, f.is_complete(), prim)
        });
        for (n, complete, prim) in results {
            let bad: Vec<&Nat> = prim
                .iter()
                .filter(|p| {
                    let r = (*p % n).to_u64().expect("reduced below n");
                    r != 1 && r != n - 1
                })
                .collect();
            let listed = prim.iter().map(Nat::to_string).collect::<Vec<_>>().join(", ");
            if !bad.is_empty() {
                let bad = bad.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
                rb.witnesses
                    .push(Witness::violation(vec![n], bad, format!("not +-1 (mod {n})")));
            } else if !complete {
                rb.unresolved.push(n);
            } else if prim.is_empty() {
                rb.witnesses
                    .push(Witness::violation(vec![n], term(kind, n), "no primitive prime factor"));
            } else {
                rb.witnesses
                    .push(Witness::hit(vec![n], listed, format!("primitive, +-1 (mod {n})")));
            }
        }
        rb.finish()
    }

    /// Each `P(n)` outside the exception list has a prime factor `= 1 (mod 4)`.
    pub fn verify_1mod4_factor(&self, n_max: u64) -> VerificationReport {
        let mut rb = self.builder("lemma-2.9");
        rb.param("max_n", n_max);
        let found = self.par_map(0..=n_max, |n| {
            if n == 0 {
                return (n, None, true);
            }
            let f = self.factor_term(SequenceKind::Pell, n);
            let p = f.primes().find(|p| (*p % 4u32) == Nat::one()).cloned();
            (n, p, f.is_complete())
        });
        for (n, p, complete) in found {
            let excepted = ONE_MOD_4_EXCEPTIONS.contains(&n);
            match (excepted, p) {
                (true, Some(p)) => rb.note(format!(
                    "n={n} is listed as an exception but P({n}) = {} has {p} = 1 (mod 4)",
                    self.factor_term(SequenceKind::Pell, n)
                )),
                (true, None) => {}
                (false, Some(p)) => rb
                    .witnesses
                    .push(Witness::hit(vec![n], p, "prime factor = 1 (mod 4)")),
                (false, None) if complete => rb.witnesses.push(Witness::violation(
                    vec![n],
                    term(SequenceKind::Pell, n),
                    "no prime factor = 1 (mod 4)",
                )),
                (false, None) => rb.unresolved.push(n),
            }
        }
        rb.finish()
    }

    /// If `Q(n)` is prime then `n` is prime or a power of two.
    pub fn verify_prime_index_structure(&self, n_max: u64) -> VerificationReport {
        let mut rb = self.builder("lemma-2.10");
        rb.param("max_n", n_max);
        let hits = self.par_map(0..=n_max, |n| {
            let q = term(SequenceKind::AssocPell, n);
            match primality(&q) {
                Primality::Composite => None,
                kind => Some((n, q, kind)),
            }
        });
        for (n, q, kind) in hits.into_iter().flatten() {
            let label = match kind {
                Primality::ProbablePrime => "probable prime",
                _ => "prime",
            };
            let ok = is_power_of_two(n) || arith::is_prime_u64(n);
            rb.witnesses.push(if ok {
                Witness::hit(vec![n], q, label)
            } else {
                Witness::violation(vec![n], q, format!("{label} at composite index"))
            });
        }
        rb.finish()
    }

    /// `3 phi(n)^2 >= 4n` for `n <= n_max` outside the exception list.
    pub fn verify_totient_bound(&self, n_max: u64) -> VerificationReport {
        let mut rb = self.builder("lemma-2.11");
        rb.param("max_n", n_max);
        let phi = totient_sieve(n_max as usize);
        let holds = |n: u64| {
            let f = phi[n as usize] as u64;
            3 * f * f >= 4 * n
        };
        let violations: Vec<u64> = self.par_map(1..=n_max, |n| {
            (!TOTIENT_BOUND_EXCEPTIONS.contains(&n) && !holds(n)).then_some(n)
        })
        .into_iter()
        .flatten()
        .collect();
        for n in violations {
            rb.witnesses.push(Witness::violation(
                vec![n],
                phi[n as usize],
                format!("3 phi^2 < 4n = {}", 4 * n),
            ));
        }
        for n in TOTIENT_BOUND_EXCEPTIONS.into_iter().filter(|&n| n <= n_max) {
            let f = phi[n as usize] as u64;
            let relation = if holds(n) { ">=" } else { "<" };
            rb.witnesses.push(Witness::hit(
                vec![n],
                f,
                format!("exception: 3 phi^2 = {} {relation} {}", 3 * f * f, 4 * n),
            ));
            if holds(n) {
                rb.note(format!("listed exception n={n} satisfies the bound"));
            }
        }
        rb.finish()
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::verifier::Status;

    fn v() -> Verifier {
        Verifier::new(Duration::from_secs(10), 2)
    }

    #[test]
    fn identities_small_and_mutated() {
        assert_eq!(v().verify_identities(2).status, Status::Verified);
        assert_eq!(v().verify_identities(60).status, Status::Verified);

        let p = terms_upto(SequenceKind::Pell, 40);
        let mut q = vec![Nat::from(2u32), Nat::one()];
        for i in 2..=40 {
            let next = &q[i - 1] * 2u32 + &q[i - 2];
            q.push(next);
        }
        let r = v().verify_identities_on(&p, &q, 20);
        assert_eq!(r.status, Status::Counterexample);
        let first = r.violations().map(|w| *w.index.iter().max().unwrap()).min();
        assert_eq!(first, Some(2));
    }

    #[test]
    fn perfect_power_examples() {
        let r = v().search_perfect_powers(SequenceKind::Pell, 60);
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.witness_indices(), vec![7]);
        assert_eq!(r.witnesses[0].note, "13^2");
        let r = v().search_perfect_powers(SequenceKind::Pell, 6);
        assert!(r.witnesses.is_empty());
        let r = v().search_perfect_powers(SequenceKind::AssocPell, 60);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn product_squares_small() {
        let r = v().search_product_squares(SequenceKind::Pell, 4);
        assert!(r.witnesses.is_empty());
        let r = v().search_product_squares(SequenceKind::Pell, 30);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].index, vec![1, 7]);
        let r = v().search_product_squares(SequenceKind::AssocPell, 30);
        assert_eq!(r.witnesses[0].index, vec![0, 1]);
        assert_eq!(r.witnesses[0].note, "trivial: unit product");
    }

    #[test]
    fn four_p_m() {
        let r = v().search_4pm(12);
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.witness_indices(), vec![4]);
        assert_eq!(r.witnesses[0].note, "4 * 3^1");
        let r = v().search_4pm(3);
        assert_eq!(r.status, Status::Verified);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn primitive_congruence_single_index() {
        let r = v().verify_primitive_congruence(SequenceKind::Pell, 3);
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.witnesses[0].value, "5");
    }

    #[test]
    fn one_mod_four() {
        let r = v().verify_1mod4_factor(20);
        assert_eq!(r.status, Status::Verified);
        let w5 = r.witnesses.iter().find(|w| w.index == [5]).unwrap();
        assert_eq!(w5.value, "29");
        assert!(r.witnesses.iter().all(|w| w.index != [4]));
        assert!(r.notes.iter().any(|n| n.contains("n=14") && n.contains("13")));
    }

    #[test]
    fn prime_index() {
        let r = v().verify_prime_index_structure(30);
        assert_eq!(r.status, Status::Verified);
        let idx = r.witness_indices();
        assert!(idx.contains(&2) && !idx.contains(&9));
    }

    #[test]
    fn totient_bound_small() {
        // n = 4 violates the bound: phi(4) = 2 and 3 * 4 < 16
        let r = v().verify_totient_bound(1000);
        assert_eq!(r.status, Status::Counterexample);
        assert_eq!(r.witness_indices(), vec![1, 2, 4, 6]);
        let bad: Vec<_> = r.violations().map(|w| w.index.clone()).collect();
        assert_eq!(bad, vec![vec![4]]);
        assert!(r.notes.is_empty());
        assert_eq!(r.witnesses[3].note, "exception: 3 phi^2 = 12 < 24");
    }
}

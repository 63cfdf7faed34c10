use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;
use pellphi_core::arith::{factorize, is_prime, totient};
use pellphi_core::modular::period_table;
use pellphi_core::sequences::{pell_pair, term, term_by_recurrence};
use pellphi_core::SequenceKind;

fn sequences(c: &mut Criterion) {
    let mut g = c.benchmark_group("pell_pair");
    for n in [100u64, 1_000, 10_000] {
        g.bench_with_input(BenchmarkId::new("doubling", n), &n, |b, &n| b.iter(|| pell_pair(black_box(n))));
        g.bench_with_input(BenchmarkId::new("recurrence", n), &n, |b, &n| {
            b.iter(|| term_by_recurrence(SequenceKind::Pell, black_box(n)))
        });
    }
    g.finish();
}

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("period_table");
    for k in [40u64, 9_973, 999_983] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| period_table(SequenceKind::Pell, black_box(k)).unwrap())
        });
    }
    g.finish();
}

fn factoring(c: &mut Criterion) {
    let budget = Duration::from_secs(30);
    let mut g = c.benchmark_group("factorize");
    g.sample_size(10);
    for n in [40u64, 60, 80] {
        let t = term(SequenceKind::AssocPell, n);
        g.bench_with_input(BenchmarkId::new("assoc", n), &t, |b, t| {
            b.iter(|| totient(&factorize(black_box(t), budget)))
        });
    }
    // product of two 61-bit primes: exercises rho in Montgomery form
    let semi = BigUint::from(2_305_843_009_213_693_951u64) * BigUint::from(1_152_921_504_606_846_883u64);
    g.bench_function("semiprime_122bit", |b| b.iter(|| factorize(black_box(&semi), budget)));
    g.finish();

    let p = term(SequenceKind::Pell, 421);
    c.bench_function("is_prime_P421", |b| b.iter(|| is_prime(black_box(&p))));
}

criterion_group!(benches, sequences, tables, factoring);
criterion_main!(benches);

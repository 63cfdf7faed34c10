//! Benchmarks for pellphi live in `benches/`.

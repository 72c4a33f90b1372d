//! Criterion benchmarks for the two-memory crates; see `benches/`.

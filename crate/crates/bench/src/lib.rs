//! Criterion benchmarks for the pencil kernel live in `benches/`.

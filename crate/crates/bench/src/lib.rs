//! Criterion benchmarks for the decoders; see `benches/`.

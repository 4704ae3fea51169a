//! Criterion benchmarks for the qrf-core kernels live in `benches/`.

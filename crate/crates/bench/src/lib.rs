//! Benchmarks for the `mdexp-core` kernels; see `benches/`.

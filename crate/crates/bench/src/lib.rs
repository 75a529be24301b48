//! Criterion benchmarks for the sampling and eigenvalue kernels; see
//! `benches/kernels.rs`. Run with `cargo bench -p lgl-bench`.

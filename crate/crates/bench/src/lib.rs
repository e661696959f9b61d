//! Benchmark-only crate. The Criterion suite lives in `benches/kernels.rs`:
//! `cargo bench -p causal-lab-bench`.

//! Benchmark-only crate; see `benches/coarsening.rs`.

//! Criterion benchmarks for the zonalis kernels; see `benches/`.

//! Criterion benchmarks for curving, assembly and the solvers; run `cargo bench -p curvelast-bench`.

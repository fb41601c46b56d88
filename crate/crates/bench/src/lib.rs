//! Benchmark-only crate; the benchable surface lives in pqsla-core.

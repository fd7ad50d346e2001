// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks live under `benches/`; run with `cargo bench -p explorebias-bench`.

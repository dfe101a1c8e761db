//! Differentially private query answering over histogram data, with an
//! emulation harness for fleet-style (vehicle node + central aggregator)
//! data sharing.
//!
//! The crate has three layers:
//!
//! * **Query workbench**: [`domain`] turns tabular records into a flat cell
//!   count vector, [`workload`] builds linear counting-query matrices over it
//!   (all-range totals and k-way marginals), and [`mechanisms`] answers those
//!   workloads under ε-differential privacy via five strategies: direct
//!   Laplace (identity), parity-basis (Fourier) coefficients, Haar wavelet
//!   coefficients, a noisy binary interval tree, and measured-marginal
//!   selection (data cube).
//! * **Benchmark harness**: [`metrics`] runs mechanism × workload × ε grids,
//!   records absolute/relative error per trial, and writes deterministic CSV
//!   summaries; [`chart`] renders the sweeps as SVG line charts.
//! * **Sharing emulator**: [`emulation`] generates a synthetic heterogeneous
//!   fleet, trains a linear predictor under global-DP (noise the pooled data)
//!   or local-DP (noise at each node) regimes, both in-process and over a
//!   loopback TCP protocol; [`imaging`] applies the same per-element noise to
//!   PGM/PPM images for visual inspection of ε settings.
//!
//! Everything is deterministic given a 64-bit seed: all randomness flows from
//! the [`rng`] module's seeded generator and keyed substreams.

pub mod chart;
pub mod domain;
pub mod emulation;
pub mod error;
pub mod imaging;
pub mod mechanisms;
pub mod metrics;
pub mod rng;
pub mod workload;

pub use error::{Error, Result};
pub use rng::RngSeed;

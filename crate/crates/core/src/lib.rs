//! Simulation and analytics core for evaluating post-quantum signature
//! schemes against payment-network latency SLAs.
//!
//! The crate is organised around the pipeline the CLI drives:
//!
//! * [`latency_db`] — algorithm latency/size profiles and the lognormal
//!   machinery every sampler is built on.
//! * [`network`] — hop latencies, geographic routing and AR(1) jitter.
//! * [`traffic`] — seasonal scenarios, the intraday arrival mixture and
//!   per-day transaction streams.
//! * [`queueing`] — closed-form M/M/c Erlang-C analytics with the
//!   saturation sentinel.
//! * [`engine`] — the deterministic multi-day Monte Carlo corpus.
//! * [`stats`] — GEV block maxima, goodness-of-fit, effect sizes, ANOVA.
//! * [`decision`] — CDI, message-format compliance, route composition,
//!   HNDL exposure, volume and cost projections.
//! * [`config`] — structured-text configuration with validated defaults.

// Guards of the form `!(x > 0.0)` are NaN-rejecting by construction;
// rewriting them as `x <= 0.0` would accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod decision;
pub mod engine;
pub mod error;
pub mod latency_db;
pub mod network;
pub mod queueing;
pub mod rng;
pub mod stats;
pub mod traffic;

pub use config::SimConfig;
pub use engine::{CorpusResult, DayResult, RunConfig};
pub use error::{Error, Result};
pub use latency_db::{AlgorithmProfile, LogNormalParams, SigningMode};
pub use queueing::{QueueAssessment, QueueParams};
pub use traffic::{ScenarioSpec, Transaction};

//! Deterministic multi-day Monte Carlo corpus.
//!
//! All algorithms replay identical scenario, traffic, network and signing-z
//! streams (common random numbers); only the signing distribution parameters
//! differ, so per-algorithm latency deltas are nearly noise-free. Days are
//! partitioned into carry-over chains (consecutive days sharing a multi-day
//! stress family) and chains are the parallel unit, which keeps AR(1)
//! threading and byte-identical output at any worker count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::latency_db::{sample_lognormal, AlgorithmProfile, LogNormalParams, SigningMode};
use crate::network::{ar1_step, carry_over_or_reset, Ar1State, HopTier, NetworkModel};
use crate::queueing::{mmc_assess, QueueParams, SENTINEL_WAIT_US};
use crate::rng::{day_rng, scenario_rng, StreamPurpose};
use crate::traffic::{
    generate_day, payid_latency, sample_scenario, Route, ScenarioSpec, TimeOfDayProfile,
    TrafficConfig, Transaction,
};

/// Engine-level knobs; distribution and profile data live beside it in the
/// full simulation config.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub master_seed: u64,
    pub n_days: u32,
    pub n_sample: u64,
    /// Per-route SLA thresholds (ms).
    pub sla_npp_ms: f64,
    pub sla_rits_ms: f64,
    pub sla_swift_ms: f64,
    /// Additive HSM deployment overhead per signing hop (ms).
    pub hsm_overhead_per_hop_ms: f64,
    pub c_servers: u32,
    /// Signing hops per NPP transaction.
    pub signing_hops: u32,
    /// Normal-day per-institution arrival rates (TPS).
    pub npp_big4_tps: f64,
    pub rits_lambda_tps: f64,
    pub swift_lambda_tps: f64,
    /// Fixed route overheads added to non-NPP routes (ms).
    pub rits_network_ms: f64,
    pub rits_processing_ms: f64,
    pub swift_network_ms: f64,
    pub swift_processing_ms: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 42,
            n_days: 1000,
            n_sample: 10_000,
            sla_npp_ms: 2_000.0,
            sla_rits_ms: 30_000.0,
            sla_swift_ms: 86_400_000.0,
            hsm_overhead_per_hop_ms: 0.0,
            c_servers: 2,
            signing_hops: 4,
            npp_big4_tps: 13.5,
            rits_lambda_tps: 0.022,
            swift_lambda_tps: 0.001,
            rits_network_ms: 14.0,
            rits_processing_ms: 263.0,
            swift_network_ms: 192.0,
            swift_processing_ms: 645.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.n_days < 1 {
            violations.push("n_days must be >= 1".into());
        }
        if self.n_sample < 1 {
            violations.push("n_sample must be >= 1".into());
        }
        for (name, v) in [
            ("sla_npp_ms", self.sla_npp_ms),
            ("sla_rits_ms", self.sla_rits_ms),
            ("sla_swift_ms", self.sla_swift_ms),
        ] {
            if !(v > 0.0) {
                violations.push(format!("{name} must be > 0"));
            }
        }
        if self.c_servers < 1 {
            violations.push("c_servers must be >= 1".into());
        }
        if self.signing_hops < 1 {
            violations.push("signing_hops must be >= 1".into());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::config(violations))
        }
    }
}

/// Everything a day simulation needs, borrowed from the validated config.
#[derive(Clone, Copy)]
pub struct SimContext<'a> {
    pub run: &'a RunConfig,
    pub profiles: &'a [AlgorithmProfile],
    pub network: &'a NetworkModel,
    pub scenarios: &'a [ScenarioSpec],
    pub tod: &'a TimeOfDayProfile,
    pub traffic: &'a TrafficConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayResult {
    pub day_index: u32,
    pub scenario: String,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub p99_ms: f64,
    pub max_ms: f64,
    /// Fraction of NPP transactions within the NPP SLA.
    pub sla_compliance: f64,
    /// NPP sample count the statistics are computed over.
    pub n: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgoCorpus {
    pub algo: String,
    pub days: Vec<DayResult>,
    pub mean_daily_p99_ms: f64,
    pub ci95_mean_daily_p99: (f64, f64),
    pub mean_daily_p50_ms: f64,
    pub mean_daily_p95_ms: f64,
    /// Violations / transactions over the whole corpus NPP stream.
    pub overall_compliance: f64,
    pub npp_violations: u64,
    pub npp_transactions: u64,
    /// Mean daily p99 minus the classical baseline's.
    pub delta_p99_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusResult {
    pub master_seed: u64,
    pub n_days: u32,
    pub scenario_sequence: Vec<String>,
    pub algos: Vec<AlgoCorpus>,
}

impl CorpusResult {
    pub fn algo(&self, name: &str) -> Option<&AlgoCorpus> {
        self.algos.iter().find(|a| a.algo == name)
    }
}

/// Stream seed derivation, re-exported where the engine consumes it.
pub use crate::rng::day_stream as day_seed;

/// Per-day random streams; one set per (day, algorithm) replay.
pub struct DayStreams {
    pub latency: ChaCha8Rng,
    pub signing: ChaCha8Rng,
    pub hybrid_classical: ChaCha8Rng,
}

impl DayStreams {
    pub fn new(master_seed: u64, day_index: u64) -> Self {
        DayStreams {
            latency: day_rng(master_seed, day_index, StreamPurpose::Latency),
            signing: day_rng(master_seed, day_index, StreamPurpose::Signing),
            hybrid_classical: day_rng(master_seed, day_index, StreamPurpose::HybridClassical),
        }
    }
}

/// Per-day, per-algorithm cache of queue waits and distributions.
struct AlgoDayState<'a> {
    algo: &'a AlgorithmProfile,
    sign_dist: LogNormalParams,
    classical_dist: Option<LogNormalParams>,
    /// Mean queue wait (ms) per route at this day's arrival rates.
    wait_npp_ms: f64,
    wait_rits_ms: f64,
    wait_swift_ms: f64,
}

fn scenario_ratio(scenario: &ScenarioSpec, scenarios: &[ScenarioSpec]) -> (f64, f64, f64) {
    let normal = scenarios
        .iter()
        .find(|s| s.name == "normal")
        .unwrap_or(&scenarios[0]);
    (
        scenario.npp_per_day as f64 / normal.npp_per_day as f64,
        scenario.rtgs_per_day as f64 / normal.rtgs_per_day.max(1) as f64,
        scenario.swift_per_day as f64 / normal.swift_per_day.max(1) as f64,
    )
}

impl<'a> AlgoDayState<'a> {
    fn new(ctx: &SimContext<'a>, algo: &'a AlgorithmProfile, scenario: &ScenarioSpec) -> Self {
        let (npp_ratio, rits_ratio, swift_ratio) = scenario_ratio(scenario, ctx.scenarios);
        let mu = algo.service_rate();
        let wait_ms = |lambda: f64| -> f64 {
            let assess = mmc_assess(QueueParams {
                lambda,
                mu,
                c: ctx.run.c_servers,
            });
            if assess.saturated {
                SENTINEL_WAIT_US / 1000.0
            } else {
                assess.mean_wait_us / 1000.0
            }
        };
        let classical_dist = algo.classical_link.as_ref().map(|link| {
            ctx.profiles
                .iter()
                .find(|p| &p.name == link)
                .expect("validated classical link")
                .sign_dist()
        });
        AlgoDayState {
            algo,
            sign_dist: algo.sign_dist(),
            classical_dist,
            wait_npp_ms: wait_ms(ctx.run.npp_big4_tps * npp_ratio),
            wait_rits_ms: wait_ms(ctx.run.rits_lambda_tps * rits_ratio),
            wait_swift_ms: wait_ms(ctx.run.swift_lambda_tps * swift_ratio),
        }
    }
}

/// End-to-end latency of one transaction (ms): route network latency,
/// PayID draw, per-hop signing draws (hybrid adds a classical draw per hop),
/// per-hop HSM overhead, TLS reconnect surcharge and the M/M/c mean queue
/// wait for the route (sentinel if saturated).
#[allow(clippy::too_many_arguments)]
fn simulate_transaction_inner(
    tx: &Transaction,
    state: &AlgoDayState,
    ctx: &SimContext,
    streams: &mut DayStreams,
    ar1: &mut Ar1State,
    stochastic_scale: f64,
) -> f64 {
    // AR(1) advances once per transaction; the same state applies to every
    // hop of this transaction.
    *ar1 = ar1_step(*ar1, &mut streams.latency);

    let network = ctx.network;
    let origin = &network.institutions[tx.origin];
    let dest = &network.institutions[tx.dest];

    let payid_ms = if tx.needs_payid {
        payid_latency(&mut streams.latency)
    } else {
        0.0
    };
    let mut total = match tx.route {
        Route::Npp => network.npp_route_latency_with_lookup(
            origin,
            dest,
            payid_ms,
            &mut streams.latency,
            ar1,
            stochastic_scale,
        ),
        Route::Rtgs => {
            ctx.run.rits_network_ms
                + ctx.run.rits_processing_ms
                + network.tier_latency(HopTier::Rits, &mut streams.latency, ar1, stochastic_scale)
        }
        Route::Swift => {
            ctx.run.swift_network_ms
                + ctx.run.swift_processing_ms
                + network.tier_latency(HopTier::Swift, &mut streams.latency, ar1, stochastic_scale)
        }
        Route::Intrabank => {
            let d = network.hop(HopTier::Intrabank).dist();
            let draw = (sample_lognormal(d, &mut streams.latency)
                + sample_lognormal(d, &mut streams.latency))
                * stochastic_scale;
            crate::network::apply_jitter(draw, ar1, network.jitter_floor_ms)
        }
    };

    // Signing: identical z sequence for every algorithm (the signing stream
    // is keyed by (day, tx, hop) through draw order), so deltas reduce to
    // the parameter differences.
    let hops = ctx.run.signing_hops;
    for _ in 0..hops {
        let z: f64 = streams.signing.sample(StandardNormal);
        total += (state.sign_dist.mu_ln + state.sign_dist.sigma_ln * z).exp() / 1000.0;
        if let Some(classical) = state.classical_dist {
            let zc: f64 = streams.hybrid_classical.sample(StandardNormal);
            total += (classical.mu_ln + classical.sigma_ln * zc).exp() / 1000.0;
        }
    }
    total += ctx.run.hsm_overhead_per_hop_ms * hops as f64;

    if tx.tls_reconnect {
        // Session re-establishment: a network cost common to all algorithms
        // plus the algorithm-keyed signing surcharge.
        total += sample_lognormal(network.reconnect_network_dist(), &mut streams.latency);
        total += state.algo.reconnect_overhead_ms;
    }

    total += match tx.route {
        Route::Npp => state.wait_npp_ms,
        Route::Rtgs => state.wait_rits_ms,
        Route::Swift => state.wait_swift_ms,
        Route::Intrabank => 0.0,
    };
    total
}

/// Public single-transaction entry point (used by tests and docs); corpus
/// runs drive the batched day loop instead.
pub fn simulate_transaction(
    tx: &Transaction,
    algo: &AlgorithmProfile,
    ctx: &SimContext,
    streams: &mut DayStreams,
    ar1: &mut Ar1State,
    scenario: &ScenarioSpec,
    day_scale: f64,
) -> f64 {
    let state = AlgoDayState::new(ctx, algo, scenario);
    simulate_transaction_inner(
        tx,
        &state,
        ctx,
        streams,
        ar1,
        day_scale * scenario.network_scale,
    )
}

pub struct DaySimOutput {
    pub result: DayResult,
    pub final_ar1: Ar1State,
    /// NPP end-to-end samples (ms), hour-ordered.
    pub npp_samples: Vec<f64>,
}

/// Day-level network condition multiplier: lognormal with unit mean.
fn day_condition_scale(master_seed: u64, day_index: u64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let mut rng = day_rng(master_seed, day_index, StreamPurpose::DayCondition);
    let z: f64 = rng.sample(StandardNormal);
    (-0.5 * sigma * sigma + sigma * z).exp()
}

/// Simulate one day for one algorithm from its deterministic streams.
pub fn simulate_day(
    ctx: &SimContext,
    algo: &AlgorithmProfile,
    day_index: u32,
    scenario: &ScenarioSpec,
    ar1_in: Ar1State,
) -> Result<DaySimOutput> {
    let mut traffic_rng = day_rng(
        ctx.run.master_seed,
        day_index as u64,
        StreamPurpose::Traffic,
    );
    let txs = generate_day(
        scenario,
        ctx.run.n_sample,
        ctx.traffic,
        ctx.tod,
        &ctx.network.institutions,
        &mut traffic_rng,
    )?;
    simulate_day_with_transactions(ctx, algo, day_index, scenario, ar1_in, &txs)
}

pub fn simulate_day_with_transactions(
    ctx: &SimContext,
    algo: &AlgorithmProfile,
    day_index: u32,
    scenario: &ScenarioSpec,
    ar1_in: Ar1State,
    txs: &[Transaction],
) -> Result<DaySimOutput> {
    let mut streams = DayStreams::new(ctx.run.master_seed, day_index as u64);
    let state = AlgoDayState::new(ctx, algo, scenario);
    let scale = day_condition_scale(
        ctx.run.master_seed,
        day_index as u64,
        ctx.network.daily_network_sigma,
    ) * scenario.network_scale;
    let mut ar1 = ar1_in;
    let mut npp_samples = Vec::with_capacity(txs.len());
    for tx in txs {
        let latency = simulate_transaction_inner(tx, &state, ctx, &mut streams, &mut ar1, scale);
        if tx.route == Route::Npp {
            npp_samples.push(latency);
        }
    }
    if npp_samples.is_empty() {
        return Err(Error::domain(format!(
            "day {day_index}: no NPP transactions in sample"
        )));
    }
    let mut sorted = npp_samples.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let compliance =
        sorted.iter().filter(|&&v| v <= ctx.run.sla_npp_ms).count() as f64 / sorted.len() as f64;
    let result = DayResult {
        day_index,
        scenario: scenario.name.clone(),
        p50_ms: percentile_sorted(&sorted, 0.50),
        p95_ms: percentile_sorted(&sorted, 0.95),
        p99_ms: percentile_sorted(&sorted, 0.99),
        max_ms: *sorted.last().expect("non-empty"),
        sla_compliance: compliance,
        n: sorted.len() as u64,
    };
    Ok(DaySimOutput {
        result,
        final_ar1: ar1,
        npp_samples,
    })
}

/// Draw the scenario sequence for a corpus from the dedicated stream.
pub fn scenario_sequence<'a>(ctx: &SimContext<'a>, n_days: u32) -> Result<Vec<&'a ScenarioSpec>> {
    let mut rng = scenario_rng(ctx.run.master_seed);
    (0..n_days)
        .map(|_| sample_scenario(ctx.scenarios, &mut rng))
        .collect()
}

/// Split day indices into AR(1) carry-over chains: maximal runs of
/// consecutive days sharing a multi-day stress family.
fn carry_over_chains(scenarios: &[&ScenarioSpec]) -> Vec<(u32, u32)> {
    let mut chains = Vec::new();
    let mut start = 0u32;
    for i in 1..scenarios.len() {
        let chained = match (
            scenarios[i - 1].multi_day_family,
            scenarios[i].multi_day_family,
        ) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        if !chained {
            chains.push((start, i as u32));
            start = i as u32;
        }
    }
    chains.push((start, scenarios.len() as u32));
    chains
}

/// Run the full seasonally mixed corpus for every profile.
pub fn run_corpus(ctx: &SimContext) -> Result<CorpusResult> {
    ctx.run.validate()?;
    let scenarios = scenario_sequence(ctx, ctx.run.n_days)?;
    let chains = carry_over_chains(&scenarios);

    // One work item per chain; each yields per-algorithm day results in
    // day order, so the merge is order-independent.
    let chain_results: Result<Vec<Vec<Vec<DayResult>>>> = chains
        .par_iter()
        .map(|&(start, end)| {
            let mut per_algo: Vec<Vec<DayResult>> =
                vec![Vec::with_capacity((end - start) as usize); ctx.profiles.len()];
            for (algo_idx, algo) in ctx.profiles.iter().enumerate() {
                let mut ar1 = ctx.network.ar1();
                for day in start..end {
                    let scenario = scenarios[day as usize];
                    if day > start {
                        ar1 = carry_over_or_reset(ar1, scenarios[day as usize - 1], scenario);
                    }
                    let out = simulate_day(ctx, algo, day, scenario, ar1)?;
                    ar1 = out.final_ar1;
                    per_algo[algo_idx].push(out.result);
                }
            }
            Ok(per_algo)
        })
        .collect();
    let chain_results = chain_results?;

    let mut algos = Vec::with_capacity(ctx.profiles.len());
    let baseline_idx = ctx
        .profiles
        .iter()
        .position(|p| p.mode == SigningMode::Classical)
        .unwrap_or(0);
    let mut baseline_mean_p99 = 0.0;
    for (algo_idx, algo) in ctx.profiles.iter().enumerate() {
        let mut days: Vec<DayResult> = chain_results
            .iter()
            .flat_map(|chain| chain[algo_idx].iter().cloned())
            .collect();
        days.sort_by_key(|d| d.day_index);
        let p99s: Vec<f64> = days.iter().map(|d| d.p99_ms).collect();
        let mean_p99 = mean(&p99s);
        let ci = if p99s.len() >= 2 {
            ci_mean_t(&p99s, 0.95)?
        } else {
            (mean_p99, mean_p99)
        };
        let total_n: u64 = days.iter().map(|d| d.n).sum();
        let compliant: f64 = days.iter().map(|d| d.sla_compliance * d.n as f64).sum();
        let violations = (total_n as f64 - compliant).round() as u64;
        if algo_idx == baseline_idx {
            baseline_mean_p99 = mean_p99;
        }
        algos.push(AlgoCorpus {
            algo: algo.name.clone(),
            mean_daily_p99_ms: mean_p99,
            ci95_mean_daily_p99: ci,
            mean_daily_p50_ms: mean(&days.iter().map(|d| d.p50_ms).collect::<Vec<_>>()),
            mean_daily_p95_ms: mean(&days.iter().map(|d| d.p95_ms).collect::<Vec<_>>()),
            overall_compliance: compliant / total_n as f64,
            npp_violations: violations,
            npp_transactions: total_n,
            delta_p99_ms: 0.0,
            days,
        });
    }
    for algo in &mut algos {
        algo.delta_p99_ms = algo.mean_daily_p99_ms - baseline_mean_p99;
    }
    Ok(CorpusResult {
        master_seed: ctx.run.master_seed,
        n_days: ctx.run.n_days,
        scenario_sequence: scenarios.iter().map(|s| s.name.clone()).collect(),
        algos,
    })
}

/// NPP samples of the first normal day in the corpus sequence, replayed
/// deterministically (the representative day for tail and GoF analysis).
pub fn representative_day_samples(
    ctx: &SimContext,
    algo: &AlgorithmProfile,
) -> Result<(u32, Vec<f64>)> {
    let scenarios = scenario_sequence(ctx, ctx.run.n_days)?;
    let day = scenarios
        .iter()
        .position(|s| s.name == "normal")
        .unwrap_or(0) as u32;
    let out = simulate_day(ctx, algo, day, scenarios[day as usize], ctx.network.ar1())?;
    Ok((day, out.npp_samples))
}

/// Linear interpolation between closest ranks; `q` in [0, 1].
pub fn percentile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("percentile of empty list"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!(
            "percentile fraction {q} outside [0,1]"
        )));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(percentile_sorted(&xs, q))
}

fn percentile_sorted(xs: &[f64], q: f64) -> f64 {
    let rank = q * (xs.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    if lo + 1 < xs.len() {
        xs[lo] + frac * (xs[lo + 1] - xs[lo])
    } else {
        xs[xs.len() - 1]
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-sided t confidence interval on the mean: `mean +/- t(a/2, n-1)*s/sqrt(n)`.
pub fn ci_mean_t(values: &[f64], confidence: f64) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::domain("ci_mean_t needs n >= 2"));
    }
    let n = values.len() as f64;
    let m = mean(values);
    let var = values.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok((m, m));
    }
    let df = n - 1.0;
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::domain(format!("t-distribution: {e}")))?
        .inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let half = t * (var / n).sqrt();
    Ok((m - half, m + half))
}


#[cfg(test)]
mod prop_tests {
    use super::percentile;
    use proptest::prelude::*;

    proptest! {
        // Percentiles stay inside the sample range and grow with q.
        #[test]
        fn percentile_bounded_and_monotone(
            mut xs in proptest::collection::vec(-1e6f64..1e6, 1..200),
            q1 in 0.0f64..1.0,
            q2 in 0.0f64..1.0,
        ) {
            let lo = q1.min(q2);
            let hi = q1.max(q2);
            let p_lo = percentile(&xs, lo).unwrap();
            let p_hi = percentile(&xs, hi).unwrap();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert!(p_lo >= xs[0] - 1e-9);
            prop_assert!(p_hi <= xs[xs.len() - 1] + 1e-9);
            prop_assert!(p_lo <= p_hi + 1e-9);
        }
    }
}

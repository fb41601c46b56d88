//! Per-day transaction streams: seasonal scenario selection, the
//! six-component intraday arrival profile, PayID lookups, high-value
//! rerouting and TLS reconnect flags.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latency_db::{sample_lognormal, AlgorithmProfile, LogNormalParams};
use crate::network::Institution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StressFamily {
    Christmas,
    Crash,
}

/// One operational day type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    /// Seasonal probability of drawing this day type.
    pub weight: f64,
    pub npp_per_day: u64,
    pub intrabank_per_day: u64,
    pub rtgs_per_day: u64,
    pub swift_per_day: u64,
    /// Consecutive days of the same family thread AR(1) state forward.
    #[serde(default)]
    pub multi_day_family: Option<StressFamily>,
    /// Multiplier on stochastic network draws (market stress).
    #[serde(default = "default_network_scale")]
    pub network_scale: f64,
}

fn default_network_scale() -> f64 {
    1.0
}

/// The five seasonal day types with published volumes and weights.
pub fn default_scenarios() -> Vec<ScenarioSpec> {
    vec![
        ScenarioSpec {
            name: "normal".into(),
            weight: 0.762,
            npp_per_day: 5_200_000,
            intrabank_per_day: 8_600_000,
            rtgs_per_day: 9_500,
            swift_per_day: 550,
            multi_day_family: None,
            network_scale: 1.0,
        },
        ScenarioSpec {
            name: "christmas".into(),
            weight: 0.082,
            npp_per_day: 8_900_000,
            intrabank_per_day: 14_700_000,
            rtgs_per_day: 9_500,
            swift_per_day: 550,
            multi_day_family: Some(StressFamily::Christmas),
            network_scale: 1.0,
        },
        ScenarioSpec {
            name: "taxtime".into(),
            weight: 0.082,
            npp_per_day: 6_300_000,
            intrabank_per_day: 10_400_000,
            rtgs_per_day: 9_500,
            swift_per_day: 550,
            multi_day_family: None,
            network_scale: 1.0,
        },
        ScenarioSpec {
            name: "crash".into(),
            weight: 0.019,
            npp_per_day: 5_900_000,
            intrabank_per_day: 8_600_000,
            rtgs_per_day: 32_000,
            swift_per_day: 550,
            multi_day_family: Some(StressFamily::Crash),
            network_scale: 1.01,
        },
        ScenarioSpec {
            name: "eofy".into(),
            weight: 0.055,
            npp_per_day: 6_000_000,
            intrabank_per_day: 9_900_000,
            rtgs_per_day: 19_000,
            swift_per_day: 550,
            multi_day_family: None,
            network_scale: 1.0,
        },
    ]
}

pub fn validate_scenarios(scenarios: &[ScenarioSpec]) -> Result<()> {
    let mut violations = Vec::new();
    let total: f64 = scenarios.iter().map(|s| s.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        violations.push(format!("scenario weights sum to {total}, expected 1.0"));
    }
    for s in scenarios {
        if s.npp_per_day == 0 {
            violations.push(format!("scenario {}: npp_per_day must be > 0", s.name));
        }
        if !(s.network_scale > 0.0) {
            violations.push(format!("scenario {}: network_scale must be > 0", s.name));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::config(violations))
    }
}

/// Categorical draw over the configured scenarios.
pub fn sample_scenario<'a, R: Rng + ?Sized>(
    scenarios: &'a [ScenarioSpec],
    rng: &mut R,
) -> Result<&'a ScenarioSpec> {
    validate_scenarios(scenarios)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for s in scenarios {
        acc += s.weight;
        if u < acc {
            return Ok(s);
        }
    }
    Ok(scenarios.last().expect("validated non-empty"))
}

/// Gaussian mixture component over time-of-day hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean_hour: f64,
    pub std_hour: f64,
}

/// Six-component Gaussian mixture over [0, 24).
///
/// Defaults are calibrated to the two published anchors: the institutional
/// business peak at 10:00 (~35 TPS on a normal day, 60.2 TPS at the
/// Christmas volume) and the evening PayID peak between 18:00 and 22:00.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeOfDayProfile {
    pub components: Vec<MixtureComponent>,
}

impl Default for TimeOfDayProfile {
    fn default() -> Self {
        let raw = [
            (0.0500, 2.5, 2.60),
            (0.1400, 8.5, 1.30),
            (0.25889, 10.2, 1.35),
            (0.17111, 13.0, 1.80),
            (0.1600, 16.0, 1.70),
            (0.2200, 19.6, 1.90),
        ];
        TimeOfDayProfile {
            components: raw
                .iter()
                .map(|&(weight, mean_hour, std_hour)| MixtureComponent {
                    weight,
                    mean_hour,
                    std_hour,
                })
                .collect(),
        }
    }
}

impl TimeOfDayProfile {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            violations.push(format!("mixture weights sum to {total}, expected 1.0"));
        }
        for (i, c) in self.components.iter().enumerate() {
            if !(c.std_hour > 0.0) {
                violations.push(format!("mixture component {i}: std_hour must be > 0"));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::config(violations))
        }
    }

    /// Unnormalised mixture density at an hour.
    fn raw_density(&self, hour: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let z = (hour - c.mean_hour) / c.std_hour;
                c.weight * (-0.5 * z * z).exp() / (c.std_hour * (2.0 * std::f64::consts::PI).sqrt())
            })
            .sum()
    }

    /// Mass inside [0, 24); the truncated density renormalises by this.
    pub fn truncation_mass(&self) -> f64 {
        // Simpson's rule on a fine grid; the profile is smooth.
        let n = 4800usize;
        let h = 24.0 / n as f64;
        let mut acc = self.raw_density(0.0) + self.raw_density(24.0);
        for i in 1..n {
            let x = i as f64 * h;
            acc += self.raw_density(x) * if i % 2 == 0 { 2.0 } else { 4.0 };
        }
        acc * h / 3.0
    }

    /// Normalised density at an hour (integrates to 1 over [0, 24)).
    pub fn density(&self, hour: f64) -> f64 {
        self.raw_density(hour) / self.truncation_mass()
    }

    /// Draw an hour by rejection into [0, 24); equivalent to sampling the
    /// truncated renormalised mixture.
    pub fn sample_hour<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::StandardNormal;
        loop {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut comp = &self.components[self.components.len() - 1];
            for c in &self.components {
                acc += c.weight;
                if u < acc {
                    comp = c;
                    break;
                }
            }
            let z: f64 = rng.sample(StandardNormal);
            let hour = comp.mean_hour + comp.std_hour * z;
            if (0.0..24.0).contains(&hour) {
                return hour;
            }
        }
    }
}

/// Arrival rate (TPS) at an hour, with the 24-hour integral of
/// `rate * 3600` equal to `daily_volume`.
pub fn intraday_rate(hour: f64, profile: &TimeOfDayProfile, daily_volume: f64) -> f64 {
    daily_volume * profile.density(hour) / 3600.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Route {
    Npp,
    Rtgs,
    Swift,
    Intrabank,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transaction {
    pub id: u64,
    pub route: Route,
    pub origin: usize,
    pub dest: usize,
    pub hour: f64,
    pub amount_aud: f64,
    pub needs_payid: bool,
    pub tls_reconnect: bool,
}

/// How the per-day sample is allocated across routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SampleAllocation {
    /// The whole sample is NPP traffic (SLA statistics are NPP-based).
    #[default]
    NppOnly,
    /// Allocate proportionally to scenario route volumes.
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficConfig {
    pub payid_rate: f64,
    pub tls_reconnect_rate: f64,
    pub amount_median_aud: f64,
    pub amount_sigma_ln: f64,
    pub high_value_threshold_aud: f64,
    pub allocation: SampleAllocation,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            payid_rate: 1.0,
            tls_reconnect_rate: 0.001,
            amount_median_aud: 3_000.0,
            // ~1% of NPP transactions exceed the 250k AUD threshold.
            amount_sigma_ln: 1.9015,
            high_value_threshold_aud: 250_000.0,
            allocation: SampleAllocation::NppOnly,
        }
    }
}

/// Generate one day's transaction stream.
///
/// High-value NPP transactions are rerouted to RTGS before simulation; they
/// stay in the stream under their new route so queue analytics still see
/// them, but NPP SLA statistics exclude them.
pub fn generate_day<R: Rng + ?Sized>(
    scenario: &ScenarioSpec,
    n_sample: u64,
    cfg: &TrafficConfig,
    tod: &TimeOfDayProfile,
    institutions: &[Institution],
    rng: &mut R,
) -> Result<Vec<Transaction>> {
    if n_sample == 0 {
        return Err(Error::domain("generate_day needs n_sample > 0"));
    }
    if institutions.is_empty() {
        return Err(Error::config(vec!["no institutions configured".into()]));
    }
    let amount_dist = LogNormalParams {
        mu_ln: cfg.amount_median_aud.ln(),
        sigma_ln: cfg.amount_sigma_ln,
    };
    let total_volume = (scenario.npp_per_day
        + scenario.intrabank_per_day
        + scenario.rtgs_per_day
        + scenario.swift_per_day) as f64;
    let mut txs = Vec::with_capacity(n_sample as usize);
    for id in 0..n_sample {
        let hour = tod.sample_hour(rng);
        let origin = pick_institution(institutions, rng);
        let dest = pick_institution(institutions, rng);
        let amount = sample_lognormal(amount_dist, rng);
        let route = match cfg.allocation {
            SampleAllocation::NppOnly => Route::Npp,
            SampleAllocation::Proportional => {
                let u: f64 = rng.random::<f64>() * total_volume;
                if u < scenario.npp_per_day as f64 {
                    Route::Npp
                } else if u < (scenario.npp_per_day + scenario.intrabank_per_day) as f64 {
                    Route::Intrabank
                } else if u
                    < (scenario.npp_per_day + scenario.intrabank_per_day + scenario.rtgs_per_day)
                        as f64
                {
                    Route::Rtgs
                } else {
                    Route::Swift
                }
            }
        };
        let needs_payid = route == Route::Npp && rng.random::<f64>() < cfg.payid_rate;
        let tls_reconnect = route == Route::Npp && rng.random::<f64>() < cfg.tls_reconnect_rate;
        // NPPA business rules: high-value transactions move to RTGS.
        let route = if route == Route::Npp && amount > cfg.high_value_threshold_aud {
            Route::Rtgs
        } else {
            route
        };
        txs.push(Transaction {
            id,
            route,
            origin,
            dest,
            hour,
            amount_aud: amount,
            needs_payid: needs_payid && route == Route::Npp,
            tls_reconnect: tls_reconnect && route == Route::Npp,
        });
    }
    // AR(1) jitter is indexed by transaction time, so the day stream is
    // ordered by hour (stable on id for reproducible ties).
    txs.sort_by(|a, b| {
        a.hour
            .partial_cmp(&b.hour)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.id.cmp(&b.id))
    });
    Ok(txs)
}

fn pick_institution<R: Rng + ?Sized>(institutions: &[Institution], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, inst) in institutions.iter().enumerate() {
        acc += inst.share;
        if u < acc {
            return i;
        }
    }
    institutions.len() - 1
}

/// PayID lookup latency: lognormal with log-space parameters (2.0, 0.47),
/// mean about 8.25 ms.
pub fn payid_latency<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    sample_lognormal(PAYID_DIST, rng)
}

pub const PAYID_DIST: LogNormalParams = LogNormalParams {
    mu_ln: 2.0,
    sigma_ln: 0.47,
};

/// Algorithm-keyed additive TLS reconnect overhead (ms).
///
/// Lookup is by exact profile name; an unknown name is a configuration
/// error, never a silent zero.
pub fn tls_reconnect_overhead(algo_name: &str, profiles: &[AlgorithmProfile]) -> Result<f64> {
    profiles
        .iter()
        .find(|p| p.name == algo_name)
        .map(|p| p.reconnect_overhead_ms)
        .ok_or_else(|| Error::UnknownAlgorithm(algo_name.to_string()))
}

/// Lognormal helper for the transaction-amount distribution, exposed so the
/// config layer can echo the implied high-value fraction.
pub fn amount_dist(cfg: &TrafficConfig) -> LogNormalParams {
    LogNormalParams {
        mu_ln: cfg.amount_median_aud.ln(),
        sigma_ln: cfg.amount_sigma_ln,
    }
}

pub fn amount_dist_check(cfg: &TrafficConfig) -> f64 {
    // Fraction of amounts above the rerouting threshold.
    let d = amount_dist(cfg);
    let z = (cfg.high_value_threshold_aud.ln() - d.mu_ln) / d.sigma_ln;
    1.0 - crate::stats::normal_cdf(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latency_db::builtin_profiles;
    use crate::network::default_institutions;
    use crate::rng::{day_rng, StreamPurpose};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scenario_weights_validate() {
        assert!(validate_scenarios(&default_scenarios()).is_ok());
        let mut bad = default_scenarios();
        bad[0].weight = 0.5;
        assert!(matches!(
            validate_scenarios(&bad),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn scenario_frequencies_match_weights() {
        let scenarios = default_scenarios();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut crash = 0u32;
        for _ in 0..n {
            if sample_scenario(&scenarios, &mut rng).unwrap().name == "crash" {
                crash += 1;
            }
        }
        let freq = crash as f64 / n as f64;
        assert!((freq - 0.019).abs() < 0.004, "crash freq {freq}");
    }

    #[test]
    fn single_scenario_always_selected() {
        let mut only = default_scenarios().remove(0);
        only.weight = 1.0;
        let scenarios = vec![only];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(
                sample_scenario(&scenarios, &mut rng).unwrap().name,
                "normal"
            );
        }
    }

    #[test]
    fn scenario_draws_reproducible() {
        let scenarios = default_scenarios();
        let seq = |seed: u64| -> Vec<String> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..1000)
                .map(|_| sample_scenario(&scenarios, &mut rng).unwrap().name.clone())
                .collect()
        };
        assert_eq!(seq(42), seq(42));
        assert_ne!(seq(42), seq(43));
    }

    #[test]
    fn intraday_rate_normalises_to_daily_volume() {
        let tod = TimeOfDayProfile::default();
        tod.validate().unwrap();
        let volume = 1_166_400.0; // 13.5 TPS average
        let n = 24_000;
        let h = 24.0 / n as f64;
        let mut integral = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            integral += intraday_rate(x, &tod, volume) * 3600.0 * h;
        }
        assert!((integral - volume).abs() / volume < 0.001, "{integral}");
    }

    #[test]
    fn intraday_peak_anchors() {
        // Institutional business peak: ~35 TPS at 10:00 on a normal day,
        // 60.2 TPS at the peak-season volume (both at the Big-4 average
        // institutional share of daily volume).
        let tod = TimeOfDayProfile::default();
        let normal_volume = 13.5 * 86_400.0;
        let normal_peak = intraday_rate(10.0, &tod, normal_volume);
        assert!((normal_peak - 35.0).abs() < 0.5, "{normal_peak}");
        let xmas_volume = normal_volume * 8_900_000.0 / 5_200_000.0;
        let xmas_peak = intraday_rate(10.0, &tod, xmas_volume);
        assert!((xmas_peak - 60.2).abs() < 0.05, "{xmas_peak}");
        // The business peak is the global hourly maximum.
        let peak_hour = (0..24)
            .max_by(|&a, &b| {
                intraday_rate(a as f64, &tod, normal_volume)
                    .partial_cmp(&intraday_rate(b as f64, &tod, normal_volume))
                    .unwrap()
            })
            .unwrap();
        assert_eq!(peak_hour, 10);
    }

    #[test]
    fn generate_day_exact_count_and_rerouting() {
        let scenarios = default_scenarios();
        let cfg = TrafficConfig::default();
        let tod = TimeOfDayProfile::default();
        let institutions = default_institutions();
        let mut rng = day_rng(42, 0, StreamPurpose::Traffic);
        let txs = generate_day(&scenarios[0], 10_000, &cfg, &tod, &institutions, &mut rng).unwrap();
        assert_eq!(txs.len(), 10_000);
        for t in &txs {
            if t.route == Route::Npp {
                assert!(t.amount_aud <= cfg.high_value_threshold_aud);
            }
        }
        // About 1% rerouted at the default amount distribution.
        let rerouted = txs.iter().filter(|t| t.route == Route::Rtgs).count();
        assert!(
            (0.003..0.03).contains(&(rerouted as f64 / 10_000.0)),
            "{rerouted}"
        );
    }

    #[test]
    fn reconnect_flag_frequency() {
        let scenarios = default_scenarios();
        let cfg = TrafficConfig::default();
        let tod = TimeOfDayProfile::default();
        let institutions = default_institutions();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut flagged = 0u64;
        let n = 1_000_000u64;
        let mut done = 0u64;
        while done < n {
            let take = (n - done).min(100_000);
            let txs =
                generate_day(&scenarios[0], take, &cfg, &tod, &institutions, &mut rng).unwrap();
            flagged += txs.iter().filter(|t| t.tls_reconnect).count() as u64;
            done += take;
        }
        let freq = flagged as f64 / n as f64;
        assert!((freq - 0.001).abs() < 0.0005, "reconnect freq {freq}");
    }

    #[test]
    fn byte_identical_streams_for_same_seed() {
        let scenarios = default_scenarios();
        let cfg = TrafficConfig::default();
        let tod = TimeOfDayProfile::default();
        let institutions = default_institutions();
        let gen = || {
            let mut rng = day_rng(42, 3, StreamPurpose::Traffic);
            generate_day(&scenarios[1], 5_000, &cfg, &tod, &institutions, &mut rng).unwrap()
        };
        assert_eq!(gen(), gen());
    }

    #[test]
    fn payid_analytic_and_sample_mean() {
        let analytic = PAYID_DIST.mean();
        assert!((analytic - 8.25).abs() < 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| payid_latency(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 8.25).abs() < 0.05, "{mean}");
    }

    #[test]
    fn payid_sigma_zero_variant() {
        let p = LogNormalParams {
            mu_ln: 2.0,
            sigma_ln: 0.0,
        };
        assert!((p.mean() - 7.389).abs() < 0.001);
    }

    #[test]
    fn reconnect_overhead_keyed_by_exact_name() {
        let profiles = builtin_profiles();
        assert_eq!(
            tls_reconnect_overhead("Falcon-512", &profiles).unwrap(),
            0.9
        );
        assert_eq!(
            tls_reconnect_overhead("SPHINCS+-SHA2-128s", &profiles).unwrap(),
            276.8
        );
        assert_eq!(
            tls_reconnect_overhead("ECDSA-P256", &profiles).unwrap(),
            0.0
        );
        // Regression: underscore-format keys must fail loudly, not return 0.
        assert!(matches!(
            tls_reconnect_overhead("ML_DSA_65", &profiles),
            Err(crate::Error::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn amount_high_value_fraction_near_one_percent() {
        let frac = amount_dist_check(&TrafficConfig::default());
        assert!((frac - 0.01).abs() < 0.003, "{frac}");
    }

    #[test]
    fn scenario_mixture_within_binomial_bounds() {
        let scenarios = default_scenarios();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 20_000usize;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..n {
            *counts
                .entry(sample_scenario(&scenarios, &mut rng).unwrap().name.clone())
                .or_insert(0usize) += 1;
        }
        for s in &scenarios {
            let freq = counts.get(&s.name).copied().unwrap_or(0) as f64 / n as f64;
            let sigma = (s.weight * (1.0 - s.weight) / n as f64).sqrt();
            assert!(
                (freq - s.weight).abs() < 3.0 * sigma + 1e-9,
                "{}: {freq} vs {}",
                s.name,
                s.weight
            );
        }
    }
}

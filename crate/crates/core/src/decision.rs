//! Deterministic decision analytics: dilution index, message-format
//! compliance, multi-route p99 composition, HNDL actuarial exposure, volume
//! projection, storage cost, migration cost phases and SLA headroom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latency_db::AlgorithmProfile;
use crate::queueing::QueueAssessment;

/// Dilution threshold below which algorithm choice is operationally
/// irrelevant for latency.
pub const CDI_THRESHOLD: f64 = 0.04;

#[derive(Debug, Clone, Serialize)]
pub struct CdiRecord {
    pub algo: String,
    pub delta_p99_ms: f64,
    pub p99_e2e_ms: f64,
    pub cdi: f64,
    pub passes_threshold: bool,
}

/// `CDI = delta_p99 / p99_e2e`, flagged against the threshold.
pub fn cdi(algo: &str, delta_p99_ms: f64, p99_e2e_ms: f64, threshold: f64) -> Result<CdiRecord> {
    if !(p99_e2e_ms > 0.0) {
        return Err(Error::domain("cdi needs p99_e2e > 0"));
    }
    if !(delta_p99_ms >= 0.0) {
        return Err(Error::domain("cdi needs delta >= 0"));
    }
    let value = delta_p99_ms / p99_e2e_ms;
    Ok(CdiRecord {
        algo: algo.to_string(),
        delta_p99_ms,
        p99_e2e_ms,
        cdi: value,
        passes_threshold: value < threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormatLimit {
    SwiftMt2048,
    NppPayid65536,
    TlsRecord16384,
}

impl FormatLimit {
    pub const ALL: [FormatLimit; 3] = [
        FormatLimit::SwiftMt2048,
        FormatLimit::NppPayid65536,
        FormatLimit::TlsRecord16384,
    ];

    pub fn bytes(self) -> u64 {
        match self {
            FormatLimit::SwiftMt2048 => 2048,
            FormatLimit::NppPayid65536 => 65_536,
            FormatLimit::TlsRecord16384 => 16_384,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FormatLimit::SwiftMt2048 => "SWIFT_MT_2048",
            FormatLimit::NppPayid65536 => "NPP_PAYID_65536",
            FormatLimit::TlsRecord16384 => "TLS_RECORD_16384",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    /// The signature alone exceeds the limit.
    SigFail,
    /// The signature fits but public key + signature(s) does not.
    CombinedFail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::SigFail => "SIG_FAIL",
            Verdict::CombinedFail => "COMBINED_FAIL",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormatVerdict {
    pub limit: FormatLimit,
    pub verdict: Verdict,
    pub sig_bytes: u64,
    pub combined_bytes: u64,
}

/// Verdicts for the three message-format limits. Hybrid mode adds the
/// linked classical signature to the combined size.
pub fn format_compliance(
    profile: &AlgorithmProfile,
    all_profiles: &[AlgorithmProfile],
) -> Vec<FormatVerdict> {
    let combined = profile.combined_bytes(all_profiles);
    FormatLimit::ALL
        .iter()
        .map(|&limit| {
            let verdict = if profile.sig_bytes > limit.bytes() {
                Verdict::SigFail
            } else if combined > limit.bytes() {
                Verdict::CombinedFail
            } else {
                Verdict::Pass
            };
            FormatVerdict {
                limit,
                verdict,
                sig_bytes: profile.sig_bytes,
                combined_bytes: combined,
            }
        })
        .collect()
}

/// Route-level constants: fixed overheads, SLA and per-institution load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSpec {
    pub name: String,
    pub network_ms: f64,
    pub processing_ms: f64,
    pub sla_ms: f64,
    pub per_institution_lambda_tps: f64,
}

impl RouteSpec {
    pub fn fixed_overhead_ms(&self) -> f64 {
        self.network_ms + self.processing_ms
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteP99 {
    pub route: String,
    pub algo: String,
    pub sign_p99_ms: f64,
    pub route_p99_ms: f64,
    pub delta_vs_baseline_ms: f64,
    pub cdi_route: f64,
    pub sla_pass: bool,
}

/// Route p99 = signing p99 + fixed overhead + mean queue wait;
/// `CDI_route = delta / route p99`; SLA verdict against the route threshold.
pub fn route_p99(
    route: &RouteSpec,
    algo: &str,
    sign_p99_ms: f64,
    baseline_sign_p99_ms: f64,
    queue: &QueueAssessment,
) -> RouteP99 {
    let wait_ms = queue.mean_wait_us / 1000.0;
    let total = sign_p99_ms + route.fixed_overhead_ms() + wait_ms;
    let delta = sign_p99_ms - baseline_sign_p99_ms;
    RouteP99 {
        route: route.name.clone(),
        algo: algo.to_string(),
        sign_p99_ms,
        route_p99_ms: total,
        delta_vs_baseline_ms: delta,
        cdi_route: delta / total,
        sla_pass: total <= route.sla_ms,
    }
}

/// The signing-component p99 used in route composition: classical baseline
/// p99 plus the published NPP delta for ordinary profiles; the direct
/// lognormal signing p99 for slow profiles whose NPP delta encodes the
/// saturation sentinel.
pub fn route_sign_p99_ms(
    profile: &AlgorithmProfile,
    ecdsa_sign_p99_ms: f64,
    sphincs_direct_sign_p99_ms: f64,
) -> f64 {
    if profile.name.starts_with("SPHINCS") {
        sphincs_direct_sign_p99_ms
    } else {
        ecdsa_sign_p99_ms + profile.delta_p99_ref_ms.unwrap_or(0.0)
    }
}

/// Per-transaction overhead of batch signing: `sign_ms / batch_size`.
pub fn becs_amortised(sign_ms: f64, batch_size: u64) -> Result<f64> {
    if batch_size < 1 {
        return Err(Error::domain("becs_amortised needs batch_size >= 1"));
    }
    Ok(sign_ms / batch_size as f64)
}

/// Geometric volume projection, rounding each year to whole transactions
/// and compounding on the rounded value. Index 0 is the base volume.
pub fn volume_projection(base_tx_per_day: u64, rate: f64, years: u32) -> Result<Vec<u64>> {
    if base_tx_per_day == 0 {
        return Err(Error::domain("volume_projection needs base > 0"));
    }
    let mut series = Vec::with_capacity(years as usize + 1);
    let mut current = base_tx_per_day;
    series.push(current);
    for _ in 0..years {
        current = ((current as f64) * (1.0 + rate)).round() as u64;
        series.push(current);
    }
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exposure {
    Yes,
    No,
    Partial,
}

#[derive(Debug, Clone, Serialize)]
pub struct HndlRow {
    pub year: u32,
    pub tx_per_day: u64,
    pub records: u64,
    pub retained_until: u32,
    pub exposed: Exposure,
    /// Running sum of fully exposed records.
    pub cumulative: u64,
    /// Expected records under partial exposure (only set on partial years).
    pub expected_partial: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HndlConfig {
    pub base_year: u32,
    pub base_volume: u64,
    pub growth_rate: f64,
    pub crqc_year: u32,
    pub retention_years: u32,
    pub days_per_year: u32,
    /// Expected fraction of the emergence-year records exposed under a
    /// uniformly distributed emergence date.
    pub partial_fraction: f64,
    pub bytes_per_record_low: u64,
    pub bytes_per_record_high: u64,
    pub usd_per_gb_month: f64,
}

impl Default for HndlConfig {
    fn default() -> Self {
        HndlConfig {
            base_year: 2026,
            base_volume: 5_200_000,
            growth_rate: 0.156,
            crqc_year: 2030,
            retention_years: 7,
            days_per_year: 365,
            partial_fraction: 0.5,
            bytes_per_record_low: 1_000,
            bytes_per_record_high: 2_000,
            usd_per_gb_month: 0.004,
        }
    }
}

/// Retained-records exposure: a year is fully exposed iff its retention
/// window crosses the CRQC year and it precedes it; the CRQC year itself is
/// partial.
pub fn hndl_exposure(cfg: &HndlConfig) -> Result<Vec<HndlRow>> {
    if cfg.crqc_year < cfg.base_year {
        return Err(Error::domain("hndl_exposure needs crqc_year >= base_year"));
    }
    let years = cfg.crqc_year - cfg.base_year;
    let volumes = volume_projection(cfg.base_volume, cfg.growth_rate, years)?;
    let mut rows = Vec::with_capacity(volumes.len());
    let mut cumulative = 0u64;
    for (i, &tx_per_day) in volumes.iter().enumerate() {
        let year = cfg.base_year + i as u32;
        let records = tx_per_day * cfg.days_per_year as u64;
        let exposed = if year == cfg.crqc_year {
            Exposure::Partial
        } else if year + cfg.retention_years > cfg.crqc_year && year < cfg.crqc_year {
            Exposure::Yes
        } else {
            Exposure::No
        };
        if exposed == Exposure::Yes {
            cumulative += records;
        }
        rows.push(HndlRow {
            year,
            tx_per_day,
            records,
            retained_until: year + cfg.retention_years,
            exposed,
            cumulative,
            expected_partial: (exposed == Exposure::Partial)
                .then(|| (records as f64 * cfg.partial_fraction).round() as u64),
        });
    }
    Ok(rows)
}

/// Annual cold-storage cost of a record harvest:
/// `records * bytes -> GB * price * 12` (decimal gigabytes).
pub fn storage_cost_usd_per_year(
    records: u64,
    bytes_per_record: u64,
    usd_per_gb_month: f64,
) -> Result<f64> {
    if !(usd_per_gb_month >= 0.0) {
        return Err(Error::domain("storage cost needs non-negative price"));
    }
    let gb = records as f64 * bytes_per_record as f64 / 1.0e9;
    Ok(gb * usd_per_gb_month * 12.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct MigrationPhase {
    pub phase: u32,
    pub year_label: String,
    pub activities: String,
    pub annual_cost_musd: f64,
    pub becs_fraction: f64,
    /// +/-50% sensitivity bounds, populated for the CAPEX peak phase.
    pub sensitivity_musd: Option<(f64, f64)>,
}

/// The four-phase migration cost schedule with sensitivity bounds.
/// These are parametric estimates from public list prices, not quotes.
pub fn migration_cost_table() -> Vec<MigrationPhase> {
    vec![
        MigrationPhase {
            phase: 0,
            year_label: "2025 (pre-migration baseline)".into(),
            activities: "Existing classical-only operations; no change".into(),
            annual_cost_musd: 90.0,
            becs_fraction: 0.35,
            sensitivity_musd: None,
        },
        MigrationPhase {
            phase: 1,
            year_label: "2026 (hybrid deploy)".into(),
            activities: "HSM upgrades, dual-stack deployment".into(),
            annual_cost_musd: 21.4,
            becs_fraction: 0.28,
            sensitivity_musd: Some((10.7, 32.1)),
        },
        MigrationPhase {
            phase: 2,
            year_label: "2027 (selective rollout)".into(),
            activities: "NPP post-quantum live, batch-channel migration".into(),
            annual_cost_musd: 7.6,
            becs_fraction: 0.15,
            sensitivity_musd: None,
        },
        MigrationPhase {
            phase: 3,
            year_label: "2028 (full rollout, ongoing)".into(),
            activities: "All channels migrated, legacy retired".into(),
            annual_cost_musd: 1.5,
            becs_fraction: 0.05,
            sensitivity_musd: None,
        },
    ]
}

/// Big-4 and regional shares of the CAPEX peak phase (millions USD).
pub const PHASE1_BIG4_EACH_MUSD: f64 = 3.7;
pub const PHASE1_BIG4_COUNT: u32 = 4;
pub const PHASE1_REGIONAL_EACH_MUSD: f64 = 0.733;
pub const PHASE1_REGIONAL_COUNT: u32 = 9;

/// `sla - p99`; negative when the SLA is breached.
pub fn sla_headroom_ms(p99_ms: f64, sla_ms: f64) -> f64 {
    sla_ms - p99_ms
}

/// Default route constants (the RITS/SWIFT SLAs and fixed overheads are
/// operating assumptions, configurable rather than hard-coded).
pub fn default_routes() -> Vec<RouteSpec> {
    vec![
        RouteSpec {
            name: "NPP".into(),
            network_ms: 0.0,
            processing_ms: 0.0,
            sla_ms: 2_000.0,
            per_institution_lambda_tps: 13.5,
        },
        RouteSpec {
            name: "RITS".into(),
            network_ms: 14.0,
            processing_ms: 263.0,
            sla_ms: 30_000.0,
            per_institution_lambda_tps: 0.022,
        },
        RouteSpec {
            name: "SWIFT".into(),
            network_ms: 192.0,
            processing_ms: 645.0,
            sla_ms: 86_400_000.0,
            per_institution_lambda_tps: 0.001,
        },
    ]
}

/// Parameters for the deterministic route/CDI tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecisionConfig {
    /// Classical baseline per-transaction signing p99 (ms).
    pub ecdsa_sign_p99_ms: f64,
    /// Direct signing p99 for the slow hash-based profile (ms).
    pub sphincs_direct_sign_p99_ms: f64,
    pub cdi_threshold: f64,
    /// Use the 65-byte SEC1-encoded public key for the classical profile.
    pub sec1_pubkey: bool,
    /// Reference classical end-to-end NPP p99 (ms) for reference CDI tables.
    pub reference_baseline_p99_ms: f64,
    /// Non-crypto route p99 (ms) used by the degraded-mode comparison
    /// (network excluding the addressing lookup).
    pub degraded_base_p99_ms: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            ecdsa_sign_p99_ms: 0.15,
            sphincs_direct_sign_p99_ms: 297.0,
            cdi_threshold: CDI_THRESHOLD,
            sec1_pubkey: false,
            reference_baseline_p99_ms: 43.39,
            degraded_base_p99_ms: 25.74,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latency_db::{builtin_profiles, SigningMode};
    use crate::queueing::{mmc_assess, QueueParams};

    fn profile(name: &str) -> AlgorithmProfile {
        builtin_profiles()
            .into_iter()
            .find(|p| p.name == name)
            .unwrap()
    }

    #[test]
    fn cdi_published_rows() {
        let r = cdi("Falcon-512", 0.30, 43.69, CDI_THRESHOLD).unwrap();
        assert!((r.cdi - 0.0069).abs() < 5e-5);
        assert!(r.passes_threshold);

        let r = cdi("ML-DSA-65-Hybrid", 1.69, 45.08, CDI_THRESHOLD).unwrap();
        assert!((r.cdi - 0.0375).abs() < 5e-5);
        assert!(r.passes_threshold);

        let r = cdi("SPHINCS+-SHA2-128s", 9986.5, 10_029.93, CDI_THRESHOLD).unwrap();
        assert!((r.cdi - 0.9957).abs() < 5e-5);
        assert!(!r.passes_threshold);

        let r = cdi("ECDSA-P256", 0.0, 43.39, CDI_THRESHOLD).unwrap();
        assert_eq!(r.cdi, 0.0);
        assert!(r.passes_threshold);
    }

    #[test]
    fn cdi_monotone_in_delta() {
        let mut prev = -1.0;
        for delta in [0.0, 0.3, 0.9, 1.69, 5.0] {
            let r = cdi("x", delta, 43.39, CDI_THRESHOLD).unwrap();
            assert!(r.cdi > prev);
            prev = r.cdi;
        }
    }

    #[test]
    fn format_matrix_reproduces_published_verdicts() {
        let profiles = builtin_profiles();
        let expect_swift = [
            ("ECDSA-P256", Verdict::Pass),
            ("Falcon-512", Verdict::Pass),
            ("ML-DSA-44", Verdict::SigFail),
            ("ML-DSA-65", Verdict::SigFail),
            ("ML-DSA-87", Verdict::SigFail),
            ("Falcon-1024", Verdict::CombinedFail),
            ("ML-DSA-65-Hybrid", Verdict::SigFail),
            ("SPHINCS+-SHA2-128s", Verdict::SigFail),
        ];
        for (name, want) in expect_swift {
            let p = profile(name);
            let verdicts = format_compliance(&p, &profiles);
            let swift = verdicts
                .iter()
                .find(|v| v.limit == FormatLimit::SwiftMt2048)
                .unwrap();
            assert_eq!(swift.verdict, want, "{name}");
            // Everything fits PayID and TLS record limits.
            for v in &verdicts {
                if v.limit != FormatLimit::SwiftMt2048 {
                    assert_eq!(v.verdict, Verdict::Pass, "{name} {:?}", v.limit);
                }
            }
        }
        // Falcon-1024: signature fits, combined 3,073 B does not.
        let f1024 = profile("Falcon-1024");
        let v = format_compliance(&f1024, &profiles);
        assert_eq!(v[0].combined_bytes, 3073);
        // Hybrid combined adds the classical signature: 5,317 B.
        let hybrid = profile("ML-DSA-65-Hybrid");
        let v = format_compliance(&hybrid, &profiles);
        assert_eq!(v[0].combined_bytes, 5317);
        // Falcon-512 fits the hard limit.
        assert_eq!(profile("Falcon-512").combined_bytes(&profiles), 1563);
    }

    #[test]
    fn format_verdicts_are_exclusive() {
        let profiles = builtin_profiles();
        for p in &profiles {
            for v in format_compliance(p, &profiles) {
                let sig_fail = p.sig_bytes > v.limit.bytes();
                let combined_fail = !sig_fail && v.combined_bytes > v.limit.bytes();
                let expected = if sig_fail {
                    Verdict::SigFail
                } else if combined_fail {
                    Verdict::CombinedFail
                } else {
                    Verdict::Pass
                };
                assert_eq!(v.verdict, expected);
            }
        }
    }

    #[test]
    fn route_composition_published_rows() {
        let routes = default_routes();
        let rits = routes.iter().find(|r| r.name == "RITS").unwrap();
        let swift = routes.iter().find(|r| r.name == "SWIFT").unwrap();
        let dc = DecisionConfig::default();

        let quiet = |profile: &AlgorithmProfile, lambda: f64| {
            mmc_assess(QueueParams {
                lambda,
                mu: profile.service_rate(),
                c: 2,
            })
        };

        let ecdsa = profile("ECDSA-P256");
        let q = quiet(&ecdsa, rits.per_institution_lambda_tps);
        let r = route_p99(rits, &ecdsa.name, 0.15, 0.15, &q);
        assert!((r.route_p99_ms - 277.15).abs() < 0.01, "{}", r.route_p99_ms);
        assert!(r.sla_pass);

        let sphincs = profile("SPHINCS+-SHA2-128s");
        let q = quiet(&sphincs, rits.per_institution_lambda_tps);
        assert!(!q.saturated); // rho ~ 0.003 at RITS volumes
        let sign = route_sign_p99_ms(
            &sphincs,
            dc.ecdsa_sign_p99_ms,
            dc.sphincs_direct_sign_p99_ms,
        );
        let r = route_p99(rits, &sphincs.name, sign, 0.15, &q);
        assert!((r.route_p99_ms - 574.0).abs() < 0.01, "{}", r.route_p99_ms);
        assert!((r.cdi_route - 0.5172).abs() < 1e-4, "{}", r.cdi_route);
        assert!(r.sla_pass);

        let hybrid = profile("ML-DSA-65-Hybrid");
        let q = quiet(&hybrid, swift.per_institution_lambda_tps);
        let sign = route_sign_p99_ms(&hybrid, dc.ecdsa_sign_p99_ms, dc.sphincs_direct_sign_p99_ms);
        let r = route_p99(swift, &hybrid.name, sign, 0.15, &q);
        assert!((r.route_p99_ms - 838.84).abs() < 0.01, "{}", r.route_p99_ms);
        assert!((r.cdi_route - 0.002015).abs() < 1e-5, "{}", r.cdi_route);
        assert!(r.sla_pass);
    }

    #[test]
    fn route_cdi_ordering_dilutes_with_baseline() {
        // CDI_NPP > CDI_RITS > CDI_SWIFT for every fast profile.
        let routes = default_routes();
        let dc = DecisionConfig::default();
        for p in builtin_profiles() {
            if p.name.starts_with("SPHINCS") || p.mode == SigningMode::Classical {
                continue;
            }
            let sign = route_sign_p99_ms(&p, dc.ecdsa_sign_p99_ms, dc.sphincs_direct_sign_p99_ms);
            let mut cdis = Vec::new();
            for route in &routes {
                let q = mmc_assess(QueueParams {
                    lambda: route.per_institution_lambda_tps,
                    mu: p.service_rate(),
                    c: 2,
                });
                let npp_e2e_base = dc.reference_baseline_p99_ms + p.delta_p99_ref_ms.unwrap();
                let r = if route.name == "NPP" {
                    // NPP CDI uses the end-to-end p99 denominator.
                    cdi(
                        &p.name,
                        p.delta_p99_ref_ms.unwrap(),
                        npp_e2e_base,
                        dc.cdi_threshold,
                    )
                    .unwrap()
                    .cdi
                } else {
                    route_p99(route, &p.name, sign, dc.ecdsa_sign_p99_ms, &q).cdi_route
                };
                cdis.push(r);
            }
            assert!(
                cdis[0] > cdis[1] && cdis[1] > cdis[2],
                "{}: {cdis:?}",
                p.name
            );
        }
    }

    #[test]
    fn becs_amortisation() {
        assert!((becs_amortised(0.28, 1000).unwrap() - 0.00028).abs() < 1e-12);
        assert_eq!(becs_amortised(7.5, 1).unwrap(), 7.5);
        assert!((becs_amortised(0.28, 50_000).unwrap() - 5.6e-6).abs() < 1e-12);
        assert!(becs_amortised(1.0, 0).is_err());
    }

    #[test]
    fn volume_projection_published_years() {
        let series = volume_projection(5_200_000, 0.156, 4).unwrap();
        assert_eq!(series[0], 5_200_000);
        assert_eq!(series[1], 6_011_200); // 2027
        assert_eq!(series[2], 6_948_947); // 2028
        assert_eq!(series[3], 8_032_983); // 2029
        let flat = volume_projection(1000, 0.0, 3).unwrap();
        assert!(flat.iter().all(|&v| v == 1000));
    }

    #[test]
    fn hndl_reproduces_published_rows() {
        let rows = hndl_exposure(&HndlConfig::default()).unwrap();
        assert_eq!(rows.len(), 5);
        let expected = [
            (
                2026,
                5_200_000u64,
                1_898_000_000u64,
                2033,
                Exposure::Yes,
                1_898_000_000u64,
            ),
            (
                2027,
                6_011_200,
                2_194_088_000,
                2034,
                Exposure::Yes,
                4_092_088_000,
            ),
            (
                2028,
                6_948_947,
                2_536_365_655,
                2035,
                Exposure::Yes,
                6_628_453_655,
            ),
            (
                2029,
                8_032_983,
                2_932_038_795,
                2036,
                Exposure::Yes,
                9_560_492_450,
            ),
        ];
        for (i, (year, tx, records, until, exposed, cumulative)) in expected.iter().enumerate() {
            let r = &rows[i];
            assert_eq!(r.year, *year);
            assert_eq!(r.tx_per_day, *tx);
            assert_eq!(r.records, *records);
            assert_eq!(r.retained_until, *until);
            assert_eq!(r.exposed, *exposed);
            assert_eq!(r.cumulative, *cumulative);
        }
        let partial = &rows[4];
        assert_eq!(partial.year, 2030);
        assert_eq!(partial.exposed, Exposure::Partial);
        assert_eq!(partial.cumulative, 9_560_492_450);
        assert_eq!(
            partial.expected_partial,
            Some((partial.records as f64 * 0.5).round() as u64)
        );
    }

    #[test]
    fn hndl_zero_retention_exposes_nothing() {
        let cfg = HndlConfig {
            retention_years: 0,
            ..HndlConfig::default()
        };
        let rows = hndl_exposure(&cfg).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.exposed != Exposure::Yes || r.cumulative == 0));
        assert_eq!(rows.last().unwrap().cumulative, 0);
    }

    #[test]
    fn storage_cost_published_range() {
        let records = 9_560_492_450u64;
        let low = storage_cost_usd_per_year(records, 1_000, 0.004).unwrap();
        let high = storage_cost_usd_per_year(records, 2_000, 0.004).unwrap();
        assert!((low - 459.0).abs() <= 1.0, "{low}");
        assert!((high - 918.0).abs() <= 1.0, "{high}");
        assert_eq!(storage_cost_usd_per_year(0, 1000, 0.004).unwrap(), 0.0);
    }

    #[test]
    fn migration_phases() {
        let phases = migration_cost_table();
        assert_eq!(phases.len(), 4);
        let p1 = &phases[1];
        assert_eq!(p1.annual_cost_musd, 21.4);
        assert_eq!(p1.sensitivity_musd, Some((10.7, 32.1)));
        let big4 = PHASE1_BIG4_EACH_MUSD * PHASE1_BIG4_COUNT as f64;
        assert!((big4 - 14.8).abs() < 1e-9);
        let regionals = PHASE1_REGIONAL_EACH_MUSD * PHASE1_REGIONAL_COUNT as f64;
        assert!((regionals - 6.6).abs() < 0.01);
    }

    #[test]
    fn headroom_examples() {
        assert!((sla_headroom_ms(44.6, 2000.0) - 1955.4).abs() < 1e-9);
        assert_eq!(sla_headroom_ms(2000.0, 2000.0), 0.0);
        assert!((sla_headroom_ms(10_029.93, 2000.0) + 8_029.93).abs() < 1e-9);
    }
}

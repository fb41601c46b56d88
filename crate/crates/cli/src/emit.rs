//! Table emitters. Every table is built as pre-rounded rows and written to
//! CSV and/or JSON from the same values, so the two formats are numerically
//! identical. Milliseconds carry 2 decimals, fractions 4, counts unrounded.

use serde_json::json;

use pqsla_core::analysis::AnalysisReport;
use pqsla_core::decision::{
    becs_amortised, cdi, format_compliance, hndl_exposure, migration_cost_table, route_p99,
    route_sign_p99_ms, sla_headroom_ms, storage_cost_usd_per_year, volume_projection, Exposure,
    FormatLimit, PHASE1_BIG4_COUNT, PHASE1_BIG4_EACH_MUSD, PHASE1_REGIONAL_COUNT,
    PHASE1_REGIONAL_EACH_MUSD,
};
use pqsla_core::engine::CorpusResult;
use pqsla_core::latency_db::SigningMode;
use pqsla_core::queueing::{
    degraded_compare, hourly_profile, min_servers, mmc_assess, psa_safety_margin,
    saturation_boundary, tps_sweep, MinServerCriterion, QueueParams,
};
use pqsla_core::{Result, SimConfig};

use crate::commands::Outputs;
use crate::corpus_io::csv_err;

pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

pub fn round4(v: f64) -> f64 {
    (v * 10_000.0).round() / 10_000.0
}

fn fmt(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Write one table as CSV and/or JSON from identical row objects.
fn write_table(
    out: &Outputs,
    name: &str,
    columns: &[&str],
    rows: &[serde_json::Value],
) -> Result<()> {
    if out.csv {
        let path = out.path(&format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(columns).map_err(csv_err)?;
        for row in rows {
            let record: Vec<String> = columns.iter().map(|c| fmt(&row[*c])).collect();
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush()?;
    }
    if out.json {
        let path = out.path(&format!("{name}.json"));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(rows).expect("serializable"),
        )?;
    }
    Ok(())
}

fn mode_label(mode: SigningMode) -> &'static str {
    match mode {
        SigningMode::Classical => "classical",
        SigningMode::PqcOnly => "pqc-only",
        SigningMode::Hybrid => "hybrid",
    }
}

pub fn write_percentile_table(out: &Outputs, cfg: &SimConfig, corpus: &CorpusResult) -> Result<()> {
    let rows: Vec<serde_json::Value> = corpus
        .algos
        .iter()
        .map(|a| {
            let mode = cfg
                .algorithms
                .iter()
                .find(|p| p.name == a.algo)
                .map(|p| mode_label(p.mode))
                .unwrap_or("unknown");
            json!({
                "algorithm": a.algo,
                "mode": mode,
                "p50_ms": round2(a.mean_daily_p50_ms),
                "p95_ms": round2(a.mean_daily_p95_ms),
                "p99_ms": round2(a.mean_daily_p99_ms),
                "ci95_lo_ms": round2(a.ci95_mean_daily_p99.0),
                "ci95_hi_ms": round2(a.ci95_mean_daily_p99.1),
                "delta_p99_ms": round2(a.delta_p99_ms),
                "sla_compliance": round4(a.overall_compliance),
                "npp_violations": a.npp_violations,
                "npp_transactions": a.npp_transactions,
            })
        })
        .collect();
    write_table(
        out,
        "table2_percentiles",
        &[
            "algorithm",
            "mode",
            "p50_ms",
            "p95_ms",
            "p99_ms",
            "ci95_lo_ms",
            "ci95_hi_ms",
            "delta_p99_ms",
            "sla_compliance",
            "npp_violations",
            "npp_transactions",
        ],
        &rows,
    )
}

pub fn write_analysis(out: &Outputs, analysis: &AnalysisReport) -> Result<()> {
    for r in &analysis.gev {
        if r.report.ci999.degraded() || r.report.ci9999.degraded() {
            eprintln!(
                "warning: {}: more than 10% of bootstrap resamples failed to refit;                  the GEV confidence intervals are degraded",
                r.algo
            );
        }
    }
    let gev_rows: Vec<serde_json::Value> = analysis
        .gev
        .iter()
        .map(|r| {
            json!({
                "algorithm": r.algo,
                "block_mode": format!("{:?}", r.mode),
                "n_blocks": r.n_blocks,
                "xi": round4(r.report.fit.xi),
                "loc_ms": round2(r.report.fit.loc),
                "scale_ms": round2(r.report.fit.scale),
                "q99_ms": round2(r.report.q99),
                "q999_ms": round2(r.report.q999),
                "ci999_lo_ms": round2(r.report.ci999.lo),
                "ci999_hi_ms": round2(r.report.ci999.hi),
                "q9999_ms": round2(r.report.q9999),
                "ci9999_lo_ms": round2(r.report.ci9999.lo),
                "ci9999_hi_ms": round2(r.report.ci9999.hi),
                "tail_class": r.report.tail_class.label(),
                "indicative": r.report.indicative,
                "bootstrap_failures": r.report.ci999.n_failures + r.report.ci9999.n_failures,
            })
        })
        .collect();
    write_table(
        out,
        "gev",
        &[
            "algorithm",
            "block_mode",
            "n_blocks",
            "xi",
            "loc_ms",
            "scale_ms",
            "q99_ms",
            "q999_ms",
            "ci999_lo_ms",
            "ci999_hi_ms",
            "q9999_ms",
            "ci9999_lo_ms",
            "ci9999_hi_ms",
            "tail_class",
            "indicative",
            "bootstrap_failures",
        ],
        &gev_rows,
    )?;

    let gof_rows: Vec<serde_json::Value> = analysis
        .gof
        .iter()
        .map(|r| {
            let delta = |name: &str| r.models.delta_aic(name).unwrap_or(f64::NAN);
            json!({
                "algorithm": r.algo,
                "n": r.n,
                "ks_stat": round4(r.gof.ks_stat),
                "ks_p": round4(r.gof.ks_p),
                "reject_ks": r.gof.reject_ks,
                "ad_stat": round4(r.gof.ad_stat),
                "ad_critical_5pct": r.gof.ad_critical_5pct,
                "reject_ad": r.gof.reject_ad,
                "best_model": r.models.best().map(|b| b.name).unwrap_or("none"),
                "delta_aic_lognormal": round2(delta("lognormal")),
                "delta_aic_gamma": round2(delta("gamma")),
                "delta_aic_weibull": round2(delta("weibull")),
                "delta_aic_inverse_gaussian": round2(delta("inverse-gaussian")),
            })
        })
        .collect();
    write_table(
        out,
        "gof",
        &[
            "algorithm",
            "n",
            "ks_stat",
            "ks_p",
            "reject_ks",
            "ad_stat",
            "ad_critical_5pct",
            "reject_ad",
            "best_model",
            "delta_aic_lognormal",
            "delta_aic_gamma",
            "delta_aic_weibull",
            "delta_aic_inverse_gaussian",
        ],
        &gof_rows,
    )?;

    let effect_rows: Vec<serde_json::Value> = analysis
        .effects
        .iter()
        .map(|r| {
            json!({
                "algorithm": r.algo,
                "delta_p99_ms": round2(r.delta_p99_ms),
                "cohens_d": round4(r.effect.cohens_d.min(1.0e12)),
                "magnitude": r.effect.magnitude.label(),
                "mw_u": r.effect.mw_u,
                "mw_p": r.effect.mw_p,
                "sla_budget_pct": round4(r.sla_budget_fraction * 100.0),
            })
        })
        .collect();
    write_table(
        out,
        "effects",
        &[
            "algorithm",
            "delta_p99_ms",
            "cohens_d",
            "magnitude",
            "mw_u",
            "mw_p",
            "sla_budget_pct",
        ],
        &effect_rows,
    )?;

    let anova_rows: Vec<serde_json::Value> = analysis
        .anova
        .iter()
        .map(|r| {
            json!({
                "factor": r.factor,
                "scope": r.scope,
                "eta2": round4(r.eta2),
                "f_stat": round2(r.f_stat.min(1.0e15)),
            })
        })
        .collect();
    write_table(
        out,
        "anova",
        &["factor", "scope", "eta2", "f_stat"],
        &anova_rows,
    )
}

pub fn write_decision_tables(out: &Outputs, cfg: &SimConfig) -> Result<()> {
    let dc = &cfg.decision;
    let profiles = &cfg.algorithms;
    let baseline_delta = 0.0;

    // Dilution index at the published reference values.
    let cdi_rows: Vec<serde_json::Value> = profiles
        .iter()
        .map(|p| {
            let delta = p.delta_p99_ref_ms.unwrap_or(baseline_delta);
            let p99_e2e = dc.reference_baseline_p99_ms + delta;
            let rec = cdi(&p.name, delta, p99_e2e, dc.cdi_threshold)?;
            Ok(json!({
                "algorithm": rec.algo,
                "delta_p99_ms": round2(rec.delta_p99_ms),
                "p99_e2e_ms": round2(rec.p99_e2e_ms),
                "cdi": round4(rec.cdi),
                "cdi_pct": round2(rec.cdi * 100.0),
                "passes_threshold": rec.passes_threshold,
            }))
        })
        .collect::<Result<_>>()?;
    write_table(
        out,
        "cdi",
        &[
            "algorithm",
            "delta_p99_ms",
            "p99_e2e_ms",
            "cdi",
            "cdi_pct",
            "passes_threshold",
        ],
        &cdi_rows,
    )?;

    // Message-format matrix.
    let mut pk_override = profiles.clone();
    if dc.sec1_pubkey {
        for p in &mut pk_override {
            if p.mode == SigningMode::Classical && p.pk_bytes == 64 {
                p.pk_bytes = 65;
            }
        }
    }
    let format_rows: Vec<serde_json::Value> = pk_override
        .iter()
        .map(|p| {
            let verdicts = format_compliance(p, &pk_override);
            let by_limit = |l: FormatLimit| {
                verdicts
                    .iter()
                    .find(|v| v.limit == l)
                    .map(|v| v.verdict.label())
                    .unwrap_or("PASS")
            };
            json!({
                "algorithm": p.name,
                "pk_bytes": p.pk_bytes,
                "sig_bytes": p.sig_bytes,
                "combined_bytes": p.combined_bytes(&pk_override),
                "swift_mt_2048": by_limit(FormatLimit::SwiftMt2048),
                "npp_payid_65536": by_limit(FormatLimit::NppPayid65536),
                "tls_record_16384": by_limit(FormatLimit::TlsRecord16384),
            })
        })
        .collect();
    write_table(
        out,
        "formats",
        &[
            "algorithm",
            "pk_bytes",
            "sig_bytes",
            "combined_bytes",
            "swift_mt_2048",
            "npp_payid_65536",
            "tls_record_16384",
        ],
        &format_rows,
    )?;

    // Route composition for the non-NPP systems.
    let mut route_rows = Vec::new();
    for route in cfg.routes.iter().filter(|r| r.name != "NPP") {
        for p in profiles {
            let sign = route_sign_p99_ms(p, dc.ecdsa_sign_p99_ms, dc.sphincs_direct_sign_p99_ms);
            let queue = mmc_assess(QueueParams {
                lambda: route.per_institution_lambda_tps,
                mu: p.service_rate(),
                c: cfg.run.c_servers,
            });
            let r = route_p99(route, &p.name, sign, dc.ecdsa_sign_p99_ms, &queue);
            route_rows.push(json!({
                "route": r.route,
                "algorithm": r.algo,
                "sign_p99_ms": round2(r.sign_p99_ms),
                "route_p99_ms": round2(r.route_p99_ms),
                "delta_vs_baseline_ms": round2(r.delta_vs_baseline_ms),
                "cdi_route_pct": round4(r.cdi_route * 100.0),
                "sla_ms": route.sla_ms,
                "sla_pass": r.sla_pass,
            }));
        }
    }
    write_table(
        out,
        "routes",
        &[
            "route",
            "algorithm",
            "sign_p99_ms",
            "route_p99_ms",
            "delta_vs_baseline_ms",
            "cdi_route_pct",
            "sla_ms",
            "sla_pass",
        ],
        &route_rows,
    )?;

    // Retained-records exposure.
    let hndl_rows: Vec<serde_json::Value> = hndl_exposure(&cfg.hndl)?
        .iter()
        .map(|r| {
            json!({
                "year": r.year,
                "tx_per_day": r.tx_per_day,
                "records": r.records,
                "retained_until": r.retained_until,
                "exposed": match r.exposed {
                    Exposure::Yes => "yes",
                    Exposure::No => "no",
                    Exposure::Partial => "partial",
                },
                "cumulative_exposed": r.cumulative,
                "expected_partial": r.expected_partial,
            })
        })
        .collect();
    let hndl_cols = [
        "year",
        "tx_per_day",
        "records",
        "retained_until",
        "exposed",
        "cumulative_exposed",
        "expected_partial",
    ];
    write_table(out, "hndl", &hndl_cols, &hndl_rows)?;
    write_table(out, "table15_hndl", &hndl_cols, &hndl_rows)?;

    // Storage cost of a full harvest at the configured record sizes.
    let cumulative = hndl_exposure(&cfg.hndl)?
        .iter()
        .filter(|r| r.exposed == Exposure::Yes)
        .map(|r| r.records)
        .sum::<u64>();
    let storage_rows: Vec<serde_json::Value> = [
        ("low", cfg.hndl.bytes_per_record_low),
        ("high", cfg.hndl.bytes_per_record_high),
    ]
    .iter()
    .map(|(scope, bytes)| {
        let usd = storage_cost_usd_per_year(cumulative, *bytes, cfg.hndl.usd_per_gb_month)?;
        Ok(json!({
            "scope": scope,
            "records": cumulative,
            "bytes_per_record": bytes,
            "usd_per_year": round2(usd),
        }))
    })
    .collect::<Result<_>>()?;
    write_table(
        out,
        "storage",
        &["scope", "records", "bytes_per_record", "usd_per_year"],
        &storage_rows,
    )?;

    // Volume projection with SLA headroom at the reference worst-case p99.
    let years = 3u32;
    let series = volume_projection(cfg.hndl.base_volume, cfg.hndl.growth_rate, years)?;
    let ml65_ref = dc.reference_baseline_p99_ms
        + profiles
            .iter()
            .find(|p| p.name == "ML-DSA-65")
            .and_then(|p| p.delta_p99_ref_ms)
            .unwrap_or(0.0);
    let volume_rows: Vec<serde_json::Value> = series
        .iter()
        .enumerate()
        .map(|(i, &tx)| {
            json!({
                "year": cfg.hndl.base_year + i as u32,
                "npp_tx_per_day": tx,
                "sla_headroom_ms": round2(sla_headroom_ms(ml65_ref, cfg.run.sla_npp_ms)),
            })
        })
        .collect();
    write_table(
        out,
        "volume",
        &["year", "npp_tx_per_day", "sla_headroom_ms"],
        &volume_rows,
    )?;

    // Migration cost phases.
    let cost_rows: Vec<serde_json::Value> = migration_cost_table()
        .iter()
        .map(|p| {
            json!({
                "phase": p.phase,
                "year_label": p.year_label,
                "activities": p.activities,
                "annual_cost_musd": p.annual_cost_musd,
                "becs_fraction": round4(p.becs_fraction),
                "sensitivity_low_musd": p.sensitivity_musd.map(|s| s.0),
                "sensitivity_high_musd": p.sensitivity_musd.map(|s| s.1),
                "provenance": "parametric estimate",
            })
        })
        .collect();
    write_table(
        out,
        "costs",
        &[
            "phase",
            "year_label",
            "activities",
            "annual_cost_musd",
            "becs_fraction",
            "sensitivity_low_musd",
            "sensitivity_high_musd",
            "provenance",
        ],
        &cost_rows,
    )?;

    // M/M/c assessment at the reference institutional load.
    let queue_rows: Vec<serde_json::Value> = profiles
        .iter()
        .map(|p| {
            let a = mmc_assess(QueueParams {
                lambda: cfg.run.npp_big4_tps,
                mu: p.service_rate(),
                c: cfg.run.c_servers,
            });
            json!({
                "algorithm": p.name,
                "lambda_tps": cfg.run.npp_big4_tps,
                "servers": cfg.run.c_servers,
                "rho": round4(a.rho),
                "erlang_c": round4(a.erlang_c),
                "mean_wait_ms": round2(a.mean_wait_us / 1000.0),
                "saturated": a.saturated,
            })
        })
        .collect();
    write_table(
        out,
        "queue",
        &[
            "algorithm",
            "lambda_tps",
            "servers",
            "rho",
            "erlang_c",
            "mean_wait_ms",
            "saturated",
        ],
        &queue_rows,
    )?;

    // Degraded single-server comparison.
    let degraded_rows: Vec<serde_json::Value> = profiles
        .iter()
        .map(|p| {
            let cmp = degraded_compare(
                p,
                cfg.run.npp_big4_tps,
                dc.degraded_base_p99_ms,
                cfg.run.c_servers,
                1,
            );
            json!({
                "algorithm": p.name,
                "p99_normal_ms": round2(cmp.p99_normal_ms),
                "p99_degraded_ms": round2(cmp.p99_degraded_ms),
                "delta_ms": round4(cmp.delta_ms),
                "meaningful": cmp.meaningful,
            })
        })
        .collect();
    write_table(
        out,
        "degraded",
        &[
            "algorithm",
            "p99_normal_ms",
            "p99_degraded_ms",
            "delta_ms",
            "meaningful",
        ],
        &degraded_rows,
    )?;

    // Capacity: minimum servers per criterion, amortised batch signing.
    let capacity_rows: Vec<serde_json::Value> = profiles
        .iter()
        .map(|p| {
            let mu = p.service_rate();
            Ok(json!({
                "algorithm": p.name,
                "saturation_tps_c2": round2(saturation_boundary(mu, 2)),
                "min_servers_stability": min_servers(cfg.run.npp_big4_tps, mu, MinServerCriterion::Stability)?,
                "min_servers_p95_wait_10ms": min_servers(cfg.run.npp_big4_tps, mu, MinServerCriterion::WaitBelowMs(10.0))?,
                "becs_amortised_ms_50k": round4(becs_amortised(4.0 * p.sign_mean_us / 1000.0, 50_000)?),
            }))
        })
        .collect::<Result<_>>()?;
    write_table(
        out,
        "capacity",
        &[
            "algorithm",
            "saturation_tps_c2",
            "min_servers_stability",
            "min_servers_p95_wait_10ms",
            "becs_amortised_ms_50k",
        ],
        &capacity_rows,
    )
}

pub fn write_sweeps(out: &Outputs, cfg: &SimConfig) -> Result<()> {
    let grid: Vec<f64> = (1..=80).map(|i| i as f64 * 0.25).collect();
    let mut sweep_rows = Vec::new();
    for p in &cfg.algorithms {
        for point in tps_sweep(p, &grid, cfg.run.c_servers) {
            sweep_rows.push(json!({
                "algo": p.name,
                "tps_or_hour": point.tps,
                "rho": round4(point.rho),
                "erlang_c": round4(point.erlang_c),
                "wait_ms": round2(point.wait_ms),
                "saturated": point.saturated,
            }));
        }
    }
    write_table(
        out,
        "sweep",
        &[
            "algo",
            "tps_or_hour",
            "rho",
            "erlang_c",
            "wait_ms",
            "saturated",
        ],
        &sweep_rows,
    )?;

    let christmas = cfg
        .scenarios
        .iter()
        .find(|s| s.name == "christmas")
        .unwrap_or(&cfg.scenarios[0]);
    let normal_npp = cfg
        .scenarios
        .iter()
        .find(|s| s.name == "normal")
        .map(|s| s.npp_per_day as f64)
        .unwrap_or(christmas.npp_per_day as f64);
    let mut hourly_rows = Vec::new();
    for p in &cfg.algorithms {
        let profile = hourly_profile(
            p,
            christmas,
            &cfg.mixture,
            cfg.run.npp_big4_tps,
            normal_npp,
            cfg.run.c_servers,
        );
        for (hour, (_lambda, a)) in profile.hours.iter().enumerate() {
            hourly_rows.push(json!({
                "algo": p.name,
                "tps_or_hour": hour,
                "rho": round4(a.rho),
                "erlang_c": round4(a.erlang_c),
                "wait_ms": round2(a.mean_wait_us / 1000.0),
                "saturated": a.saturated,
            }));
        }
    }
    write_table(
        out,
        "hourly",
        &[
            "algo",
            "tps_or_hour",
            "rho",
            "erlang_c",
            "wait_ms",
            "saturated",
        ],
        &hourly_rows,
    )
}

/// Aggregated headline numbers; emitted by `run` and finalised by `all`.
pub fn write_summary(
    out: &Outputs,
    cfg: &SimConfig,
    corpus: Option<&CorpusResult>,
    analysis: Option<&AnalysisReport>,
) -> Result<()> {
    let dc = &cfg.decision;
    let hndl = hndl_exposure(&cfg.hndl)?;
    let cumulative = hndl
        .iter()
        .filter(|r| r.exposed == Exposure::Yes)
        .map(|r| r.records)
        .sum::<u64>();
    let sphincs_mu = cfg
        .algorithms
        .iter()
        .find(|p| p.name.starts_with("SPHINCS"))
        .map(|p| p.service_rate())
        .unwrap_or(3.58);

    let algos: Vec<serde_json::Value> = cfg
        .algorithms
        .iter()
        .map(|p| {
            let queue = mmc_assess(QueueParams {
                lambda: cfg.run.npp_big4_tps,
                mu: p.service_rate(),
                c: cfg.run.c_servers,
            });
            let delta = p.delta_p99_ref_ms.unwrap_or(0.0);
            let cdi_rec = cdi(
                &p.name,
                delta,
                dc.reference_baseline_p99_ms + delta,
                dc.cdi_threshold,
            )
            .expect("reference cdi");
            let corpus_part = corpus.and_then(|c| c.algo(&p.name)).map(|a| {
                json!({
                    "mean_daily_p99_ms": round2(a.mean_daily_p99_ms),
                    "ci95_ms": [round2(a.ci95_mean_daily_p99.0), round2(a.ci95_mean_daily_p99.1)],
                    "delta_p99_ms": round2(a.delta_p99_ms),
                    "sla_compliance": round4(a.overall_compliance),
                    "npp_violations": a.npp_violations,
                })
            });
            json!({
                "name": p.name,
                "mode": mode_label(p.mode),
                "rho_reference_load": round4(queue.rho),
                "saturated": queue.saturated,
                "cdi_reference": round4(cdi_rec.cdi),
                "cdi_pass": cdi_rec.passes_threshold,
                "corpus": corpus_part,
            })
        })
        .collect();

    let analysis_part = analysis.map(|a| {
        json!({
            "representative_day": a.representative_day,
            "gev": a.gev.iter().map(|r| json!({
                "algorithm": r.algo,
                "xi": round4(r.report.fit.xi),
                "q999_ms": round2(r.report.q999),
                "tail_class": r.report.tail_class.label(),
            })).collect::<Vec<_>>(),
            "gof": a.gof.iter().map(|r| json!({
                "algorithm": r.algo,
                "ks_p": round4(r.gof.ks_p),
                "reject_ks": r.gof.reject_ks,
                "ad_stat": round4(r.gof.ad_stat),
                "reject_ad": r.gof.reject_ad,
                "best_model": r.models.best().map(|b| b.name).unwrap_or("none"),
            })).collect::<Vec<_>>(),
        })
    });

    let summary = json!({
        "master_seed": cfg.run.master_seed,
        "n_days": cfg.run.n_days,
        "n_sample": cfg.run.n_sample,
        "c_servers": cfg.run.c_servers,
        "hsm_overhead_per_hop_ms": cfg.run.hsm_overhead_per_hop_ms,
        "algorithms": algos,
        "hndl_cumulative_exposed_records": cumulative,
        "storage_usd_per_year": {
            "low": round2(storage_cost_usd_per_year(cumulative, cfg.hndl.bytes_per_record_low, cfg.hndl.usd_per_gb_month)?),
            "high": round2(storage_cost_usd_per_year(cumulative, cfg.hndl.bytes_per_record_high, cfg.hndl.usd_per_gb_month)?),
        },
        "psa": {
            "cap_tps": 1.0,
            "saturation_tps": round2(saturation_boundary(sphincs_mu, cfg.run.c_servers)),
            "safety_margin": round2(psa_safety_margin(sphincs_mu, cfg.run.c_servers, 1.0)),
        },
        "migration_capex_phase1_musd": {
            "total": 21.4,
            "big4": round2(PHASE1_BIG4_EACH_MUSD * PHASE1_BIG4_COUNT as f64),
            "regionals": round2(PHASE1_REGIONAL_EACH_MUSD * PHASE1_REGIONAL_COUNT as f64),
        },
        "analysis": analysis_part,
    });
    std::fs::write(
        out.path("summary.json"),
        serde_json::to_string_pretty(&summary).expect("serializable"),
    )?;
    Ok(())
}

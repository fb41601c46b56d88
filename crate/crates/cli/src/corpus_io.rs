//! Corpus persistence: one CSV per algorithm with the per-day results.
//! Streams themselves are never persisted; they are regenerable from the
//! config snapshot and seed.

use pqsla_core::engine::{AlgoCorpus, CorpusResult, DayResult};
use pqsla_core::{Error, Result, SimConfig};

use crate::commands::{file_error, Outputs};
use crate::emit::round2;

pub fn corpus_file_name(algo: &str) -> String {
    format!("corpus_{algo}.csv")
}

pub fn write_corpus(out: &Outputs, corpus: &CorpusResult) -> Result<()> {
    for algo in &corpus.algos {
        let path = out.path(&corpus_file_name(&algo.algo));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record([
            "day_index",
            "scenario",
            "p50_ms",
            "p95_ms",
            "p99_ms",
            "max_ms",
            "sla_compliance",
            "n",
        ])
        .map_err(csv_err)?;
        for d in &algo.days {
            w.write_record([
                d.day_index.to_string(),
                d.scenario.clone(),
                format!("{:.2}", d.p50_ms),
                format!("{:.2}", d.p95_ms),
                format!("{:.2}", d.p99_ms),
                format!("{:.2}", d.max_ms),
                format!("{:.4}", d.sla_compliance),
                d.n.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| file_error(&path, e))?;
    }
    Ok(())
}

/// Rebuild a corpus from the CSVs in an output directory, in the
/// configuration's algorithm order.
pub fn read_corpus(out: &Outputs, cfg: &SimConfig) -> Result<CorpusResult> {
    let mut algos = Vec::new();
    let baseline_name = cfg
        .algorithms
        .iter()
        .find(|p| p.delta_p99_ref_ms == Some(0.0))
        .map(|p| p.name.clone());
    let mut baseline_mean = 0.0;
    for profile in &cfg.algorithms {
        let path = out.path(&corpus_file_name(&profile.name));
        if !path.exists() {
            return Err(Error::domain(format!(
                "missing corpus file {} (run `pqsla run` first)",
                path.display()
            )));
        }
        let mut rdr = csv::Reader::from_path(&path).map_err(csv_err)?;
        let mut days = Vec::new();
        for record in rdr.records() {
            let r = record.map_err(csv_err)?;
            days.push(DayResult {
                day_index: parse(&r, 0)?,
                scenario: r.get(1).unwrap_or_default().to_string(),
                p50_ms: parse(&r, 2)?,
                p95_ms: parse(&r, 3)?,
                p99_ms: parse(&r, 4)?,
                max_ms: parse(&r, 5)?,
                sla_compliance: parse(&r, 6)?,
                n: parse(&r, 7)?,
            });
        }
        if days.is_empty() {
            return Err(Error::domain(format!(
                "corpus file {} has no rows",
                path.display()
            )));
        }
        let p99s: Vec<f64> = days.iter().map(|d| d.p99_ms).collect();
        let mean_p99 = p99s.iter().sum::<f64>() / p99s.len() as f64;
        let ci = if p99s.len() >= 2 {
            pqsla_core::engine::ci_mean_t(&p99s, 0.95)?
        } else {
            (mean_p99, mean_p99)
        };
        let total_n: u64 = days.iter().map(|d| d.n).sum();
        let compliant: f64 = days.iter().map(|d| d.sla_compliance * d.n as f64).sum();
        if Some(&profile.name) == baseline_name.as_ref() {
            baseline_mean = mean_p99;
        }
        algos.push(AlgoCorpus {
            algo: profile.name.clone(),
            mean_daily_p99_ms: mean_p99,
            ci95_mean_daily_p99: ci,
            mean_daily_p50_ms: days.iter().map(|d| d.p50_ms).sum::<f64>() / days.len() as f64,
            mean_daily_p95_ms: days.iter().map(|d| d.p95_ms).sum::<f64>() / days.len() as f64,
            overall_compliance: compliant / total_n as f64,
            npp_violations: (total_n as f64 - compliant).round() as u64,
            npp_transactions: total_n,
            delta_p99_ms: 0.0,
            days,
        });
    }
    for a in &mut algos {
        a.delta_p99_ms = round2(a.mean_daily_p99_ms - baseline_mean);
    }
    let n_days = algos.first().map(|a| a.days.len() as u32).unwrap_or(0);
    let scenario_sequence = algos
        .first()
        .map(|a| a.days.iter().map(|d| d.scenario.clone()).collect())
        .unwrap_or_default();
    Ok(CorpusResult {
        master_seed: cfg.run.master_seed,
        n_days,
        scenario_sequence,
        algos,
    })
}

fn parse<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize) -> Result<T> {
    record
        .get(idx)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("corpus CSV: bad field {idx} in {record:?}")))
}

pub fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Audit dump: regenerate and persist every day's transaction stream.
/// Regenerable from the seed, so opt-in only (large at full scale).
pub fn dump_transactions(out: &Outputs, cfg: &SimConfig) -> Result<()> {
    use pqsla_core::rng::{day_rng, StreamPurpose};
    use pqsla_core::traffic::generate_day;

    let ctx = cfg.context();
    let scenarios = pqsla_core::engine::scenario_sequence(&ctx, cfg.run.n_days)?;
    let dir = out.path("transactions");
    std::fs::create_dir_all(&dir)?;
    for (day, scenario) in scenarios.iter().enumerate() {
        let mut rng = day_rng(cfg.run.master_seed, day as u64, StreamPurpose::Traffic);
        let txs = generate_day(
            scenario,
            cfg.run.n_sample,
            &cfg.traffic,
            &cfg.mixture,
            &cfg.network.institutions,
            &mut rng,
        )?;
        let path = dir.join(format!("day_{day:04}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record([
            "id",
            "route",
            "origin",
            "dest",
            "hour",
            "amount_aud",
            "needs_payid",
            "tls_reconnect",
        ])
        .map_err(csv_err)?;
        for t in &txs {
            w.write_record([
                t.id.to_string(),
                format!("{:?}", t.route).to_uppercase(),
                cfg.network.institutions[t.origin].name.clone(),
                cfg.network.institutions[t.dest].name.clone(),
                format!("{:.4}", t.hour),
                format!("{:.2}", t.amount_aud),
                t.needs_payid.to_string(),
                t.tls_reconnect.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| file_error(&path, e))?;
    }
    Ok(())
}

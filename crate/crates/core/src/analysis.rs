//! Post-hoc analytics over a finished corpus: GEV tail reports, GoF panels,
//! effect sizes and variance decomposition.

use serde::Serialize;

use crate::config::SimConfig;
use crate::engine::{representative_day_samples, CorpusResult};
use crate::error::{Error, Result};
use crate::latency_db::{fit_lognormal, LogNormalParams, SigningMode};
use crate::rng::analysis_rng;
use crate::stats::gev::{gev_report, GevReport};
use crate::stats::gof::{aic_bic_compare, gof_report, Candidate, GofReport, ModelComparison};
use crate::stats::{anova_eta2, block_maxima, effect_size, EffectSize};

/// Where block maxima come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockMode {
    /// 50-transaction blocks inside one representative normal day
    /// (200 blocks); exposed as indicative because within-day maxima share
    /// intraday structure.
    WithinDay,
    /// One maximum per corpus day (i.i.d.-friendly alternative).
    Daily,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgoGevRow {
    pub algo: String,
    pub mode: BlockMode,
    pub n_blocks: usize,
    pub report: GevReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgoGofRow {
    pub algo: String,
    pub n: usize,
    pub fitted: LogNormalParams,
    pub gof: GofReport,
    pub models: ModelComparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgoEffectRow {
    pub algo: String,
    pub delta_p99_ms: f64,
    pub effect: EffectSize,
    pub sla_budget_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnovaRow {
    pub factor: String,
    pub scope: String,
    pub eta2: f64,
    pub f_stat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub representative_day: u32,
    pub block_mode: BlockMode,
    pub gev: Vec<AlgoGevRow>,
    pub gof: Vec<AlgoGofRow>,
    pub effects: Vec<AlgoEffectRow>,
    pub anova: Vec<AnovaRow>,
}

/// Run the full statistics pipeline for a corpus.
///
/// GoF and within-day GEV replay the representative normal day from the
/// deterministic streams; daily-mode GEV uses the per-day maxima already in
/// the corpus.
pub fn analyze_corpus(
    cfg: &SimConfig,
    corpus: &CorpusResult,
    block_mode: BlockMode,
    bootstrap_resamples: usize,
) -> Result<AnalysisReport> {
    let ctx = cfg.context();
    let baseline = corpus
        .algos
        .iter()
        .find(|a| {
            cfg.algorithms
                .iter()
                .any(|p| p.name == a.algo && p.mode == SigningMode::Classical)
        })
        .ok_or_else(|| Error::domain("analysis needs a classical baseline in the corpus"))?;
    let baseline_p99s: Vec<f64> = baseline.days.iter().map(|d| d.p99_ms).collect();

    let mut gev = Vec::new();
    let mut gof = Vec::new();
    let mut effects = Vec::new();
    let mut repr_day = 0;

    for algo_corpus in &corpus.algos {
        let profile = cfg
            .algorithms
            .iter()
            .find(|p| p.name == algo_corpus.algo)
            .ok_or_else(|| Error::UnknownAlgorithm(algo_corpus.algo.clone()))?;

        let (day, samples) = representative_day_samples(&ctx, profile)?;
        repr_day = day;

        let (maxima, indicative, mode) = match block_mode {
            BlockMode::WithinDay => (block_maxima(&samples, 50)?, true, BlockMode::WithinDay),
            BlockMode::Daily => (
                algo_corpus
                    .days
                    .iter()
                    .map(|d| d.max_ms)
                    .collect::<Vec<f64>>(),
                false,
                BlockMode::Daily,
            ),
        };
        let mut rng = analysis_rng(cfg.run.master_seed, 0x6765_7621);
        let report = gev_report(&maxima, bootstrap_resamples, &mut rng, indicative)?;
        gev.push(AlgoGevRow {
            algo: algo_corpus.algo.clone(),
            mode,
            n_blocks: maxima.len(),
            report,
        });

        let (mean, sd) = mean_sd(&samples);
        let fitted = fit_lognormal(mean, sd)?;
        gof.push(AlgoGofRow {
            algo: algo_corpus.algo.clone(),
            n: samples.len(),
            fitted,
            gof: gof_report(&samples, fitted)?,
            models: aic_bic_compare(&samples, &Candidate::ALL)?,
        });

        if algo_corpus.algo != baseline.algo {
            let p99s: Vec<f64> = algo_corpus.days.iter().map(|d| d.p99_ms).collect();
            let effect = effect_size(&p99s, &baseline_p99s)?;
            effects.push(AlgoEffectRow {
                algo: algo_corpus.algo.clone(),
                delta_p99_ms: algo_corpus.delta_p99_ms,
                effect,
                sla_budget_fraction: algo_corpus.delta_p99_ms / ctx.run.sla_npp_ms,
            });
        }
    }

    let anova = anova_rows(cfg, corpus)?;
    Ok(AnalysisReport {
        representative_day: repr_day,
        block_mode,
        gev,
        gof,
        effects,
        anova,
    })
}

fn anova_rows(cfg: &SimConfig, corpus: &CorpusResult) -> Result<Vec<AnovaRow>> {
    let is_slow = |name: &str| {
        cfg.algorithms
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.name.starts_with("SPHINCS"))
            .unwrap_or(false)
    };
    let mut rows = Vec::new();

    let all_groups: Vec<Vec<f64>> = corpus
        .algos
        .iter()
        .map(|a| a.days.iter().map(|d| d.p99_ms).collect())
        .collect();
    if all_groups.len() >= 2 {
        let (eta2, f) = anova_eta2(&all_groups)?;
        rows.push(AnovaRow {
            factor: "sig_algo".into(),
            scope: "all".into(),
            eta2,
            f_stat: f,
        });
    }

    let fast_groups: Vec<Vec<f64>> = corpus
        .algos
        .iter()
        .filter(|a| !is_slow(&a.algo))
        .map(|a| a.days.iter().map(|d| d.p99_ms).collect())
        .collect();
    if fast_groups.len() >= 2 {
        let (eta2, f) = anova_eta2(&fast_groups)?;
        rows.push(AnovaRow {
            factor: "sig_algo".into(),
            scope: "non_sphincs".into(),
            eta2,
            f_stat: f,
        });
    }

    // Scenario factor over the fast profiles' daily p99 values.
    let mut by_scenario: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for a in corpus.algos.iter().filter(|a| !is_slow(&a.algo)) {
        for d in &a.days {
            by_scenario
                .entry(d.scenario.clone())
                .or_default()
                .push(d.p99_ms);
        }
    }
    let scenario_groups: Vec<Vec<f64>> = by_scenario
        .values()
        .filter(|v| v.len() >= 2)
        .cloned()
        .collect();
    if scenario_groups.len() >= 2 {
        let (eta2, f) = anova_eta2(&scenario_groups)?;
        rows.push(AnovaRow {
            factor: "scenario".into(),
            scope: "non_sphincs".into(),
            eta2,
            f_stat: f,
        });
    }
    Ok(rows)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

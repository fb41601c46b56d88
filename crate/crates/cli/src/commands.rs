//! Subcommand orchestration: config resolution, the run/analyze/report/sweep
//! pipelines and the output-directory layout.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pqsla_core::analysis::{analyze_corpus, AnalysisReport, BlockMode};
use pqsla_core::engine::{run_corpus, CorpusResult};
use pqsla_core::{Error, Result, SimConfig};

use crate::corpus_io;
use crate::emit;
use crate::plot;
use crate::{Blocks, Cli, Command, CommonArgs};

pub struct Outputs {
    pub dir: PathBuf,
    pub csv: bool,
    pub json: bool,
}

impl Outputs {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(&cli.common)?;
    let out = prepare_outputs(&cli.common, &cfg)?;
    match &cli.command {
        Command::Run => {
            let corpus = cmd_run(&cfg, &out)?;
            if cli.common.dump_transactions {
                corpus_io::dump_transactions(&out, &cfg)?;
            }
            if cli.common.plots {
                plot::corpus_plots(&out, &cfg, &corpus)?;
            }
        }
        Command::Analyze { blocks, resamples } => {
            let corpus = corpus_io::read_corpus(&out, &cfg)?;
            let analysis = cmd_analyze(&cfg, &corpus, *blocks, *resamples, &out)?;
            if cli.common.plots {
                plot::analysis_plots(&out, &analysis)?;
            }
        }
        Command::Report => {
            cmd_report(&cfg, &out)?;
            if cli.common.plots {
                plot::report_plots(&out, &cfg)?;
            }
        }
        Command::Sweep => {
            cmd_sweep(&cfg, &out)?;
            if cli.common.plots {
                plot::sweep_plots(&out, &cfg)?;
            }
        }
        Command::All { blocks, resamples } => {
            let corpus = cmd_run(&cfg, &out)?;
            if cli.common.dump_transactions {
                corpus_io::dump_transactions(&out, &cfg)?;
            }
            let analysis = cmd_analyze(&cfg, &corpus, *blocks, *resamples, &out)?;
            cmd_report(&cfg, &out)?;
            cmd_sweep(&cfg, &out)?;
            emit::write_summary(&out, &cfg, Some(&corpus), Some(&analysis))?;
            if cli.common.plots {
                plot::corpus_plots(&out, &cfg, &corpus)?;
                plot::analysis_plots(&out, &analysis)?;
                plot::report_plots(&out, &cfg)?;
                plot::sweep_plots(&out, &cfg)?;
            }
        }
    }
    println!("outputs written to {}", out.dir.display());
    Ok(())
}

/// Load the config file (or defaults), then apply CLI/env overrides.
/// CLI values beat file values.
fn resolve_config(common: &CommonArgs) -> Result<SimConfig> {
    let mut cfg = match &common.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default_config(),
    };
    if let Some(seed) = common.seed {
        cfg.run.master_seed = seed;
    }
    if let Some(days) = common.days {
        cfg.run.n_days = days;
    }
    if let Some(sample) = common.sample {
        cfg.run.n_sample = sample;
    }
    if let Some(servers) = common.servers {
        cfg.run.c_servers = servers;
    }
    if let Some(hsm) = common.hsm {
        cfg.run.hsm_overhead_per_hop_ms = hsm.per_hop_ms();
    }
    if let Some(algos) = &common.algos {
        cfg.filter_algorithms(algos)?;
    }
    if let Some(name) = &common.scenario {
        let found = cfg.scenarios.iter().position(|s| s.name == *name);
        match found {
            Some(idx) => {
                let mut only = cfg.scenarios.swap_remove(idx);
                only.weight = 1.0;
                cfg.scenarios = vec![only];
            }
            None => {
                return Err(Error::config(vec![format!(
                    "unknown scenario '{name}' (configured: {})",
                    cfg.scenarios
                        .iter()
                        .map(|s| s.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )]));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prepare_outputs(common: &CommonArgs, cfg: &SimConfig) -> Result<Outputs> {
    let dir = match &common.out {
        Some(dir) => dir.clone(),
        None => {
            let stamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            PathBuf::from("out").join(format!("{stamp}-seed{}", cfg.run.master_seed))
        }
    };
    std::fs::create_dir_all(&dir)?;
    // Snapshot the effective configuration so any run is reproducible from
    // its artifacts alone.
    std::fs::write(dir.join("config_snapshot.toml"), cfg.to_toml_string())?;
    std::fs::write(dir.join("config_echo.txt"), cfg.echo())?;
    Ok(Outputs {
        dir,
        csv: matches!(common.format, crate::Format::Csv | crate::Format::Both),
        json: matches!(common.format, crate::Format::Json | crate::Format::Both),
    })
}

fn cmd_run(cfg: &SimConfig, out: &Outputs) -> Result<CorpusResult> {
    let corpus = run_corpus(&cfg.context())?;
    corpus_io::write_corpus(out, &corpus)?;
    emit::write_percentile_table(out, cfg, &corpus)?;
    emit::write_summary(out, cfg, Some(&corpus), None)?;
    Ok(corpus)
}

fn cmd_analyze(
    cfg: &SimConfig,
    corpus: &CorpusResult,
    blocks: Blocks,
    resamples: usize,
    out: &Outputs,
) -> Result<AnalysisReport> {
    let mode = match blocks {
        Blocks::WithinDay => BlockMode::WithinDay,
        Blocks::Daily => BlockMode::Daily,
    };
    let analysis = analyze_corpus(cfg, corpus, mode, resamples)?;
    emit::write_analysis(out, &analysis)?;
    Ok(analysis)
}

fn cmd_report(cfg: &SimConfig, out: &Outputs) -> Result<()> {
    emit::write_decision_tables(out, cfg)
}

fn cmd_sweep(cfg: &SimConfig, out: &Outputs) -> Result<()> {
    emit::write_sweeps(out, cfg)
}

pub fn file_error(path: &Path, err: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        err.kind(),
        format!("{}: {err}", path.display()),
    ))
}

//! Hand-constructed static SVG charts: axes, bars and polylines only, no
//! rendering dependency. Fidelity to the study's figures is structural.

use std::fmt::Write as _;

use pqsla_core::analysis::AnalysisReport;
use pqsla_core::decision::migration_cost_table;
use pqsla_core::engine::CorpusResult;
use pqsla_core::queueing::{hourly_profile, mmc_assess, tps_sweep, QueueParams};
use pqsla_core::{Result, SimConfig};

use crate::commands::Outputs;

const W: f64 = 720.0;
const H: f64 = 420.0;
const ML: f64 = 70.0; // left margin
const MB: f64 = 50.0; // bottom margin
const MT: f64 = 30.0;
const MR: f64 = 20.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

struct Chart {
    svg: String,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Chart {
    fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Chart {
        let mut svg = String::new();
        let _ = write!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="monospace" font-size="11">"#
        );
        let _ = write!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = write!(
            svg,
            r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            xml(title)
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            ML + (W - ML - MR) / 2.0,
            H - 10.0,
            xml(x_label)
        );
        let _ = write!(
            svg,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            MT + (H - MT - MB) / 2.0,
            MT + (H - MT - MB) / 2.0,
            xml(y_label)
        );
        // axes
        let _ = write!(
            svg,
            r#"<line x1="{ML}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#,
            H - MB,
            W - MR,
            H - MB,
            H - MB
        );
        Chart {
            svg,
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
        }
    }

    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x_min) / (self.x_max - self.x_min).max(1e-12) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - (y - self.y_min) / (self.y_max - self.y_min).max(1e-12) * (H - MB - MT)
    }

    fn y_ticks(&mut self, n: usize, fmt_fn: impl Fn(f64) -> String) {
        for i in 0..=n {
            let v = self.y_min + (self.y_max - self.y_min) * i as f64 / n as f64;
            let y = self.sy(v);
            let _ = write!(
                self.svg,
                r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
                ML,
                W - MR,
                ML - 6.0,
                y + 4.0,
                xml(&fmt_fn(v))
            );
        }
    }

    fn x_tick(&mut self, v: f64, label: &str) {
        let x = self.sx(v);
        let _ = write!(
            self.svg,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            H - MB,
            H - MB + 5.0,
            H - MB + 18.0,
            xml(label)
        );
    }

    fn polyline(&mut self, points: &[(f64, f64)], colour: &str) {
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| {
                format!(
                    "{:.1},{:.1}",
                    self.sx(x),
                    self.sy(y.clamp(self.y_min, self.y_max))
                )
            })
            .collect();
        let _ = write!(
            self.svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
    }

    fn bar(&mut self, x: f64, width_frac: f64, y: f64, colour: &str) {
        let x0 = self.sx(x - width_frac / 2.0);
        let x1 = self.sx(x + width_frac / 2.0);
        let y0 = self.sy(y.clamp(self.y_min, self.y_max));
        let _ = write!(
            self.svg,
            r#"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="{colour}"/>"#,
            x1 - x0,
            (H - MB - y0).max(0.0)
        );
    }

    fn hline(&mut self, y: f64, colour: &str, label: &str) {
        let sy = self.sy(y);
        let _ = write!(
            self.svg,
            r#"<line x1="{ML}" y1="{sy:.1}" x2="{}" y2="{sy:.1}" stroke="{colour}" stroke-dasharray="5,4"/><text x="{}" y="{:.1}" fill="{colour}">{}</text>"#,
            W - MR,
            ML + 8.0,
            sy - 5.0,
            xml(label)
        );
    }

    fn legend(&mut self, entries: &[(&str, &str)]) {
        for (i, (name, colour)) in entries.iter().enumerate() {
            let y = MT + 14.0 + i as f64 * 14.0;
            let _ = write!(
                self.svg,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}"/><text x="{}" y="{}">{}</text>"#,
                W - MR - 190.0,
                y - 9.0,
                W - MR - 175.0,
                y,
                xml(name)
            );
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>");
        self.svg
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn write_svg(out: &Outputs, name: &str, svg: String) -> Result<()> {
    let dir = out.path("plots");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join(name), svg)?;
    Ok(())
}

/// Per-day SLA compliance and p99 distribution charts.
pub fn corpus_plots(out: &Outputs, _cfg: &SimConfig, corpus: &CorpusResult) -> Result<()> {
    if corpus.algos.is_empty() {
        return Ok(());
    }
    // compliance per algorithm (bar, fraction of corpus transactions).
    let n = corpus.algos.len();
    let mut chart = Chart::new(
        "NPP SLA compliance across the corpus",
        "algorithm",
        "compliance fraction",
        (-0.5, n as f64 - 0.5),
        (0.0, 1.05),
    );
    chart.y_ticks(5, |v| format!("{v:.2}"));
    for (i, a) in corpus.algos.iter().enumerate() {
        chart.bar(
            i as f64,
            0.6,
            a.overall_compliance,
            PALETTE[i % PALETTE.len()],
        );
        chart.x_tick(i as f64, short_name(&a.algo));
    }
    write_svg(out, "compliance.svg", chart.finish())?;

    // daily p99 traces (fast profiles only; the saturated profile sits on
    // the sentinel and would flatten the scale).
    let fast: Vec<_> = corpus
        .algos
        .iter()
        .filter(|a| a.mean_daily_p99_ms < 1000.0)
        .collect();
    if !fast.is_empty() {
        let y_max = fast
            .iter()
            .flat_map(|a| a.days.iter().map(|d| d.p99_ms))
            .fold(f64::MIN, f64::max);
        let y_min = fast
            .iter()
            .flat_map(|a| a.days.iter().map(|d| d.p99_ms))
            .fold(f64::MAX, f64::min);
        let days = fast[0].days.len() as f64;
        let mut chart = Chart::new(
            "Daily NPP p99 by algorithm",
            "day index",
            "p99 (ms)",
            (0.0, days.max(1.0)),
            (y_min - 0.5, y_max + 0.5),
        );
        chart.y_ticks(6, |v| format!("{v:.1}"));
        for i in 0..=4 {
            let d = days * i as f64 / 4.0;
            chart.x_tick(d, &format!("{d:.0}"));
        }
        let mut legend = Vec::new();
        for (i, a) in fast.iter().enumerate() {
            let pts: Vec<(f64, f64)> = a
                .days
                .iter()
                .map(|d| (d.day_index as f64, d.p99_ms))
                .collect();
            chart.polyline(&pts, PALETTE[i % PALETTE.len()]);
            legend.push((short_name(&a.algo), PALETTE[i % PALETTE.len()]));
        }
        let legend_refs: Vec<(&str, &str)> = legend.iter().map(|(n, c)| (*n, *c)).collect();
        chart.legend(&legend_refs);
        write_svg(out, "p99_distribution.svg", chart.finish())?;
    }
    Ok(())
}

/// GEV quantile ladder per algorithm.
pub fn analysis_plots(out: &Outputs, analysis: &AnalysisReport) -> Result<()> {
    let fast: Vec<_> = analysis
        .gev
        .iter()
        .filter(|r| r.report.q999 < 2000.0)
        .collect();
    if fast.is_empty() {
        return Ok(());
    }
    let y_max = fast
        .iter()
        .map(|r| r.report.ci9999.hi)
        .fold(f64::MIN, f64::max);
    let mut chart = Chart::new(
        "GEV block-maxima quantile ladder",
        "algorithm",
        "latency (ms)",
        (-0.5, fast.len() as f64 - 0.5),
        (0.0, y_max * 1.1),
    );
    chart.y_ticks(6, |v| format!("{v:.0}"));
    for (i, r) in fast.iter().enumerate() {
        let x = i as f64;
        chart.x_tick(x, short_name(&r.algo));
        chart.bar(x - 0.22, 0.18, r.report.q99, PALETTE[0]);
        chart.bar(x, 0.18, r.report.q999, PALETTE[1]);
        chart.bar(x + 0.22, 0.18, r.report.q9999, PALETTE[3]);
        // bootstrap CI whisker on q999
        let sx = chart.sx(x);
        let lo = chart.sy(r.report.ci999.lo);
        let hi = chart.sy(r.report.ci999.hi);
        let _ = write!(
            chart.svg,
            r#"<line x1="{sx:.1}" y1="{lo:.1}" x2="{sx:.1}" y2="{hi:.1}" stroke="black"/>"#
        );
    }
    chart.legend(&[
        ("q99 (maxima)", PALETTE[0]),
        ("q99.9", PALETTE[1]),
        ("q99.99", PALETTE[3]),
    ]);
    write_svg(out, "gev_quantiles.svg", chart.finish())
}

/// Queue utilisation bars and cost phases.
pub fn report_plots(out: &Outputs, cfg: &SimConfig) -> Result<()> {
    let n = cfg.algorithms.len();
    if n == 0 {
        return Ok(());
    }
    let mut chart = Chart::new(
        "Queue utilisation at reference load (log scale)",
        "algorithm",
        "log10(rho)",
        (-0.5, n as f64 - 0.5),
        (-5.0, 1.0),
    );
    chart.y_ticks(6, |v| format!("{v:.0}"));
    chart.hline(0.0, "#d62728", "saturation rho=1");
    for (i, p) in cfg.algorithms.iter().enumerate() {
        let a = mmc_assess(QueueParams {
            lambda: cfg.run.npp_big4_tps,
            mu: p.service_rate(),
            c: cfg.run.c_servers,
        });
        let log_rho = a.rho.max(1e-5).log10();
        let sx0 = chart.sx(i as f64 - 0.3);
        let sx1 = chart.sx(i as f64 + 0.3);
        let y0 = chart.sy(log_rho.clamp(-5.0, 1.0));
        let base = chart.sy(-5.0);
        let _ = write!(
            chart.svg,
            r#"<rect x="{sx0:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
            y0.min(base),
            sx1 - sx0,
            (base - y0).abs(),
            PALETTE[i % PALETTE.len()]
        );
        chart.x_tick(i as f64, short_name(&p.name));
    }
    write_svg(out, "queue_utilisation.svg", chart.finish())?;

    let phases = migration_cost_table();
    let y_max = phases
        .iter()
        .map(|p| p.annual_cost_musd)
        .fold(f64::MIN, f64::max);
    let mut chart = Chart::new(
        "Migration cost phases",
        "phase",
        "annual cost (MUSD)",
        (-0.5, phases.len() as f64 - 0.5),
        (0.0, y_max * 1.15),
    );
    chart.y_ticks(5, |v| format!("{v:.0}"));
    for (i, p) in phases.iter().enumerate() {
        chart.bar(
            i as f64,
            0.55,
            p.annual_cost_musd,
            PALETTE[i % PALETTE.len()],
        );
        chart.x_tick(i as f64, &format!("phase {}", p.phase));
        if let Some((lo, hi)) = p.sensitivity_musd {
            let sx = chart.sx(i as f64);
            let ylo = chart.sy(lo);
            let yhi = chart.sy(hi);
            let _ = write!(
                chart.svg,
                r#"<line x1="{sx:.1}" y1="{ylo:.1}" x2="{sx:.1}" y2="{yhi:.1}" stroke="black"/>"#
            );
        }
    }
    write_svg(out, "cost_phases.svg", chart.finish())
}

/// TPS sweep and Christmas hourly utilisation.
pub fn sweep_plots(out: &Outputs, cfg: &SimConfig) -> Result<()> {
    if cfg.algorithms.is_empty() {
        return Ok(());
    }
    let grid: Vec<f64> = (1..=80).map(|i| i as f64 * 0.25).collect();
    let mut chart = Chart::new(
        "Utilisation across institution TPS (c = reference)",
        "TPS per institution",
        "rho",
        (0.0, 20.0),
        (0.0, 3.0),
    );
    chart.y_ticks(6, |v| format!("{v:.1}"));
    for t in [0.0, 5.0, 7.16, 10.0, 15.0, 20.0] {
        chart.x_tick(t, &format!("{t:.2}"));
    }
    chart.hline(1.0, "#d62728", "rho = 1");
    let mut legend = Vec::new();
    for (i, p) in cfg.algorithms.iter().enumerate() {
        let pts: Vec<(f64, f64)> = tps_sweep(p, &grid, cfg.run.c_servers)
            .iter()
            .map(|pt| (pt.tps, pt.rho.min(3.0)))
            .collect();
        chart.polyline(&pts, PALETTE[i % PALETTE.len()]);
        legend.push((short_name(&p.name), PALETTE[i % PALETTE.len()]));
    }
    let legend_refs: Vec<(&str, &str)> = legend.iter().map(|(n, c)| (*n, *c)).collect();
    chart.legend(&legend_refs);
    write_svg(out, "tps_sweep.svg", chart.finish())?;

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
    let mut chart = Chart::new(
        "Hourly utilisation, peak scenario (c = reference)",
        "hour of day",
        "rho",
        (0.0, 23.0),
        (0.0, 9.0),
    );
    chart.y_ticks(9, |v| format!("{v:.0}"));
    for h in [0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 23.0] {
        chart.x_tick(h, &format!("{h:.0}"));
    }
    chart.hline(1.0, "#d62728", "rho = 1");
    let mut legend = Vec::new();
    for (i, p) in cfg.algorithms.iter().enumerate() {
        let profile = hourly_profile(
            p,
            christmas,
            &cfg.mixture,
            cfg.run.npp_big4_tps,
            normal_npp,
            cfg.run.c_servers,
        );
        let pts: Vec<(f64, f64)> = profile
            .hours
            .iter()
            .enumerate()
            .map(|(h, (_, a))| (h as f64, a.rho.min(9.0)))
            .collect();
        chart.polyline(&pts, PALETTE[i % PALETTE.len()]);
        legend.push((short_name(&p.name), PALETTE[i % PALETTE.len()]));
    }
    let legend_refs: Vec<(&str, &str)> = legend.iter().map(|(n, c)| (*n, *c)).collect();
    chart.legend(&legend_refs);
    write_svg(out, "hourly_rho.svg", chart.finish())
}

fn short_name(name: &str) -> &str {
    match name {
        "SPHINCS+-SHA2-128s" => "SPHINCS+",
        "ML-DSA-65-Hybrid" => "Hybrid",
        other => other,
    }
}

//! Goodness-of-fit machinery: one-sample Kolmogorov-Smirnov against a
//! lognormal, Anderson-Darling composite log-normality, and multi-candidate
//! AIC/BIC model comparison.

use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::latency_db::LogNormalParams;
use crate::stats::normal_cdf;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GofReport {
    pub ks_stat: f64,
    pub ks_p: f64,
    pub ad_stat: f64,
    pub ad_critical_5pct: f64,
    pub reject_ks: bool,
    pub reject_ad: bool,
}

pub const AD_CRITICAL_5PCT: f64 = 0.787;

/// One-sample KS statistic against the lognormal CDF, with the asymptotic
/// Kolmogorov p-value. The reference parameters are taken as given (no
/// Lilliefors correction); testing against a CDF fitted from the same data
/// is therefore conservative.
pub fn ks_test_lognormal(samples: &[f64], params: LogNormalParams) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::domain("ks test needs n >= 2"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if x <= 0.0 {
            return Err(Error::domain("lognormal KS needs positive samples"));
        }
        let f = normal_cdf((x.ln() - params.mu_ln) / params.sigma_ln.max(1e-300));
        let d_plus = (i as f64 + 1.0) / n - f;
        let d_minus = f - i as f64 / n;
        d = d.max(d_plus).max(d_minus);
    }
    Ok((d, kolmogorov_sf(d, n)))
}

/// Asymptotic Kolmogorov survival function with the Stephens finite-n
/// effective statistic.
fn kolmogorov_sf(d: f64, n: f64) -> f64 {
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
        if term < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Anderson-Darling statistic for composite normality of `ln(samples)` with
/// parameters estimated from the data. The returned statistic already
/// carries the small-sample multiplier `(1 + 4/n - 25/n^2)`, so it compares
/// directly against the 0.787 critical value.
pub fn ad_test_log_normality(samples: &[f64]) -> Result<(f64, bool)> {
    if samples.len() < 8 {
        return Err(Error::domain("AD test needs n >= 8"));
    }
    let mut logs = Vec::with_capacity(samples.len());
    for &x in samples {
        if !(x > 0.0) {
            return Err(Error::domain("AD log-normality needs positive samples"));
        }
        logs.push(x.ln());
    }
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let sd = (logs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::domain("AD test degenerate: zero variance"));
    }
    let mut a2 = -n;
    for i in 0..logs.len() {
        let w_i = normal_cdf((logs[i] - mean) / sd).clamp(1e-300, 1.0 - 1e-16);
        let w_rev = normal_cdf((logs[logs.len() - 1 - i] - mean) / sd).clamp(1e-300, 1.0 - 1e-16);
        a2 -= (2.0 * i as f64 + 1.0) / n * (w_i.ln() + (1.0 - w_rev).ln());
    }
    let adjusted = a2 * (1.0 + 4.0 / n - 25.0 / (n * n));
    Ok((adjusted, adjusted > AD_CRITICAL_5PCT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Candidate {
    Lognormal,
    Gamma,
    Weibull,
    InverseGaussian,
}

impl Candidate {
    pub fn label(self) -> &'static str {
        match self {
            Candidate::Lognormal => "lognormal",
            Candidate::Gamma => "gamma",
            Candidate::Weibull => "weibull",
            Candidate::InverseGaussian => "inverse-gaussian",
        }
    }

    pub const ALL: [Candidate; 4] = [
        Candidate::Lognormal,
        Candidate::Gamma,
        Candidate::Weibull,
        Candidate::InverseGaussian,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateFit {
    pub name: &'static str,
    pub aic: f64,
    pub bic: f64,
    pub delta_aic: f64,
    pub available: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelComparison {
    /// Ranked by AIC, best first; unavailable fits sort last.
    pub candidates: Vec<CandidateFit>,
}

impl ModelComparison {
    pub fn best(&self) -> Option<&CandidateFit> {
        self.candidates.first().filter(|c| c.available)
    }

    pub fn delta_aic(&self, name: &str) -> Option<f64> {
        self.candidates
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.delta_aic)
    }
}

/// Per-candidate MLE fit with AIC = 2k - 2 lnL and BIC = k ln n - 2 lnL,
/// ranked by AIC. A candidate whose fit fails is marked unavailable and the
/// remainder are still ranked.
pub fn aic_bic_compare(samples: &[f64], candidates: &[Candidate]) -> Result<ModelComparison> {
    if samples.len() < 30 {
        return Err(Error::domain("aic_bic_compare needs n >= 30"));
    }
    if samples.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::domain("model comparison needs positive samples"));
    }
    let n = samples.len() as f64;
    let k_params = 2.0;
    let mut fits: Vec<CandidateFit> = candidates
        .iter()
        .map(|&c| {
            let ll = match c {
                Candidate::Lognormal => lognormal_loglik(samples),
                Candidate::Gamma => gamma_loglik(samples),
                Candidate::Weibull => weibull_loglik(samples),
                Candidate::InverseGaussian => inverse_gaussian_loglik(samples),
            };
            match ll {
                Ok(ll) => CandidateFit {
                    name: c.label(),
                    aic: 2.0 * k_params - 2.0 * ll,
                    bic: k_params * n.ln() - 2.0 * ll,
                    delta_aic: 0.0,
                    available: true,
                },
                Err(_) => CandidateFit {
                    name: c.label(),
                    aic: f64::INFINITY,
                    bic: f64::INFINITY,
                    delta_aic: f64::INFINITY,
                    available: false,
                },
            }
        })
        .collect();
    fits.sort_by(|a, b| {
        a.aic
            .partial_cmp(&b.aic)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if let Some(best_aic) = fits.iter().find(|f| f.available).map(|f| f.aic) {
        for f in &mut fits {
            if f.available {
                f.delta_aic = f.aic - best_aic;
            }
        }
    }
    Ok(ModelComparison { candidates: fits })
}

fn lognormal_loglik(xs: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|&l| (l - mu) * (l - mu)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::NonConvergence("degenerate lognormal".into()));
    }
    let sigma2 = var;
    let ll =
        -0.5 * n * (2.0 * std::f64::consts::PI * sigma2).ln() - logs.iter().sum::<f64>() - n / 2.0;
    Ok(ll)
}

fn trigamma(mut x: f64) -> f64 {
    // Recurrence up to the asymptotic region.
    let mut acc = 0.0;
    while x < 6.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv * (1.0 + inv / 2.0 + inv2 / 6.0 - inv2 * inv2 / 30.0 + inv2 * inv2 * inv2 / 42.0)
}

fn gamma_loglik(xs: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mean_log = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let s = mean.ln() - mean_log;
    if s <= 0.0 {
        return Err(Error::NonConvergence(
            "gamma MLE: non-positive spread statistic".into(),
        ));
    }
    let mut k = (3.0 - s + ((s - 3.0) * (s - 3.0) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..100 {
        let f = k.ln() - digamma(k) - s;
        let fp = 1.0 / k - trigamma(k);
        let step = f / fp;
        let next = (k - step).max(1e-9);
        if (next - k).abs() < 1e-12 * k.max(1.0) {
            k = next;
            break;
        }
        k = next;
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::NonConvergence("gamma MLE failed".into()));
    }
    let theta = mean / k;
    let ll = xs
        .iter()
        .map(|&x| (k - 1.0) * x.ln() - x / theta - k * theta.ln() - ln_gamma(k))
        .sum::<f64>();
    Ok(ll)
}

fn weibull_loglik(xs: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mean_log = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let sd_log = (xs.iter().map(|x| (x.ln() - mean_log).powi(2)).sum::<f64>() / n).sqrt();
    if sd_log == 0.0 {
        return Err(Error::NonConvergence("weibull MLE degenerate".into()));
    }
    // Moment start for the shape, then Newton on the profile equation.
    let mut k = 1.2 / sd_log;
    for _ in 0..200 {
        let (mut sxk, mut sxk_l, mut sxk_l2) = (0.0, 0.0, 0.0);
        for &x in xs {
            let l = x.ln();
            let xk = (k * l).exp();
            sxk += xk;
            sxk_l += xk * l;
            sxk_l2 += xk * l * l;
        }
        let a = sxk_l / sxk;
        let g = a - 1.0 / k - mean_log;
        let gp = (sxk_l2 * sxk - sxk_l * sxk_l) / (sxk * sxk) + 1.0 / (k * k);
        let next = (k - g / gp).max(1e-6);
        if (next - k).abs() < 1e-12 * k.max(1.0) {
            k = next;
            break;
        }
        k = next;
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::NonConvergence("weibull MLE failed".into()));
    }
    let lambda = (xs.iter().map(|&x| x.powf(k)).sum::<f64>() / n).powf(1.0 / k);
    let ll = xs
        .iter()
        .map(|&x| (k / lambda).ln() + (k - 1.0) * (x / lambda).ln() - (x / lambda).powf(k))
        .sum::<f64>();
    Ok(ll)
}

fn inverse_gaussian_loglik(xs: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<f64>() / n;
    let lambda_inv = xs.iter().map(|&x| 1.0 / x - 1.0 / mu).sum::<f64>() / n;
    if lambda_inv <= 0.0 {
        return Err(Error::NonConvergence(
            "inverse-gaussian MLE degenerate".into(),
        ));
    }
    let lambda = 1.0 / lambda_inv;
    let ll = xs
        .iter()
        .map(|&x| {
            0.5 * (lambda / (2.0 * std::f64::consts::PI * x * x * x)).ln()
                - lambda * (x - mu) * (x - mu) / (2.0 * mu * mu * x)
        })
        .sum::<f64>();
    Ok(ll)
}

/// Convenience wrapper producing the full report for a sample against a
/// fitted lognormal.
pub fn gof_report(samples: &[f64], fitted: LogNormalParams) -> Result<GofReport> {
    let (ks_stat, ks_p) = ks_test_lognormal(samples, fitted)?;
    let (ad_stat, reject_ad) = ad_test_log_normality(samples)?;
    Ok(GofReport {
        ks_stat,
        ks_p,
        ad_stat,
        ad_critical_5pct: AD_CRITICAL_5PCT,
        reject_ks: ks_p < 0.05,
        reject_ad,
    })
}

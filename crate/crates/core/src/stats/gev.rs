//! GEV block-maxima analysis with maximum-likelihood fitting and bootstrap
//! confidence intervals.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevFit {
    /// Shape; positive is heavy-tailed (Frechet side).
    pub xi: f64,
    pub loc: f64,
    pub scale: f64,
    pub n_blocks: usize,
    /// Maximised log-likelihood, kept for diagnostics.
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailClass {
    Gumbel,
    Frechet,
    Weibull,
}

impl TailClass {
    pub fn label(self) -> &'static str {
        match self {
            TailClass::Gumbel => "Gumbel",
            TailClass::Frechet => "Frechet",
            TailClass::Weibull => "Weibull",
        }
    }
}

/// Gumbel within (-0.05, 0.05), Frechet at or above, Weibull at or below.
pub fn classify_tail(xi: f64) -> TailClass {
    if xi >= 0.05 {
        TailClass::Frechet
    } else if xi <= -0.05 {
        TailClass::Weibull
    } else {
        TailClass::Gumbel
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapCi {
    pub lo: f64,
    pub hi: f64,
    pub n_failures: usize,
    pub n_resamples: usize,
}

impl BootstrapCi {
    /// More than 10% resample fit failures taints the interval.
    pub fn degraded(&self) -> bool {
        self.n_failures * 10 > self.n_resamples
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GevReport {
    pub fit: GevFit,
    pub q99: f64,
    pub q999: f64,
    pub q9999: f64,
    pub ci999: BootstrapCi,
    pub ci9999: BootstrapCi,
    pub tail_class: TailClass,
    /// Within-day block maxima share intraday structure, so the fit is
    /// indicative rather than a strict i.i.d. GEV application.
    pub indicative: bool,
}

/// Per-block maxima of consecutive samples; a trailing partial block is
/// dropped.
pub fn block_maxima(samples: &[f64], block_size: usize) -> Result<Vec<f64>> {
    if block_size == 0 {
        return Err(Error::domain("block_maxima needs block_size > 0"));
    }
    let n_blocks = samples.len() / block_size;
    if n_blocks < 2 {
        return Err(Error::domain(format!(
            "block_maxima needs >= 2 complete blocks ({} samples at block {block_size})",
            samples.len()
        )));
    }
    Ok((0..n_blocks)
        .map(|b| {
            samples[b * block_size..(b + 1) * block_size]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

const XI_BOUND: f64 = 0.5;
const GUMBEL_EPS: f64 = 1e-8;

/// Negative log-likelihood of GEV(xi, loc, scale); infinite outside the
/// support or parameter bounds.
fn gev_nll(xi: f64, loc: f64, scale: f64, xs: &[f64]) -> f64 {
    if !(scale > 0.0) || xi.abs() > XI_BOUND {
        return f64::INFINITY;
    }
    let n = xs.len() as f64;
    let mut nll = n * scale.ln();
    if xi.abs() < GUMBEL_EPS {
        for &x in xs {
            let z = (x - loc) / scale;
            nll += z + (-z).exp();
        }
    } else {
        for &x in xs {
            let t = 1.0 + xi * (x - loc) / scale;
            if t <= 0.0 {
                return f64::INFINITY;
            }
            nll += (1.0 + 1.0 / xi) * t.ln() + t.powf(-1.0 / xi);
        }
    }
    nll
}

/// Nelder-Mead on (xi, loc, ln scale).
fn nelder_mead(start: [f64; 3], xs: &[f64], max_iter: usize) -> ([f64; 3], f64) {
    let eval = |p: &[f64; 3]| gev_nll(p[0], p[1], p[2].exp(), xs);
    let steps = [0.05, (start[2].exp() * 0.2).max(1e-6), 0.2];
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, eval(&start)));
    for i in 0..3 {
        let mut p = start;
        p[i] += if i == 1 { steps[1] } else { steps[i] };
        simplex.push((p, eval(&p)));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[3].1;
        if (worst - best).abs() < 1e-10 * (1.0 + best.abs()) {
            break;
        }
        let centroid = {
            let mut c = [0.0; 3];
            for s in &simplex[..3] {
                for (ci, si) in c.iter_mut().zip(s.0.iter()) {
                    *ci += si / 3.0;
                }
            }
            c
        };
        let reflect = |t: f64| -> [f64; 3] {
            let mut p = [0.0; 3];
            for i in 0..3 {
                p[i] = centroid[i] + t * (centroid[i] - simplex[3].0[i]);
            }
            p
        };
        let pr = reflect(1.0);
        let fr = eval(&pr);
        if fr < simplex[0].1 {
            let pe = reflect(2.0);
            let fe = eval(&pe);
            simplex[3] = if fe < fr { (pe, fe) } else { (pr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (pr, fr);
        } else {
            let pc = reflect(-0.5);
            let fc = eval(&pc);
            if fc < simplex[3].1 {
                simplex[3] = (pc, fc);
            } else {
                // shrink toward best
                let best_p = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    for (si, bi) in s.0.iter_mut().zip(best_p.iter()) {
                        *si = bi + 0.5 * (*si - bi);
                    }
                    s.1 = eval(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    (simplex[0].0, simplex[0].1)
}

/// Maximum-likelihood GEV fit with multi-start from moment-based initial
/// values (Gumbel moments, shape perturbed around zero).
pub fn fit_gev_mle(maxima: &[f64]) -> Result<GevFit> {
    if maxima.len() < 20 {
        return Err(Error::domain(format!(
            "fit_gev_mle needs >= 20 maxima, got {}",
            maxima.len()
        )));
    }
    let (mean, var) = super::mean_var(maxima);
    if var == 0.0 {
        // Degenerate point mass; a zero-scale GEV limit.
        return Ok(GevFit {
            xi: 0.0,
            loc: mean,
            scale: 1e-12,
            n_blocks: maxima.len(),
            log_likelihood: f64::INFINITY,
        });
    }
    // Gumbel method-of-moments start.
    let scale0 = (var * 6.0).sqrt() / std::f64::consts::PI;
    let loc0 = mean - 0.5772156649015329 * scale0;

    let mut best: Option<([f64; 3], f64)> = None;
    for xi0 in [-0.15, 0.0, 0.1, 0.25] {
        for scale_mult in [0.7, 1.0, 1.4] {
            let start = [xi0, loc0, (scale0 * scale_mult).ln()];
            let (p, f) = nelder_mead(start, maxima, 600);
            if f.is_finite() && best.is_none_or(|(_, bf)| f < bf) {
                best = Some((p, f));
            }
        }
    }
    let (p, f) = best.ok_or_else(|| {
        Error::NonConvergence(format!(
            "GEV optimisation found no finite likelihood over {} maxima (range {:?})",
            maxima.len(),
            (
                maxima.iter().cloned().fold(f64::INFINITY, f64::min),
                maxima.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            )
        ))
    })?;
    Ok(GevFit {
        xi: p[0],
        loc: p[1],
        scale: p[2].exp(),
        n_blocks: maxima.len(),
        log_likelihood: -f,
    })
}

/// Inverse GEV CDF: `loc + scale*((-ln q)^(-xi) - 1)/xi`, with the Gumbel
/// limit `loc - scale*ln(-ln q)` for |xi| below 1e-8.
pub fn gev_quantile(fit: &GevFit, q: f64) -> f64 {
    assert!(q > 0.0 && q < 1.0, "quantile fraction must be in (0,1)");
    let l = -q.ln();
    if fit.xi.abs() < GUMBEL_EPS {
        fit.loc - fit.scale * l.ln()
    } else {
        fit.loc + fit.scale * (l.powf(-fit.xi) - 1.0) / fit.xi
    }
}

/// Percentile bootstrap over refitted GEV quantiles.
pub fn bootstrap_ci<R: Rng + ?Sized>(
    maxima: &[f64],
    q: f64,
    n_resamples: usize,
    confidence: f64,
    rng: &mut R,
) -> Result<BootstrapCi> {
    if maxima.is_empty() {
        return Err(Error::domain("bootstrap_ci needs maxima"));
    }
    let n = maxima.len();
    let mut estimates = Vec::with_capacity(n_resamples);
    let mut failures = 0usize;
    for _ in 0..n_resamples {
        let resample: Vec<f64> = (0..n).map(|_| maxima[rng.random_range(0..n)]).collect();
        match fit_gev_mle(&resample) {
            Ok(fit) => estimates.push(gev_quantile(&fit, q)),
            Err(_) => failures += 1,
        }
    }
    if estimates.is_empty() {
        return Err(Error::NonConvergence(
            "all bootstrap resamples failed".into(),
        ));
    }
    estimates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let alpha = (1.0 - confidence) / 2.0;
    let pick = |frac: f64| -> f64 {
        let idx = (frac * (estimates.len() - 1) as f64).round() as usize;
        estimates[idx.min(estimates.len() - 1)]
    };
    Ok(BootstrapCi {
        lo: pick(alpha),
        hi: pick(1.0 - alpha),
        n_failures: failures,
        n_resamples,
    })
}

/// Full report: fit, quantile ladder, bootstrap CIs, tail class.
pub fn gev_report<R: Rng + ?Sized>(
    maxima: &[f64],
    n_resamples: usize,
    rng: &mut R,
    indicative: bool,
) -> Result<GevReport> {
    let fit = fit_gev_mle(maxima)?;
    let ci999 = bootstrap_ci(maxima, 0.999, n_resamples, 0.95, rng)?;
    let ci9999 = bootstrap_ci(maxima, 0.9999, n_resamples, 0.95, rng)?;
    Ok(GevReport {
        fit,
        q99: gev_quantile(&fit, 0.99),
        q999: gev_quantile(&fit, 0.999),
        q9999: gev_quantile(&fit, 0.9999),
        ci999,
        ci9999,
        tail_class: classify_tail(fit.xi),
        indicative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gev_sample(xi: f64, loc: f64, scale: f64, n: usize, seed: u64) -> Vec<f64> {
        // Inverse-CDF sampling through the quantile function.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fit = GevFit {
            xi,
            loc,
            scale,
            n_blocks: 0,
            log_likelihood: 0.0,
        };
        (0..n)
            .map(|_| gev_quantile(&fit, rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12)))
            .collect()
    }

    #[test]
    fn block_maxima_counts() {
        let samples: Vec<f64> = (0..10_000).map(|i| (i % 997) as f64).collect();
        let maxima = block_maxima(&samples, 50).unwrap();
        assert_eq!(maxima.len(), 200);
    }

    #[test]
    fn block_maxima_constant_and_increasing() {
        let constant = vec![7.0; 200];
        assert!(block_maxima(&constant, 50)
            .unwrap()
            .iter()
            .all(|&m| m == 7.0));
        let increasing: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        let maxima = block_maxima(&increasing, 50).unwrap();
        assert_eq!(maxima, vec![50.0, 100.0, 150.0, 200.0]);
    }

    #[test]
    fn block_maxima_rejects_short_input() {
        assert!(block_maxima(&[1.0; 60], 50).is_err());
    }

    #[test]
    fn fit_recovers_gumbel() {
        let xs = gev_sample(0.0, 100.0, 10.0, 10_000, 71);
        let fit = fit_gev_mle(&xs).unwrap();
        assert!(fit.xi.abs() < 0.02, "xi {}", fit.xi);
        assert!((fit.loc - 100.0).abs() < 0.5);
        assert!((fit.scale - 10.0).abs() < 0.3);
        assert_eq!(classify_tail(fit.xi), TailClass::Gumbel);
    }

    #[test]
    fn fit_recovers_frechet_shape() {
        let xs = gev_sample(0.3, 50.0, 5.0, 10_000, 73);
        let fit = fit_gev_mle(&xs).unwrap();
        assert!((fit.xi - 0.3).abs() < 0.05, "xi {}", fit.xi);
        assert_eq!(classify_tail(fit.xi), TailClass::Frechet);
    }

    #[test]
    fn fit_gradient_vanishes_at_optimum() {
        let xs = gev_sample(0.1, 40.0, 8.0, 2_000, 79);
        let fit = fit_gev_mle(&xs).unwrap();
        let ll = |xi: f64, loc: f64, scale: f64| -gev_nll(xi, loc, scale, &xs);
        let l0 = ll(fit.xi, fit.loc, fit.scale);
        let h = 1e-5;
        let grads = [
            (ll(fit.xi + h, fit.loc, fit.scale) - ll(fit.xi - h, fit.loc, fit.scale)) / (2.0 * h),
            (ll(fit.xi, fit.loc + h, fit.scale) - ll(fit.xi, fit.loc - h, fit.scale)) / (2.0 * h),
            (ll(fit.xi, fit.loc, fit.scale + h) - ll(fit.xi, fit.loc, fit.scale - h)) / (2.0 * h),
        ];
        for g in grads {
            assert!(
                g.abs() < 1e-3 * l0.abs().max(1.0),
                "gradient {g} at ll {l0}"
            );
        }
    }

    #[test]
    fn quantile_identities() {
        let gumbel = GevFit {
            xi: 0.0,
            loc: 0.0,
            scale: 1.0,
            n_blocks: 0,
            log_likelihood: 0.0,
        };
        // -ln(-ln(1/e)) = 0
        let q = gev_quantile(&gumbel, (-1.0f64).exp());
        assert!(q.abs() < 1e-12);
        // monotone in q
        let fit = GevFit {
            xi: 0.1,
            loc: 10.0,
            scale: 2.0,
            n_blocks: 0,
            log_likelihood: 0.0,
        };
        let mut prev = f64::NEG_INFINITY;
        for i in 1..100 {
            let v = gev_quantile(&fit, i as f64 / 100.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify_tail(0.028), TailClass::Gumbel);
        assert_eq!(classify_tail(0.078), TailClass::Frechet);
        assert_eq!(classify_tail(-0.2), TailClass::Weibull);
        assert_eq!(classify_tail(0.05), TailClass::Frechet);
        assert_eq!(classify_tail(-0.05), TailClass::Weibull);
    }

    #[test]
    fn bootstrap_constant_maxima_zero_width() {
        let maxima = vec![5.0; 100];
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let ci = bootstrap_ci(&maxima, 0.999, 50, 0.95, &mut rng).unwrap();
        assert!((ci.hi - ci.lo).abs() < 1e-9);
    }

    #[test]
    fn bootstrap_deterministic_and_brackets_point() {
        let xs = gev_sample(0.05, 100.0, 12.0, 200, 89);
        let fit = fit_gev_mle(&xs).unwrap();
        let point = gev_quantile(&fit, 0.999);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(97);
            bootstrap_ci(&xs, 0.999, 200, 0.95, &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!((a.lo, a.hi), (b.lo, b.hi));
        assert!(
            a.lo <= point && point <= a.hi,
            "[{}, {}] vs {point}",
            a.lo,
            a.hi
        );
    }
}

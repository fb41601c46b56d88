//! Post-hoc statistics over corpus outputs.

pub mod gev;
pub mod gof;

pub use gev::{
    block_maxima, bootstrap_ci, classify_tail, fit_gev_mle, gev_quantile, BootstrapCi, GevFit,
    GevReport, TailClass,
};
pub use gof::{
    ad_test_log_normality, aic_bic_compare, ks_test_lognormal, GofReport, ModelComparison,
};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub(crate) fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

pub fn normal_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

pub fn normal_quantile(q: f64) -> f64 {
    std_normal().inverse_cdf(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
    VeryLarge,
    Huge,
    /// Beyond every established taxonomy (|d| > 1000); reported instead of
    /// asserting a precise value that depends on unpublished variance.
    OffScale,
}

impl Magnitude {
    pub fn label(self) -> &'static str {
        match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
            Magnitude::VeryLarge => "very large",
            Magnitude::Huge => "huge",
            Magnitude::OffScale => "huge (off-scale)",
        }
    }
}

/// Magnitude per the conventional thresholds:
/// small >= 0.2, medium >= 0.5, large >= 0.8, very large >= 1.2, huge >= 2.0.
pub fn magnitude(d: f64) -> Magnitude {
    let a = d.abs();
    if a > 1000.0 {
        Magnitude::OffScale
    } else if a >= 2.0 {
        Magnitude::Huge
    } else if a >= 1.2 {
        Magnitude::VeryLarge
    } else if a >= 0.8 {
        Magnitude::Large
    } else if a >= 0.5 {
        Magnitude::Medium
    } else if a >= 0.2 {
        Magnitude::Small
    } else {
        Magnitude::Negligible
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectSize {
    pub cohens_d: f64,
    pub magnitude: Magnitude,
    pub mw_u: f64,
    pub mw_p: f64,
}

/// Cohen's d with the symmetric pooled form
/// `s_pooled = sqrt((s_a^2 + s_b^2) / 2)`; positive when `a` exceeds the
/// baseline.
pub fn cohens_d(a: &[f64], baseline: &[f64]) -> Result<f64> {
    if a.is_empty() || baseline.is_empty() {
        return Err(Error::domain("cohens_d needs non-empty samples"));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(baseline);
    let pooled = ((va + vb) / 2.0).sqrt();
    if pooled == 0.0 {
        return Ok(if ma == mb {
            0.0
        } else {
            f64::INFINITY * (ma - mb).signum()
        });
    }
    Ok((ma - mb) / pooled)
}

/// Two-sided Mann-Whitney U with normal approximation and tie correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("mann_whitney_u needs non-empty samples"));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;

    let mut combined: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    combined.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));

    // Midranks with tie bookkeeping.
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0usize;
    while i < combined.len() {
        let mut j = i;
        while j + 1 < combined.len() && combined[j + 1].0 == combined[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for item in &combined[i..=j] {
            if item.1 {
                rank_sum_a += midrank;
            }
        }
        if t > 1.0 {
            tie_term += t * t * t - t;
        }
        i = j + 1;
    }

    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let mean_u = n1 * n2 / 2.0;
    let var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var_u <= 0.0 {
        // Everything tied: no separation.
        return Ok((u, 1.0));
    }
    let z = (u - mean_u).abs() / var_u.sqrt();
    let p = 2.0 * (1.0 - normal_cdf(z));
    Ok((u, p.clamp(0.0, 1.0)))
}

/// Combined effect-size record against a baseline.
pub fn effect_size(a: &[f64], baseline: &[f64]) -> Result<EffectSize> {
    let d = cohens_d(a, baseline)?;
    let (u, p) = mann_whitney_u(a, baseline)?;
    Ok(EffectSize {
        cohens_d: d,
        magnitude: magnitude(d),
        mw_u: u,
        mw_p: p,
    })
}

/// One-way ANOVA: eta squared (`SS_between / SS_total`) and the F statistic.
pub fn anova_eta2(groups: &[Vec<f64>]) -> Result<(f64, f64)> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(Error::domain(
            "anova needs >= 2 groups with >= 2 values each",
        ));
    }
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let grand_mean: f64 = groups.iter().flatten().sum::<f64>() / n_total as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (m - grand_mean) * (m - grand_mean);
        ss_within += g.iter().map(|&x| (x - m) * (x - m)).sum::<f64>();
    }
    let ss_total = ss_between + ss_within;
    if ss_total == 0.0 {
        return Ok((0.0, 0.0));
    }
    let df_between = (groups.len() - 1) as f64;
    let df_within = (n_total - groups.len()) as f64;
    let f = if ss_within == 0.0 {
        f64::INFINITY
    } else {
        (ss_between / df_between) / (ss_within / df_within)
    };
    Ok((ss_between / ss_total, f))
}

pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cohens_d_identical_lists() {
        let a = vec![1.0, 2.0, 3.0];
        assert_eq!(cohens_d(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn cohens_d_known_shift() {
        // Unit-variance normals shifted by 1 -> d near 1.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let a: Vec<f64> = (0..20_000)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal) + 1.0)
            .collect();
        let b: Vec<f64> = (0..20_000)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let d = cohens_d(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 0.05, "{d}");
        assert_eq!(magnitude(d), Magnitude::Large);
    }

    #[test]
    fn cohens_d_zero_pooled_with_unequal_means() {
        let a = vec![5.0, 5.0];
        let b = vec![1.0, 1.0];
        let d = cohens_d(&a, &b).unwrap();
        assert!(d.is_infinite() && d > 0.0);
        assert_eq!(magnitude(1e6), Magnitude::OffScale);
    }

    #[test]
    fn magnitude_thresholds() {
        assert_eq!(magnitude(0.1), Magnitude::Negligible);
        assert_eq!(magnitude(0.2), Magnitude::Small);
        assert_eq!(magnitude(0.41), Magnitude::Small);
        assert_eq!(magnitude(0.5), Magnitude::Medium);
        assert_eq!(magnitude(0.84), Magnitude::Large);
        assert_eq!(magnitude(1.23), Magnitude::VeryLarge);
        assert_eq!(magnitude(2.14), Magnitude::Huge);
    }

    #[test]
    fn mann_whitney_constant_ties() {
        let a = vec![3.0; 10];
        let (_, p) = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn mann_whitney_disjoint_supports() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..1000).map(|i| 10_000.0 + i as f64).collect();
        let (u, p) = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(u, 0.0);
        assert!(p < 1e-10, "{p}");
        let (u2, _) = mann_whitney_u(&b, &a).unwrap();
        assert_eq!(u2, 1000.0 * 1000.0);
    }

    #[test]
    fn mann_whitney_null_is_insignificant() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let a: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let (_, p) = mann_whitney_u(&a, &b).unwrap();
        assert!(p > 0.01, "{p}");
    }

    #[test]
    fn anova_identical_groups() {
        let g = vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        let (eta2, _) = anova_eta2(&g).unwrap();
        assert!(eta2.abs() < 1e-12);
    }

    #[test]
    fn anova_zero_variance_convention() {
        let g = vec![vec![2.0, 2.0], vec![2.0, 2.0]];
        let (eta2, f) = anova_eta2(&g).unwrap();
        assert_eq!((eta2, f), (0.0, 0.0));
    }

    #[test]
    fn anova_outlier_group_dominates() {
        let g = vec![
            vec![43.0, 43.5, 44.0, 43.2],
            vec![44.0, 44.2, 44.1, 44.3],
            vec![10_030.0, 10_030.1, 10_029.9, 10_030.05],
        ];
        let (eta2, f) = anova_eta2(&g).unwrap();
        assert!(eta2 > 0.999, "{eta2}");
        assert!(f > 1e4);
    }

    #[test]
    fn anova_eta2_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let groups: Vec<Vec<f64>> = (0..3)
                .map(|k| {
                    (0..30)
                        .map(|_| rng.random::<f64>() + k as f64 * 0.1)
                        .collect()
                })
                .collect();
            let (eta2, _) = anova_eta2(&groups).unwrap();
            assert!((0.0..=1.0).contains(&eta2));
        }
    }
}

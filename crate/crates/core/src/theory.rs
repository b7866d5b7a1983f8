//! Variance budget of the compounded measure and its concentration bounds.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Variance of the compounded measure split into its sampling and
/// cross-validation parts, and the total after averaging over T iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBudget {
    pub srs_component: f64,
    pub kfcv_component: f64,
    pub total_per_t: f64,
    pub t: usize,
}

impl VarianceBudget {
    /// `sigma_hyb^2`, the per-iteration variance before division by T.
    pub fn per_iteration(&self) -> f64 {
        self.srs_component + self.kfcv_component
    }
}

/// `(sigma2 / n) * (1 - n / N)`, with the finite-population correction.
pub fn srs_variance_component(sigma2: f64, n: usize, population: usize) -> Result<f64> {
    if n == 0 || n > population {
        return Err(invalid(format!("sample size {n} must lie in [1, {population}]")));
    }
    if !(sigma2 >= 0.0) {
        return Err(invalid(format!("variance must be non-negative, got {sigma2}")));
    }
    let (n, big) = (n as f64, population as f64);
    Ok(sigma2 / n * (1.0 - n / big))
}

/// Mean of the per-fold loss variances.
pub fn kfcv_variance_component(fold_variances: &[f64]) -> Result<f64> {
    if fold_variances.is_empty() {
        return Err(invalid("no fold variances"));
    }
    if fold_variances.iter().any(|v| !(*v >= 0.0)) {
        return Err(invalid("fold variances must be non-negative"));
    }
    Ok(fold_variances.iter().sum::<f64>() / fold_variances.len() as f64)
}

pub fn hybrid_variance(
    sigma2: f64,
    n: usize,
    population: usize,
    fold_variances: &[f64],
    t: usize,
) -> Result<VarianceBudget> {
    if t == 0 {
        return Err(invalid("T must be at least 1"));
    }
    let srs = srs_variance_component(sigma2, n, population)?;
    let kfcv = kfcv_variance_component(fold_variances)?;
    Ok(VarianceBudget {
        srs_component: srs,
        kfcv_component: kfcv,
        total_per_t: (srs + kfcv) / t as f64,
        t,
    })
}

/// Chebyshev bound `P(|L - E L| >= k_dev * sd) <= 1 / k_dev^2`, capped at 1.
pub fn chebyshev_tail(k_dev: f64) -> f64 {
    (1.0 / (k_dev * k_dev)).min(1.0)
}

/// Deviation `k_dev * sqrt(sigma_hyb2 / T)` that is exceeded with
/// probability at most `1 / k_dev^2`.
pub fn chebyshev_threshold(sigma_hyb2: f64, t: usize, k_dev: f64) -> f64 {
    k_dev * (sigma_hyb2 / t as f64).sqrt()
}

/// Hoeffding bound for the average of T measures bounded in `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingBound {
    /// `2 exp(-2 T eps^2 / (b - a)^2)`; may exceed 1.
    pub raw: f64,
    /// `min(raw, 1)`.
    pub capped: f64,
}

pub fn hoeffding_tail(epsilon: f64, t: usize, a: f64, b: f64) -> Result<HoeffdingBound> {
    if !(b > a) {
        return Err(invalid(format!("bounds must satisfy a < b, got [{a}, {b}]")));
    }
    if !(epsilon >= 0.0) {
        return Err(invalid(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let width = b - a;
    let raw = 2.0 * (-2.0 * t as f64 * epsilon * epsilon / (width * width)).exp();
    Ok(HoeffdingBound {
        raw,
        capped: raw.min(1.0),
    })
}

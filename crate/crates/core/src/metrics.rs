//! Per-trial metrics and their mean/min/max summaries.
//!
//! Metric definitions:
//!
//! * `roc_me = |mean_est - mu|` and `roc_ve = |var_est - sigma2|`, the
//!   per-trial convergence error of each estimate;
//! * `bias = |L_fold - sigma2|`, where `L_fold` is the loss on a single
//!   validation fold of the trial's base partition;
//! * `mse` is the held-out squared-error loss, which is about `sigma2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SRS")]
    Srs,
    #[serde(rename = "KF")]
    Kfcv,
    #[serde(rename = "FSV")]
    Fsv,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Srs, Method::Kfcv, Method::Fsv];

    pub fn label(self) -> &'static str {
        match self {
            Method::Srs => "SRS",
            Method::Kfcv => "KF",
            Method::Fsv => "FSV",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanEst,
    VarEst,
    Mse,
    Bias,
    RocMe,
    RocVe,
}

impl Metric {
    /// Table row order.
    pub const ALL: [Metric; 6] = [
        Metric::MeanEst,
        Metric::VarEst,
        Metric::Mse,
        Metric::Bias,
        Metric::RocMe,
        Metric::RocVe,
    ];

    /// Machine-readable name used in CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Metric::MeanEst => "mean_est",
            Metric::VarEst => "var_est",
            Metric::Mse => "mse",
            Metric::Bias => "bias",
            Metric::RocMe => "roc_me",
            Metric::RocVe => "roc_ve",
        }
    }

    /// Row label prefix used in markdown tables.
    pub fn label(self) -> &'static str {
        match self {
            Metric::MeanEst => "Mean est.",
            Metric::VarEst => "Var est.",
            Metric::Mse => "MSE",
            Metric::Bias => "Bias",
            Metric::RocMe => "ROC Mean est.",
            Metric::RocVe => "ROC Var est.",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub mean_est: f64,
    pub var_est: f64,
    pub mse: f64,
    pub bias: f64,
    pub roc_me: f64,
    pub roc_ve: f64,
}

impl TrialMetrics {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::MeanEst => self.mean_est,
            Metric::VarEst => self.var_est,
            Metric::Mse => self.mse,
            Metric::Bias => self.bias,
            Metric::RocMe => self.roc_me,
            Metric::RocVe => self.roc_ve,
        }
    }

    /// Every field multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean_est: factor * self.mean_est,
            var_est: factor * self.var_est,
            mse: factor * self.mse,
            bias: factor * self.bias,
            roc_me: factor * self.roc_me,
            roc_ve: factor * self.roc_ve,
        }
    }
}

pub fn trial_metrics(
    mean_est: f64,
    var_est: f64,
    mse: f64,
    true_mean: f64,
    true_var: f64,
    fold_loss_for_bias: f64,
) -> TrialMetrics {
    TrialMetrics {
        mean_est,
        var_est,
        mse,
        bias: (fold_loss_for_bias - true_var).abs(),
        roc_me: (mean_est - true_mean).abs(),
        roc_ve: (var_est - true_var).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricSummary {
    /// Summary of a non-empty slice. Values are sorted before summation so
    /// the result does not depend on input order.
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("cannot summarize an empty series"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        // Guard the invariant against the last-bit rounding of the mean.
        Ok(Self {
            mean: mean.clamp(min, max),
            min,
            max,
        })
    }
}

/// One table block: mean/min/max of every metric across the trials of a method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub n: usize,
    pub trials: usize,
    pub mean_est: MetricSummary,
    pub var_est: MetricSummary,
    pub mse: MetricSummary,
    pub bias: MetricSummary,
    pub roc_me: MetricSummary,
    pub roc_ve: MetricSummary,
}

impl MethodSummary {
    pub fn get(&self, metric: Metric) -> &MetricSummary {
        match metric {
            Metric::MeanEst => &self.mean_est,
            Metric::VarEst => &self.var_est,
            Metric::Mse => &self.mse,
            Metric::Bias => &self.bias,
            Metric::RocMe => &self.roc_me,
            Metric::RocVe => &self.roc_ve,
        }
    }
}

pub fn summarize(trials: &[TrialMetrics], method: Method, n: usize, t: usize) -> Result<MethodSummary> {
    if trials.is_empty() {
        return Err(invalid("no trials to summarize"));
    }
    if trials.len() != t {
        return Err(invalid(format!("expected {t} trials, got {}", trials.len())));
    }
    let col = |m: Metric| {
        let xs: Vec<f64> = trials.iter().map(|tr| tr.get(m)).collect();
        MetricSummary::of(&xs)
    };
    Ok(MethodSummary {
        method,
        n,
        trials: t,
        mean_est: col(Metric::MeanEst)?,
        var_est: col(Metric::VarEst)?,
        mse: col(Metric::Mse)?,
        bias: col(Metric::Bias)?,
        roc_me: col(Metric::RocMe)?,
        roc_ve: col(Metric::RocVe)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tm(mse: f64) -> TrialMetrics {
        trial_metrics(0.01, 1.02, mse, 0.0, 1.0, 0.97)
    }

    #[test]
    fn perfect_estimates_have_zero_errors() {
        let t = trial_metrics(0.0, 1.0, 1.0, 0.0, 1.0, 1.0);
        assert_eq!((t.bias, t.roc_me, t.roc_ve), (0.0, 0.0, 0.0));
    }

    #[test]
    fn absolute_errors() {
        let t = trial_metrics(0.01, 0.98, 1.0, 0.0, 1.0, 1.03);
        assert_eq!(t.roc_me, 0.01);
        assert!((t.roc_ve - 0.02).abs() < 1e-15);
        assert!((t.bias - 0.03).abs() < 1e-15);
        let t = trial_metrics(-0.5, 1.0, 1.0, 0.0, 1.0, 0.5);
        assert_eq!(t.roc_me, 0.5);
        assert_eq!(t.bias, 0.5);
    }

    #[test]
    fn single_trial_summary() {
        let s = summarize(&[tm(0.9)], Method::Srs, 10, 1).unwrap();
        for m in Metric::ALL {
            let x = s.get(m);
            assert_eq!(x.mean, x.min);
            assert_eq!(x.min, x.max);
        }
    }

    #[test]
    fn two_trial_summary() {
        let s = summarize(&[tm(0.9), tm(1.1)], Method::Kfcv, 10, 2).unwrap();
        assert!((s.mse.mean - 1.0).abs() < 1e-15);
        assert_eq!((s.mse.min, s.mse.max), (0.9, 1.1));
    }

    #[test]
    fn summary_errors() {
        assert!(summarize(&[], Method::Fsv, 10, 0).is_err());
        assert!(summarize(&[tm(1.0)], Method::Fsv, 10, 2).is_err());
    }

    proptest! {
        #[test]
        fn summary_is_order_invariant_and_bracketed(
            mses in prop::collection::vec(0.0f64..3.0, 1..30),
            seed in any::<u64>(),
        ) {
            let trials: Vec<TrialMetrics> = mses.iter().map(|&m| tm(m)).collect();
            let mut shuffled = trials.clone();
            use rand::seq::SliceRandom;
            shuffled.shuffle(&mut crate::rng::derive_stream(seed, 0, 0));
            let a = summarize(&trials, Method::Srs, 5, trials.len()).unwrap();
            let b = summarize(&shuffled, Method::Srs, 5, trials.len()).unwrap();
            prop_assert_eq!(&a, &b);
            for m in Metric::ALL {
                let s = a.get(m);
                prop_assert!(s.min <= s.mean && s.mean <= s.max);
            }
        }
    }
}

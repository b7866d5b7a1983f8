//! Fusion sampling validation: T rounds of SRS followed by k-fold
//! cross-validation, each round's measure scaled by the weight alpha.
//!
//! `L* = alpha * (1/T) * sum(L_t)`. With alpha < 1 the compounded measure
//! estimates `alpha * E[L]`, not `E[L]`; [`FsvResult::raw_measure`] exposes
//! the unscaled average.

use serde::{Deserialize, Serialize};

use crate::datagen::Dataset;
use crate::error::{invalid, Result};
use crate::kfold::{kfold_evaluate, make_folds, FoldPlan};
use crate::metrics::{trial_metrics, TrialMetrics};
use crate::rng::RngStream;
pub use crate::sampling::SampleSizeRule;
use crate::sampling::srs_sample;

/// Range of alpha that is considered typical.
pub const TYPICAL_ALPHA: (f64, f64) = (0.8, 1.0);
pub const DEFAULT_ALPHA: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsvConfig {
    pub alpha: f64,
    pub iterations: usize,
    pub k: usize,
    pub sample_size: SampleSizeRule,
}

impl Default for FsvConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            iterations: 100,
            k: 5,
            sample_size: SampleSizeRule::default(),
        }
    }
}

impl FsvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.iterations == 0 {
            return Err(invalid("at least one iteration is required"));
        }
        if self.k < 2 {
            return Err(invalid(format!("fold count must be at least 2, got {}", self.k)));
        }
        self.sample_size.validate()
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alpha < TYPICAL_ALPHA.0 || self.alpha > TYPICAL_ALPHA.1 {
            out.push(format!(
                "alpha {} is outside the typical range [{}, {}]",
                self.alpha, TYPICAL_ALPHA.0, TYPICAL_ALPHA.1
            ));
        }
        out
    }
}

/// One working sample and its fold plan.
#[derive(Debug, Clone)]
pub struct SplitDraw {
    pub fraction: f64,
    pub sample: Vec<f64>,
    pub plan: FoldPlan,
}

/// Draws the working sample S_t and partitions it into k folds. Each stream
/// is consumed only for its own step, so callers can share any subset of
/// them between methods.
pub fn draw_split(
    data: &Dataset,
    k: usize,
    rule: SampleSizeRule,
    fraction_stream: &mut RngStream,
    srs_stream: &mut RngStream,
    folds_stream: &mut RngStream,
) -> Result<SplitDraw> {
    let (fraction, m) = rule.draw(data.n(), fraction_stream);
    let sample = srs_sample(data, m, srs_stream)?.gather(data);
    let plan = make_folds(m, k, folds_stream)?;
    Ok(SplitDraw {
        fraction,
        sample,
        plan,
    })
}

/// [`draw_split`] with every step reading the same stream in turn.
pub fn draw_split_from(data: &Dataset, k: usize, rule: SampleSizeRule, stream: &mut RngStream) -> Result<SplitDraw> {
    let (fraction, m) = rule.draw(data.n(), stream);
    let sample = srs_sample(data, m, stream)?.gather(data);
    let plan = make_folds(m, k, stream)?;
    Ok(SplitDraw {
        fraction,
        sample,
        plan,
    })
}

/// Unscaled statistics of one working sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitEvaluation {
    pub mean_est: f64,
    pub var_est: f64,
    /// Average held-out fold loss `L_t`.
    pub loss: f64,
    /// Held-out loss on the first fold alone.
    pub first_fold_loss: f64,
}

impl SplitEvaluation {
    pub fn metrics(&self, data: &Dataset) -> TrialMetrics {
        trial_metrics(
            self.mean_est,
            self.var_est,
            self.loss,
            data.true_mean(),
            data.true_var(),
            self.first_fold_loss,
        )
    }
}

pub fn evaluate_split(split: &SplitDraw) -> Result<SplitEvaluation> {
    let whole = crate::estimator::fit(&split.sample)?;
    let outcomes = kfold_evaluate(&split.sample, &split.plan)?;
    let loss = outcomes.iter().map(|o| o.loss).sum::<f64>() / outcomes.len() as f64;
    Ok(SplitEvaluation {
        mean_est: whole.fitted_mean,
        var_est: whole.fitted_var,
        loss,
        first_fold_loss: outcomes[0].loss,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsvResult {
    pub alpha: f64,
    /// `L* = alpha * mean(L_t)`.
    pub compounded_measure: f64,
    /// Unscaled `L_t` for t = 1..T.
    pub per_iteration_loss: Vec<f64>,
    /// Per-iteration statistics, each scaled by alpha.
    pub per_iteration_stats: Vec<TrialMetrics>,
}

impl FsvResult {
    /// `mean(L_t)` without the alpha factor.
    pub fn raw_measure(&self) -> f64 {
        self.per_iteration_loss.iter().sum::<f64>() / self.per_iteration_loss.len() as f64
    }

    /// Running average of `L_t` after each iteration.
    pub fn running_average(&self) -> Vec<f64> {
        let mut sum = 0.0;
        self.per_iteration_loss
            .iter()
            .enumerate()
            .map(|(i, l)| {
                sum += l;
                sum / (i + 1) as f64
            })
            .collect()
    }
}

/// `alpha * (1/T) * sum(L_t)`.
pub fn compound_measure(per_iteration: &[f64], alpha: f64) -> Result<f64> {
    if per_iteration.is_empty() {
        return Err(invalid("no iteration measures to compound"));
    }
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let mut acc = 0.0;
    for l in per_iteration {
        acc += alpha * l;
    }
    Ok(acc / per_iteration.len() as f64)
}

/// Runs T iterations on `data`, drawing every sample and fold plan from `stream`.
pub fn fsv_run(data: &Dataset, config: &FsvConfig, stream: &mut RngStream) -> Result<FsvResult> {
    config.validate()?;
    if data.n() < 2 * config.k {
        return Err(invalid(format!(
            "dataset of {} points is too small for {} folds",
            data.n(),
            config.k
        )));
    }
    let mut losses = Vec::with_capacity(config.iterations);
    let mut stats = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let split = draw_split_from(data, config.k, config.sample_size, stream)?;
        let eval = evaluate_split(&split)?;
        losses.push(eval.loss);
        stats.push(eval.metrics(data).scaled(config.alpha));
    }
    let compounded = compound_measure(&losses, config.alpha)?;
    Ok(FsvResult {
        alpha: config.alpha,
        compounded_measure: compounded,
        per_iteration_loss: losses,
        per_iteration_stats: stats,
    })
}

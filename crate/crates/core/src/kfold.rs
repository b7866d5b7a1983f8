//! Fold planning and (lambda-weighted, repeated) k-fold cross-validation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::datagen::Dataset;
use crate::error::{invalid, Result};
use crate::estimator::{fit_iter, loss_iter, ModelParams};
use crate::rng::RngStream;
use crate::sampling::{srs_sample, SampleSizeRule};

/// Tolerance on `sum(lambda) == k` for unbiased weights.
pub const LAMBDA_SUM_TOLERANCE: f64 = 1e-9;

/// A partition of sample positions `0..size` into k disjoint folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    folds: Vec<Vec<usize>>,
    size: usize,
}

impl FoldPlan {
    /// Builds a plan from explicit folds, checking the disjoint-cover invariant.
    pub fn from_folds(folds: Vec<Vec<usize>>) -> Result<Self> {
        if folds.len() < 2 {
            return Err(invalid(format!("need at least 2 folds, got {}", folds.len())));
        }
        let size: usize = folds.iter().map(Vec::len).sum();
        let mut seen = vec![false; size];
        for &i in folds.iter().flatten() {
            if i >= size || seen[i] {
                return Err(invalid("folds must be disjoint and cover 0..size"));
            }
            seen[i] = true;
        }
        Ok(Self { folds, size })
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Fold id of every sample position.
    pub fn assignment(&self) -> Vec<usize> {
        let mut owner = vec![0; self.size];
        for (f, fold) in self.folds.iter().enumerate() {
            for &i in fold {
                owner[i] = f;
            }
        }
        owner
    }
}

/// Per-fold scale factors applied to fold losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaWeights {
    lambdas: Vec<f64>,
    unbiased: bool,
}

impl LambdaWeights {
    /// All-ones weights; plain k-fold averaging.
    pub fn uniform(k: usize) -> Self {
        Self {
            lambdas: vec![1.0; k],
            unbiased: true,
        }
    }

    /// Weights that must satisfy `sum(lambda) == k`.
    pub fn unbiased(lambdas: Vec<f64>) -> Result<Self> {
        check_entries(&lambdas)?;
        let k = lambdas.len() as f64;
        let sum: f64 = lambdas.iter().sum();
        if (sum - k).abs() > LAMBDA_SUM_TOLERANCE {
            return Err(invalid(format!(
                "unbiased weights must sum to k = {k}, got {sum}"
            )));
        }
        Ok(Self {
            lambdas,
            unbiased: true,
        })
    }

    /// Rescales arbitrary non-negative weights so that they sum to k.
    pub fn normalized(lambdas: Vec<f64>) -> Result<Self> {
        check_entries(&lambdas)?;
        let k = lambdas.len() as f64;
        let sum: f64 = lambdas.iter().sum();
        Ok(Self {
            lambdas: lambdas.iter().map(|l| l * k / sum).collect(),
            unbiased: true,
        })
    }

    /// Weights without the sum constraint. The weighted loss is then biased
    /// by the factor `sum(lambda) / k`.
    pub fn unconstrained(lambdas: Vec<f64>) -> Result<Self> {
        check_entries(&lambdas)?;
        Ok(Self {
            lambdas,
            unbiased: false,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn is_unbiased(&self) -> bool {
        self.unbiased
    }
}

fn check_entries(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(invalid("lambda weights are empty"));
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(invalid("lambda weights must be finite and non-negative"));
    }
    if lambdas.iter().sum::<f64>() <= 0.0 {
        return Err(invalid("lambda weights must have a positive sum"));
    }
    Ok(())
}

/// Shuffles `0..sample_size` and slices it into k contiguous folds whose
/// sizes differ by at most one (the first `size % k` folds get the extra item).
pub fn make_folds(sample_size: usize, k: usize, stream: &mut RngStream) -> Result<FoldPlan> {
    if k < 2 || k > sample_size {
        return Err(invalid(format!(
            "fold count {k} must lie in [2, {sample_size}]"
        )));
    }
    let mut order: Vec<usize> = (0..sample_size).collect();
    order.shuffle(stream);
    let base = sample_size / k;
    let extra = sample_size % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(FoldPlan {
        folds,
        size: sample_size,
    })
}

/// Model trained on the complement of one fold, and its loss on that fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldOutcome {
    pub train: ModelParams,
    pub loss: f64,
}

/// Trains on S \ S_i and validates on S_i for every fold i.
pub fn kfold_evaluate(sample: &[f64], plan: &FoldPlan) -> Result<Vec<FoldOutcome>> {
    if sample.len() != plan.size() {
        return Err(invalid(format!(
            "fold plan covers {} points but the sample has {}",
            plan.size(),
            sample.len()
        )));
    }
    let owner = plan.assignment();
    plan.folds()
        .iter()
        .enumerate()
        .map(|(f, fold)| {
            if fold.is_empty() {
                return Err(invalid(format!("fold {f} is empty")));
            }
            let train_len = sample.len() - fold.len();
            let train = sample
                .iter()
                .zip(&owner)
                .filter(move |(_, &o)| o != f)
                .map(|(&x, _)| x);
            let model = fit_iter(train, train_len)?;
            let loss = loss_iter(&model, fold.iter().map(|&i| sample[i]), fold.len())?;
            Ok(FoldOutcome { train: model, loss })
        })
        .collect()
}

/// Element i is `loss(fit(S \ S_i), S_i)`.
pub fn kfold_losses(sample: &[f64], plan: &FoldPlan) -> Result<Vec<f64>> {
    Ok(kfold_evaluate(sample, plan)?.into_iter().map(|o| o.loss).collect())
}

/// Average validation loss across folds.
pub fn empirical_kfold_loss(losses: &[f64]) -> Result<f64> {
    if losses.is_empty() {
        return Err(invalid("no fold losses"));
    }
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// `(1/k) * sum(lambda_i * L_i)`.
pub fn weighted_kfold_loss(losses: &[f64], weights: &LambdaWeights) -> Result<f64> {
    if losses.is_empty() {
        return Err(invalid("no fold losses"));
    }
    if losses.len() != weights.len() {
        return Err(invalid(format!(
            "{} fold losses but {} weights",
            losses.len(),
            weights.len()
        )));
    }
    let k = losses.len() as f64;
    if weights.is_unbiased() {
        let sum: f64 = weights.lambdas().iter().sum();
        if (sum - k).abs() > LAMBDA_SUM_TOLERANCE {
            return Err(invalid(format!("weights sum to {sum}, expected {k}")));
        }
    }
    let total: f64 = losses
        .iter()
        .zip(weights.lambdas())
        .map(|(l, w)| l * w)
        .sum();
    Ok(total / k)
}

/// Aggregate of a repeated k-fold run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KfcvEstimate {
    /// Average training-complement mean over all repetitions and folds.
    pub mean_est: f64,
    /// Average training-complement variance over all repetitions and folds.
    pub var_est: f64,
    /// Average lambda-weighted loss over repetitions.
    pub loss: f64,
}

/// Repeated k-fold cross-validation. Each repetition draws a fresh partition
/// fraction on [0.60, 0.90], a fresh SRS working sample and a fresh fold plan
/// from `stream`.
pub fn repeated_kfcv(
    data: &Dataset,
    k: usize,
    repetitions: usize,
    weights: &LambdaWeights,
    stream: &mut RngStream,
) -> Result<KfcvEstimate> {
    repeated_kfcv_with(data, k, repetitions, weights, SampleSizeRule::default(), stream)
}

/// [`repeated_kfcv`] with an explicit working-sample size rule.
pub fn repeated_kfcv_with(
    data: &Dataset,
    k: usize,
    repetitions: usize,
    weights: &LambdaWeights,
    rule: SampleSizeRule,
    stream: &mut RngStream,
) -> Result<KfcvEstimate> {
    rule.validate()?;
    if repetitions == 0 {
        return Err(invalid("repetitions must be at least 1"));
    }
    if weights.len() != k {
        return Err(invalid(format!("{} weights for {k} folds", weights.len())));
    }
    let (mut mean_sum, mut var_sum, mut loss_sum) = (0.0, 0.0, 0.0);
    for _ in 0..repetitions {
        let (_, m) = rule.draw(data.n(), stream);
        let sample = srs_sample(data, m, stream)?.gather(data);
        let plan = make_folds(m, k, stream)?;
        let outcomes = kfold_evaluate(&sample, &plan)?;
        for o in &outcomes {
            mean_sum += o.train.fitted_mean;
            var_sum += o.train.fitted_var;
        }
        let losses: Vec<f64> = outcomes.iter().map(|o| o.loss).collect();
        loss_sum += weighted_kfold_loss(&losses, weights)?;
    }
    let fits = (repetitions * k) as f64;
    Ok(KfcvEstimate {
        mean_est: mean_sum / fits,
        var_est: var_sum / fits,
        loss: loss_sum / repetitions as f64,
    })
}

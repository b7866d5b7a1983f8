//! The fitted model: a mean predictor scored by squared error.
//!
//! The study's "model" estimates location and scale of its training data and
//! predicts the fitted mean for every held-out point.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub fitted_mean: f64,
    /// Unbiased (n - 1) sample variance of the training values.
    pub fitted_var: f64,
}

/// Fits mean and unbiased variance; needs at least two points.
pub fn fit(train: &[f64]) -> Result<ModelParams> {
    fit_iter(train.iter().copied(), train.len())
}

/// Same as [`fit`] over any re-iterable source of `len` values.
pub(crate) fn fit_iter<I>(values: I, len: usize) -> Result<ModelParams>
where
    I: Iterator<Item = f64> + Clone,
{
    if len < 2 {
        return Err(invalid(format!("need at least 2 training points, got {len}")));
    }
    let n = len as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|x| (x - mean).powi(2)).sum();
    Ok(ModelParams {
        fitted_mean: mean,
        fitted_var: ss / (n - 1.0),
    })
}

/// Mean squared prediction error of `model` on `validation`.
pub fn loss(model: &ModelParams, validation: &[f64]) -> Result<f64> {
    loss_iter(model, validation.iter().copied(), validation.len())
}

pub(crate) fn loss_iter<I>(model: &ModelParams, values: I, len: usize) -> Result<f64>
where
    I: Iterator<Item = f64>,
{
    if len == 0 {
        return Err(invalid("validation set is empty"));
    }
    let c = model.fitted_mean;
    Ok(values.map(|v| (v - c).powi(2)).sum::<f64>() / len as f64)
}

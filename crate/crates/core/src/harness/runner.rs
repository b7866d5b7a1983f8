use std::time::Instant;

use crate::datagen::generate_dataset;
use crate::error::{Error, Result};
use crate::fsv::{compound_measure, draw_split, evaluate_split};
use crate::kfold::{repeated_kfcv_with, LambdaWeights};
use crate::metrics::{summarize, trial_metrics, Method, TrialMetrics};
use crate::rng::{derive_stream, Purpose};

use super::config::ExperimentConfig;
use super::report::{CellReport, ExperimentReport, PerTrial, RunMetadata};

/// Outcome of one trial for all three methods.
#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    srs: TrialMetrics,
    kfcv: TrialMetrics,
    fsv: TrialMetrics,
    fsv_loss: f64,
}

fn run_trial(
    config: &ExperimentConfig,
    weights: &LambdaWeights,
    n: usize,
    trial: u64,
) -> Result<TrialOutcome> {
    let seed = config.base_seed;
    let stream = |p: Purpose| derive_stream(seed, trial, p.tag());
    let rule = config.sample_size_rule();

    let data = generate_dataset(n, config.mu, config.sigma2, &mut stream(Purpose::Data))?;

    let srs_split = draw_split(
        &data,
        config.k,
        rule,
        &mut stream(Purpose::Fraction),
        &mut stream(Purpose::Srs),
        &mut stream(Purpose::Folds),
    )?;
    let srs_eval = evaluate_split(&srs_split)?;
    let srs = srs_eval.metrics(&data);

    let kf = repeated_kfcv_with(
        &data,
        config.k,
        config.repetitions,
        weights,
        rule,
        &mut stream(Purpose::Kfcv),
    )?;
    // Bias is a property of the trial's base partition, shared with SRS.
    let kfcv = trial_metrics(
        kf.mean_est,
        kf.var_est,
        kf.loss,
        data.true_mean(),
        data.true_var(),
        srs_eval.first_fold_loss,
    );

    let fsv_eval = if config.shared_streams {
        srs_eval
    } else {
        let split = draw_split(
            &data,
            config.k,
            rule,
            &mut stream(Purpose::FsvFraction),
            &mut stream(Purpose::FsvSrs),
            &mut stream(Purpose::FsvFolds),
        )?;
        evaluate_split(&split)?
    };
    let fsv = fsv_eval.metrics(&data).scaled(config.alpha);

    Ok(TrialOutcome {
        srs,
        kfcv,
        fsv,
        fsv_loss: fsv_eval.loss,
    })
}

#[cfg(feature = "parallel")]
fn run_trials(config: &ExperimentConfig, weights: &LambdaWeights, n: usize, t: usize) -> Result<Vec<TrialOutcome>> {
    use rayon::prelude::*;
    (0..t as u64)
        .into_par_iter()
        .map(|i| run_trial(config, weights, n, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_trials(config: &ExperimentConfig, weights: &LambdaWeights, n: usize, t: usize) -> Result<Vec<TrialOutcome>> {
    (0..t as u64).map(|i| run_trial(config, weights, n, i)).collect()
}

fn cell(config: &ExperimentConfig, n: usize, t: usize) -> Result<CellReport> {
    let weights = config.weights()?;
    let outcomes = run_trials(config, &weights, n, t)?;
    let per_trial = PerTrial {
        srs: outcomes.iter().map(|o| o.srs).collect(),
        kfcv: outcomes.iter().map(|o| o.kfcv).collect(),
        fsv: outcomes.iter().map(|o| o.fsv).collect(),
        fsv_loss: outcomes.iter().map(|o| o.fsv_loss).collect(),
    };
    let summaries = Method::ALL
        .iter()
        .map(|&m| summarize(per_trial.get(m), m, n, t))
        .collect::<Result<Vec<_>>>()?;
    let fsv_compounded = compound_measure(&per_trial.fsv_loss, config.alpha)?;
    Ok(CellReport {
        n,
        trials: t,
        summaries,
        fsv_compounded,
        per_trial,
    })
}

/// Runs the three methods for a single (N, T) cell.
///
/// Trial i always uses streams derived from `(base_seed, i)`, so the first
/// T trials of a larger cell reproduce a smaller one exactly.
pub fn run_cell(config: &ExperimentConfig, n: usize, t: usize) -> Result<CellReport> {
    let single = ExperimentConfig {
        sizes: vec![n],
        trials: vec![t],
        ..config.clone()
    };
    single.validate().and_then(|_| cell(&single, n, t)).map_err(|e| Error::Cell {
        n,
        trials: t,
        source: Box::new(e),
    })
}

fn run_grid(config: &ExperimentConfig) -> Result<Vec<CellReport>> {
    let mut cells = Vec::with_capacity(config.sizes.len() * config.trials.len());
    for &n in &config.sizes {
        for &t in &config.trials {
            cells.push(cell(config, n, t).map_err(|e| Error::Cell {
                n,
                trials: t,
                source: Box::new(e),
            })?);
        }
    }
    Ok(cells)
}

/// Runs every (N, T) cell of the grid. The result depends only on the
/// configuration, never on `jobs`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let cells = pooled(config, || run_grid(config))?;
    Ok(ExperimentReport {
        metadata: RunMetadata::new(config, start.elapsed().as_secs_f64()),
        config: config.clone(),
        cells,
    })
}

#[cfg(feature = "parallel")]
fn pooled<T: Send>(config: &ExperimentConfig, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match config.jobs {
        None => job(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::error::invalid(format!("cannot start {threads} workers: {e}")))?
            .install(job),
    }
}

#[cfg(not(feature = "parallel"))]
fn pooled<T>(_config: &ExperimentConfig, job: impl FnOnce() -> Result<T>) -> Result<T> {
    job()
}

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws with a
//! plain 2D canvas.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fsval_core::harness::report::emit_markdown_table;
use fsval_core::harness::{run_cell, ExperimentConfig, ExperimentReport, RunMetadata};
use fsval_core::metrics::{Method, Metric};
use fsval_core::theory::{chebyshev_threshold, hoeffding_tail, hybrid_variance};

/// Largest dataset and trial count the page will run in one call.
pub const MAX_N: usize = 100_000;
pub const MAX_T: usize = 200;
pub const MAX_CURVE_T: usize = 10_000;

type Outcome = Result<Value, String>;

/// Runs one (N, T) cell and returns summaries, per-trial series and a
/// markdown table.
pub fn cell_json(n: usize, t: usize, k: usize, reps: usize, alpha: f64, seed: u64, shared: bool) -> Outcome {
    if n > MAX_N || t > MAX_T {
        return Err(format!("demo limits are N <= {MAX_N} and T <= {MAX_T}"));
    }
    let cfg = ExperimentConfig {
        sizes: vec![n],
        trials: vec![t],
        k,
        repetitions: reps,
        alpha,
        base_seed: seed,
        shared_streams: shared,
        ..ExperimentConfig::default()
    };
    let cell = run_cell(&cfg, n, t).map_err(|e| e.to_string())?;
    let series: serde_json::Map<String, Value> = Metric::ALL
        .iter()
        .map(|&metric| {
            let by_method: serde_json::Map<String, Value> = Method::ALL
                .iter()
                .map(|&m| {
                    let xs: Vec<f64> = cell.per_trial.get(m).iter().map(|tr| tr.get(metric)).collect();
                    (m.label().to_string(), json!(xs))
                })
                .collect();
            (metric.key().to_string(), Value::Object(by_method))
        })
        .collect();
    let summaries = json!(cell.summaries);
    let lstar = cell.fsv_compounded;
    let report = ExperimentReport {
        metadata: RunMetadata::new(&cfg, 0.0),
        config: cfg,
        cells: vec![cell],
    };
    let table = emit_markdown_table(&report, n).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "t": t,
        "fsv_compounded": lstar,
        "summaries": summaries,
        "series": series,
        "table": table,
    }))
}

/// Chebyshev deviation and Hoeffding tail as functions of T = 1..=t_max.
pub fn concentration_json(sigma_hyb2: f64, a: f64, b: f64, epsilon: f64, k_dev: f64, t_max: usize) -> Outcome {
    if t_max == 0 || t_max > MAX_CURVE_T {
        return Err(format!("t_max must lie in [1, {MAX_CURVE_T}]"));
    }
    if !(sigma_hyb2 >= 0.0) || !(k_dev > 0.0) {
        return Err("sigma_hyb2 must be non-negative and k_dev positive".into());
    }
    let ts: Vec<usize> = (1..=t_max).collect();
    let threshold: Vec<f64> = ts.iter().map(|&t| chebyshev_threshold(sigma_hyb2, t, k_dev)).collect();
    let hoeffding = ts
        .iter()
        .map(|&t| hoeffding_tail(epsilon, t, a, b).map(|h| h.capped))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "t": ts,
        "chebyshev_threshold": threshold,
        "chebyshev_tail": fsval_core::theory::chebyshev_tail(k_dev),
        "hoeffding_tail": hoeffding,
    }))
}

/// Variance budget of the compounded measure for T = 1..=t_max.
pub fn budget_json(sigma2: f64, n: usize, population: usize, fold_var: f64, k: usize, t_max: usize) -> Outcome {
    if t_max == 0 || t_max > MAX_CURVE_T {
        return Err(format!("t_max must lie in [1, {MAX_CURVE_T}]"));
    }
    if k == 0 {
        return Err("k must be positive".into());
    }
    let folds = vec![fold_var; k];
    let budgets = (1..=t_max)
        .map(|t| hybrid_variance(sigma2, n, population, &folds, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let first = budgets[0];
    Ok(json!({
        "srs_component": first.srs_component,
        "kfcv_component": first.kfcv_component,
        "t": budgets.iter().map(|b| b.t).collect::<Vec<_>>(),
        "total_per_t": budgets.iter().map(|b| b.total_per_t).collect::<Vec<_>>(),
    }))
}

fn to_js(outcome: Outcome) -> Result<String, JsValue> {
    outcome
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate_cell(n: usize, t: usize, k: usize, reps: usize, alpha: f64, seed: u64, shared: bool) -> Result<String, JsValue> {
    to_js(cell_json(n, t, k, reps, alpha, seed, shared))
}

#[wasm_bindgen]
pub fn concentration_curves(sigma_hyb2: f64, a: f64, b: f64, epsilon: f64, k_dev: f64, t_max: usize) -> Result<String, JsValue> {
    to_js(concentration_json(sigma_hyb2, a, b, epsilon, k_dev, t_max))
}

#[wasm_bindgen]
pub fn variance_budget(sigma2: f64, n: usize, population: usize, fold_var: f64, k: usize, t_max: usize) -> Result<String, JsValue> {
    to_js(budget_json(sigma2, n, population, fold_var, k, t_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_payload_shape() {
        let v = cell_json(2_000, 5, 5, 2, 0.95, 42, true).unwrap();
        assert_eq!(v["summaries"].as_array().unwrap().len(), 3);
        let srs = v["series"]["mse"]["SRS"].as_array().unwrap();
        let fsv = v["series"]["mse"]["FSV"].as_array().unwrap();
        assert_eq!(srs.len(), 5);
        for (s, f) in srs.iter().zip(fsv) {
            let (s, f) = (s.as_f64().unwrap(), f.as_f64().unwrap());
            assert!((0.95 * s - f).abs() < 1e-12);
        }
        assert!(v["table"].as_str().unwrap().contains("Var est. FSV"));
    }

    #[test]
    fn cell_limits() {
        assert!(cell_json(MAX_N + 1, 5, 5, 1, 0.95, 42, false).is_err());
        assert!(cell_json(1_000, 5, 1, 1, 0.95, 42, false).is_err());
    }

    #[test]
    fn curves() {
        let v = concentration_json(1.0, 0.0, 1.0, 0.1, 2.0, 400).unwrap();
        let th = v["chebyshev_threshold"].as_array().unwrap();
        assert_eq!(th[3].as_f64().unwrap(), 1.0);
        let h = v["hoeffding_tail"].as_array().unwrap();
        assert!((h[99].as_f64().unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(concentration_json(1.0, 1.0, 1.0, 0.1, 2.0, 10).is_err());

        let b = budget_json(1.0, 7_500, 10_000, 0.0013, 5, 10).unwrap();
        let tot = b["total_per_t"].as_array().unwrap();
        assert!((tot[9].as_f64().unwrap() - 1.333_333_333e-4).abs() < 1e-12);
        assert!(budget_json(1.0, 11, 10, 0.0, 5, 10).is_err());
    }
}

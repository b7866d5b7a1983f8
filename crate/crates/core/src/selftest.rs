//! Fast invariant checks that can be run from an installed binary.

use crate::error::Result;
use crate::harness::{run_cell, ExperimentConfig};
use crate::kfold::{empirical_kfold_loss, make_folds, weighted_kfold_loss, LambdaWeights};
use crate::rng::derive_stream;
use crate::sampling::srs_indices;
use crate::theory::{hoeffding_tail, hybrid_variance, srs_variance_component};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn fold_cover() -> Result<Check> {
    let mut cases = 0;
    for size in 2..=12 {
        for k in 2..=size {
            let plan = make_folds(size, k, &mut derive_stream(size as u64, k as u64, 3))?;
            let mut hits = vec![0u8; size];
            plan.folds().iter().flatten().for_each(|&i| hits[i] += 1);
            let lens: Vec<usize> = plan.folds().iter().map(Vec::len).collect();
            let spread = lens.iter().max().unwrap() - lens.iter().min().unwrap();
            if hits.iter().any(|&h| h != 1) || spread > 1 {
                return Ok(check("fold disjoint cover", false, format!("size {size}, k {k}")));
            }
            cases += 1;
        }
    }
    Ok(check("fold disjoint cover", true, format!("{cases} (size, k) cases")))
}

fn subset_uniformity() -> Result<Check> {
    // C(5, 2) = 10 subsets, each with probability 1/10.
    let reps = 50_000u32;
    let mut counts = [[0u32; 5]; 5];
    let mut s = derive_stream(17, 0, 2);
    for _ in 0..reps {
        let mut idx = srs_indices(5, 2, &mut s)?;
        idx.sort_unstable();
        counts[idx[0]][idx[1]] += 1;
    }
    let expected = f64::from(reps) / 10.0;
    let mut chi2 = 0.0;
    for a in 0..5 {
        for b in a + 1..5 {
            chi2 += (f64::from(counts[a][b]) - expected).powi(2) / expected;
        }
    }
    // 0.999 quantile of chi-square with 9 degrees of freedom.
    Ok(check("SRS subset uniformity", chi2 < 27.88, format!("chi2 = {chi2:.2}")))
}

fn finite_population() -> Result<Check> {
    let at_census = srs_variance_component(1.0, 500, 500)?;
    let budget = hybrid_variance(1.0, 300, 500, &[0.01; 5], 1)?;
    let ok = at_census == 0.0 && budget.total_per_t == budget.srs_component + budget.kfcv_component;
    Ok(check("finite-population correction", ok, format!("Var at n = N: {at_census}")))
}

fn lambda_reduction() -> Result<Check> {
    let losses = [0.91, 1.07, 0.98, 1.12, 0.95];
    let plain = empirical_kfold_loss(&losses)?;
    let uniform = weighted_kfold_loss(&losses, &LambdaWeights::uniform(5))?;
    let skewed = LambdaWeights::unbiased(vec![0.2, 1.8, 1.0, 0.5, 1.5])?;
    let equal = weighted_kfold_loss(&[0.7; 5], &skewed)?;
    let ok = plain == uniform && (equal - 0.7).abs() < 1e-15;
    Ok(check("lambda weighting", ok, format!("plain {plain:.6}, uniform {uniform:.6}")))
}

fn hoeffding_value() -> Result<Check> {
    let h = hoeffding_tail(0.1, 100, 0.0, 1.0)?;
    let ok = (h.raw - 2.0 * (-2.0f64).exp()).abs() < 1e-15;
    Ok(check("Hoeffding bound", ok, format!("{:.5}", h.raw)))
}

fn fsv_scaling_and_replay() -> Result<Vec<Check>> {
    let cfg = ExperimentConfig {
        shared_streams: true,
        ..ExperimentConfig::default()
    };
    let a = run_cell(&cfg, 2_000, 10)?;
    let b = run_cell(&cfg, 2_000, 10)?;
    let worst = a
        .per_trial
        .srs
        .iter()
        .zip(&a.per_trial.fsv)
        .flat_map(|(s, f)| {
            crate::metrics::Metric::ALL
                .into_iter()
                .map(move |m| (cfg.alpha * s.get(m) - f.get(m)).abs())
        })
        .fold(0.0, f64::max);
    Ok(vec![
        check("FSV = alpha x SRS on shared streams", worst <= 1e-12, format!("max gap {worst:e}")),
        check("replay determinism", a == b, "two runs of one cell"),
    ])
}

/// Runs every check; the whole suite takes well under a second in release builds.
pub fn run_all() -> Result<Vec<Check>> {
    let mut out = vec![
        fold_cover()?,
        subset_uniformity()?,
        finite_population()?,
        lambda_reduction()?,
        hoeffding_value()?,
    ];
    out.extend(fsv_scaling_and_replay()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_all().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}

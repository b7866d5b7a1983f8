//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p fsval-core --test acceptance`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use fsval_core::datagen::generate_dataset;
use fsval_core::fsv::{draw_split_from, fsv_run, FsvConfig, SampleSizeRule};
use fsval_core::harness::{run_cell, run_experiment, ExperimentConfig};
use fsval_core::kfold::{
    empirical_kfold_loss, kfold_losses, make_folds, weighted_kfold_loss, LambdaWeights,
};
use fsval_core::metrics::{Method, Metric};
use fsval_core::rng::{derive_stream, Purpose};
use fsval_core::sampling::srs_indices;
use fsval_core::theory::{chebyshev_tail, hoeffding_tail, srs_variance_component};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// 1. Table-scale values at N = 10,000, T = 100 with the default protocol.
fn table_scale() -> Outcome {
    let cell = run_cell(&ExperimentConfig::default(), 10_000, 100).unwrap();
    let get = |m: Method, x: Metric| cell.summary(m).get(x).mean;
    let mut fails = Vec::new();
    for m in Method::ALL {
        if get(m, Metric::MeanEst).abs() > 0.01 {
            fails.push(format!("mean est {m}"));
        }
    }
    for m in [Method::Srs, Method::Kfcv] {
        if !(0.99..=1.01).contains(&get(m, Metric::VarEst)) {
            fails.push(format!("var est {m}"));
        }
    }
    if !(0.93..=0.97).contains(&get(Method::Fsv, Metric::VarEst)) {
        fails.push("var est FSV".into());
    }
    if !(0.93..=0.98).contains(&get(Method::Fsv, Metric::Mse)) {
        fails.push("MSE FSV".into());
    }
    outcome(
        fails.is_empty(),
        format!(
            "var est SRS {:.4} KF {:.4} FSV {:.4}; MSE FSV {:.4}; mean est {:.4}/{:.4}/{:.4}{}",
            get(Method::Srs, Metric::VarEst),
            get(Method::Kfcv, Metric::VarEst),
            get(Method::Fsv, Metric::VarEst),
            get(Method::Fsv, Metric::Mse),
            get(Method::Srs, Metric::MeanEst),
            get(Method::Kfcv, Metric::MeanEst),
            get(Method::Fsv, Metric::MeanEst),
            if fails.is_empty() { String::new() } else { format!("; out of band: {}", fails.join(", ")) }
        ),
    )
}

/// 2. With shared streams every FSV summary value is 0.95 x the SRS value.
fn fsv_scaling_identity() -> Outcome {
    let cfg = ExperimentConfig {
        sizes: vec![10_000],
        shared_streams: true,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&cfg).unwrap();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for cell in &report.cells {
        let (srs, fsv) = (cell.summary(Method::Srs), cell.summary(Method::Fsv));
        for metric in Metric::ALL {
            let (a, b) = (srs.get(metric), fsv.get(metric));
            for (x, y) in [(a.mean, b.mean), (a.min, b.min), (a.max, b.max)] {
                worst = worst.max((0.95 * x - y).abs());
                compared += 1;
            }
        }
    }
    outcome(worst <= 1e-12, format!("{compared} summary values, max |0.95 SRS - FSV| = {worst:.2e}"))
}

/// 3. Mean bias shrinks like 1/sqrt(N).
fn bias_scaling() -> Outcome {
    let cfg = ExperimentConfig::default();
    let small = run_cell(&cfg, 10_000, 100).unwrap().summary(Method::Srs).bias.mean;
    let large = run_cell(&cfg, 100_000, 100).unwrap().summary(Method::Srs).bias.mean;
    let ratio = small / large;
    let target = 10f64.sqrt();
    outcome(
        (0.75 * target..=1.25 * target).contains(&ratio),
        format!("bias {small:.4} / {large:.4} = {ratio:.3}, band [{:.3}, {:.3}]", 0.75 * target, 1.25 * target),
    )
}

/// 4. Mean ROC of the SRS mean estimate against the mean absolute deviation
///    of a 75% subsample mean.
fn roc_oracle() -> Outcome {
    let cfg = ExperimentConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [10_000usize, 50_000, 100_000] {
        let observed = run_cell(&cfg, n, 100).unwrap().summary(Method::Srs).roc_me.mean;
        let oracle = (2.0 / std::f64::consts::PI).sqrt() / (0.75 * n as f64).sqrt();
        let rel = (observed - oracle).abs() / oracle;
        ok &= rel <= 0.15;
        parts.push(format!("N={n}: {observed:.5} vs {oracle:.5} ({:.1}%)", 100.0 * rel));
    }
    outcome(ok, parts.join("; "))
}

/// 5. k-fold loss is unbiased for sigma2 (1 + 1/n_train); unbiased lambda
///    weights leave equal losses unchanged.
fn unbiasedness() -> Outcome {
    let (n, k, trials) = (10_000usize, 5usize, 2_000u64);
    let mut losses = Vec::with_capacity(trials as usize);
    let mut expected = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let data = generate_dataset(n, 0.0, 1.0, &mut derive_stream(2024, t, Purpose::Data.tag())).unwrap();
        let split = draw_split_from(&data, k, SampleSizeRule::default(), &mut derive_stream(2024, t, Purpose::Srs.tag())).unwrap();
        let fold_losses = kfold_losses(&split.sample, &split.plan).unwrap();
        losses.push(empirical_kfold_loss(&fold_losses).unwrap());
        // Exact expectation for this partition: fold i validates against a
        // mean trained on m - |S_i| independent points.
        let m = split.sample.len();
        let e: f64 = split
            .plan
            .folds()
            .iter()
            .map(|f| 1.0 + 1.0 / (m - f.len()) as f64)
            .sum::<f64>()
            / k as f64;
        expected.push(e);
    }
    let observed = mean(&losses);
    let target = mean(&expected);
    let se = (sample_var(&losses) / trials as f64).sqrt();
    let z = (observed - target) / se;
    let nominal = 1.0 + k as f64 / ((k - 1) as f64 * 0.75 * n as f64);

    let lam = LambdaWeights::unbiased(vec![0.25, 1.75, 1.5, 0.5, 1.0]).unwrap();
    let equal = [1.0002; 5];
    let weighted = weighted_kfold_loss(&equal, &lam).unwrap();
    let plain = empirical_kfold_loss(&equal).unwrap();
    let lambda_ok = weighted == plain;

    outcome(
        z.abs() <= 4.0 && lambda_ok,
        format!(
            "mean loss {observed:.5}, expected {target:.5} (nominal {nominal:.5}), z = {z:.2}; weighted {weighted} vs plain {plain}"
        ),
    )
}

/// 6. Var(L*) at T = 40 is a quarter of Var(L*) at T = 10.
fn variance_in_t() -> Outcome {
    let data = generate_dataset(10_000, 0.0, 1.0, &mut derive_stream(77, 0, Purpose::Data.tag())).unwrap();
    let runs = 300u64;
    let lstar = |t: usize, offset: u64| -> Vec<f64> {
        let cfg = FsvConfig { iterations: t, ..FsvConfig::default() };
        (0..runs)
            .map(|r| fsv_run(&data, &cfg, &mut derive_stream(77, offset + r, 9)).unwrap().compounded_measure)
            .collect()
    };
    let v10 = sample_var(&lstar(10, 1));
    let v40 = sample_var(&lstar(40, 1 + runs));
    let ratio = v40 / v10;
    outcome(
        (0.175..=0.325).contains(&ratio),
        format!("Var(L*) T=10 {v10:.3e}, T=40 {v40:.3e}, ratio {ratio:.3}"),
    )
}

/// 7. Chebyshev and Hoeffding bounds hold empirically for clipped losses.
fn concentration_bounds() -> Outcome {
    let data = generate_dataset(1_000, 0.0, 1.0, &mut derive_stream(99, 0, Purpose::Data.tag())).unwrap();
    let (runs, t) = (5_000u64, 10usize);
    let cfg = FsvConfig { iterations: t, alpha: 1.0, ..FsvConfig::default() };
    let estimates: Vec<f64> = (0..runs)
        .map(|r| {
            let res = fsv_run(&data, &cfg, &mut derive_stream(99, r + 1, 9)).unwrap();
            mean(&res.per_iteration_loss.iter().map(|l| l.clamp(0.0, 4.0)).collect::<Vec<_>>())
        })
        .collect();
    let centre = mean(&estimates);
    let sd = sample_var(&estimates).sqrt();
    let freq = |pred: &dyn Fn(f64) -> bool| estimates.iter().filter(|&&x| pred(x)).count() as f64 / runs as f64;
    let se = |p: f64| (p * (1.0 - p) / runs as f64).sqrt();

    let mut ok = true;
    let mut parts = Vec::new();
    for k in [1.5, 2.0, 3.0] {
        let bound = chebyshev_tail(k);
        let f = freq(&|x| (x - centre).abs() >= k * sd);
        ok &= f <= bound + 3.0 * se(bound);
        parts.push(format!("cheb k={k}: {f:.4} <= {bound:.4}"));
    }
    for eps in [0.01, 0.02, 0.05] {
        let bound = hoeffding_tail(eps, t, 0.0, 4.0).unwrap().capped;
        let f = freq(&|x| (x - centre).abs() > eps);
        ok &= f <= bound + 3.0 * se(bound);
        parts.push(format!("hoeff eps={eps}: {f:.4} <= {bound:.4}"));
    }
    outcome(ok, parts.join("; "))
}

/// 8. Fold cover, subset uniformity, finite-population correction.
fn structural() -> Outcome {
    let mut cover_cases = 0;
    for size in 2..=12usize {
        for k in 2..=size {
            let plan = make_folds(size, k, &mut derive_stream(8, (size * 100 + k) as u64, 3)).unwrap();
            let mut hits = vec![0u32; size];
            for &i in plan.folds().iter().flatten() {
                hits[i] += 1;
            }
            let lens: Vec<usize> = plan.folds().iter().map(Vec::len).collect();
            if hits.iter().any(|&h| h != 1) || lens.iter().max().unwrap() - lens.iter().min().unwrap() > 1 {
                return outcome(false, format!("fold cover broken at size {size}, k {k}"));
            }
            cover_cases += 1;
        }
    }

    // 0.999 chi-square quantiles by degrees of freedom.
    let quantile: HashMap<usize, f64> = [(5, 20.515), (9, 27.877), (14, 36.123), (19, 43.820)].into();
    let mut chi_parts = Vec::new();
    for (case, (n, m)) in [(4usize, 2usize), (5, 2), (5, 3), (6, 2), (6, 3)].into_iter().enumerate() {
        let subsets = enumerate_subsets(n, m);
        let mut counts: HashMap<Vec<usize>, u32> = subsets.iter().map(|s| (s.clone(), 0)).collect();
        let reps = 200_000u32;
        let mut stream = derive_stream(8, case as u64, 2);
        for _ in 0..reps {
            let mut idx = srs_indices(n, m, &mut stream).unwrap();
            idx.sort_unstable();
            *counts.get_mut(&idx).unwrap() += 1;
        }
        let e = f64::from(reps) / subsets.len() as f64;
        let chi2: f64 = counts.values().map(|&c| (f64::from(c) - e).powi(2) / e).sum();
        let limit = quantile[&(subsets.len() - 1)];
        if chi2 >= limit {
            return outcome(false, format!("subset chi2 {chi2:.2} >= {limit} at n={n}, m={m}"));
        }
        chi_parts.push(format!("{n}C{m}: {chi2:.1}"));
    }

    let fpc = srs_variance_component(1.0, 10_000, 10_000).unwrap();
    outcome(
        fpc == 0.0,
        format!("{cover_cases} fold cases; chi2 {}; FPC at n=N = {fpc}", chi_parts.join(", ")),
    )
}

fn enumerate_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == m)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// 9. Full default grid under 5 minutes; one (10^4, 10) cell under 2 s.
fn performance() -> Outcome {
    let cfg = ExperimentConfig::default();
    let t0 = Instant::now();
    run_cell(&cfg, 10_000, 10).unwrap();
    let cell_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let report = run_experiment(&cfg).unwrap();
    let grid_secs = t1.elapsed().as_secs_f64();
    outcome(
        cell_secs < 2.0 && grid_secs < 300.0 && report.cells.len() == 9,
        format!("cell (10^4, 10) {cell_secs:.2} s; full grid {grid_secs:.1} s over {} cells", report.cells.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("C1 table-scale reproduction", table_scale),
        ("C2 FSV = 0.95 x SRS (shared streams)", fsv_scaling_identity),
        ("C3 bias ~ 1/sqrt(N)", bias_scaling),
        ("C4 ROC_ME oracle", roc_oracle),
        ("C5 unbiasedness", unbiasedness),
        ("C6 variance-in-T law", variance_in_t),
        ("C7 concentration bounds", concentration_bounds),
        ("C8 structural invariants", structural),
        ("C9 performance", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        println!(
            "[{}] {name} ({:.1} s): {}",
            if o.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

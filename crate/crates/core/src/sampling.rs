//! Simple random sampling without replacement.

use serde::{Deserialize, Serialize};

use crate::datagen::Dataset;
use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Smallest and largest working-sample fraction drawn per trial.
pub const FRACTION_RANGE: (f64, f64) = (0.60, 0.90);

/// A subset S of a dataset, held as distinct indices into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleView {
    indices: Vec<usize>,
    source_n: usize,
}

impl SampleView {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    /// Sampled values, in sample order.
    pub fn gather(&self, data: &Dataset) -> Vec<f64> {
        let values = data.values();
        self.indices.iter().map(|&i| values[i]).collect()
    }

    /// Values of the dataset not included in the sample.
    pub fn complement(&self, data: &Dataset) -> Vec<f64> {
        let mut taken = vec![false; self.source_n];
        for &i in &self.indices {
            taken[i] = true;
        }
        data.values()
            .iter()
            .zip(taken)
            .filter_map(|(&v, t)| (!t).then_some(v))
            .collect()
    }
}

/// Uniform m-subset of `0..n` by a partial Fisher-Yates shuffle.
pub fn srs_indices(n: usize, m: usize, stream: &mut RngStream) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(invalid(format!("sample size {m} must lie in [1, {n}]")));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = i + stream.index_below(n - i);
        pool.swap(i, j);
    }
    pool.truncate(m);
    Ok(pool)
}

/// Draws S with |S| = m; every element of `data` is included with probability m/n.
pub fn srs_sample(data: &Dataset, m: usize, stream: &mut RngStream) -> Result<SampleView> {
    let indices = srs_indices(data.n(), m, stream)?;
    Ok(SampleView {
        indices,
        source_n: data.n(),
    })
}

/// Expected value and variance of the inclusion count: `(m, m(1 - m/n))`.
pub fn inclusion_moments(n: usize, m: usize) -> Result<(f64, f64)> {
    if m == 0 || m > n {
        return Err(invalid(format!("sample size {m} must lie in [1, {n}]")));
    }
    let (n, m) = (n as f64, m as f64);
    Ok((m, m * (1.0 - m / n)))
}

/// Uniform draw on `[0.60, 0.90]`.
pub fn draw_partition_fraction(stream: &mut RngStream) -> f64 {
    stream.uniform_in(FRACTION_RANGE.0, FRACTION_RANGE.1)
}

/// `round(fraction * n)`, clamped into `[1, n]`.
pub fn sample_size_for_fraction(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n.max(1))
}

/// How the working-sample size is chosen for each draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleSizeRule {
    Fixed(usize),
    /// `m = round(f * N)` with f uniform on the range.
    FractionRange(f64, f64),
}

impl Default for SampleSizeRule {
    fn default() -> Self {
        SampleSizeRule::FractionRange(FRACTION_RANGE.0, FRACTION_RANGE.1)
    }
}

impl SampleSizeRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SampleSizeRule::Fixed(0) => Err(invalid("fixed sample size must be positive")),
            SampleSizeRule::FractionRange(lo, hi) if !(0.0 < lo && lo <= hi && hi <= 1.0) => {
                Err(invalid(format!("fraction range [{lo}, {hi}] must lie in (0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Smallest sample size the rule can produce for a dataset of `n` points.
    pub fn min_size(&self, n: usize) -> usize {
        match *self {
            SampleSizeRule::Fixed(m) => m,
            SampleSizeRule::FractionRange(lo, _) => sample_size_for_fraction(n, lo),
        }
    }

    /// Draws `(fraction, m)`. The fixed rule consumes no randomness.
    pub fn draw(&self, n: usize, stream: &mut RngStream) -> (f64, usize) {
        match *self {
            SampleSizeRule::Fixed(m) => (m as f64 / n as f64, m),
            SampleSizeRule::FractionRange(lo, hi) => {
                let f = stream.uniform_in(lo, hi);
                (f, sample_size_for_fraction(n, f))
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fsv::DEFAULT_ALPHA;
use crate::kfold::LambdaWeights;
use crate::sampling::{SampleSizeRule, FRACTION_RANGE};

/// Parameters of a simulation study. The defaults are the standard grid:
/// N in {10^4, 5*10^4, 10^5}, T in {10, 50, 100}, 5 folds with 10 repetitions,
/// alpha 0.95, seed 42 and N(0, 1) data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub trials: Vec<usize>,
    pub k: usize,
    pub repetitions: usize,
    pub alpha: f64,
    pub lambdas: Option<Vec<f64>>,
    pub base_seed: u64,
    pub fraction_range: (f64, f64),
    pub mu: f64,
    pub sigma2: f64,
    /// SRS and FSV consume identical draws in every trial.
    pub shared_streams: bool,
    /// Worker threads; `None` uses every available core. Never affects results.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10_000, 50_000, 100_000],
            trials: vec![10, 50, 100],
            k: 5,
            repetitions: 10,
            alpha: DEFAULT_ALPHA,
            lambdas: None,
            base_seed: 42,
            fraction_range: FRACTION_RANGE,
            mu: 0.0,
            sigma2: 1.0,
            shared_streams: false,
            jobs: None,
        }
    }
}

impl ExperimentConfig {
    pub fn sample_size_rule(&self) -> SampleSizeRule {
        SampleSizeRule::FractionRange(self.fraction_range.0, self.fraction_range.1)
    }

    pub fn weights(&self) -> Result<LambdaWeights> {
        match &self.lambdas {
            None => Ok(LambdaWeights::uniform(self.k)),
            Some(l) if l.len() != self.k => Err(invalid(format!(
                "{} lambda weights given for k = {}",
                l.len(),
                self.k
            ))),
            Some(l) => LambdaWeights::unbiased(l.clone()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.trials.is_empty() {
            return Err(invalid("sizes and trials must be non-empty"));
        }
        if self.trials.contains(&0) {
            return Err(invalid("trial counts must be positive"));
        }
        if self.k < 2 {
            return Err(invalid(format!("k must be at least 2, got {}", self.k)));
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.sigma2 > 0.0) || !self.mu.is_finite() {
            return Err(invalid("mu must be finite and sigma2 positive"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("jobs must be at least 1"));
        }
        let rule = self.sample_size_rule();
        rule.validate()?;
        self.weights()?;
        for &n in &self.sizes {
            // Every fold's training complement needs two points.
            let m = rule.min_size(n);
            if m < self.k || m - m.div_ceil(self.k) < 2 {
                return Err(invalid(format!(
                    "N = {n} is too small for k = {} folds (smallest sample {m})",
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Config {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            self.set(key.trim(), value.trim()).map_err(|e| err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "sizes" => self.sizes = parse_list(value)?,
            "trials" => self.trials = parse_list(value)?,
            "k" => self.k = parse_one(value)?,
            "repetitions" | "reps" => self.repetitions = parse_one(value)?,
            "alpha" => self.alpha = parse_one(value)?,
            "lambdas" => {
                self.lambdas = if value.is_empty() { None } else { Some(parse_list(value)?) }
            }
            "seed" | "base_seed" => self.base_seed = parse_one(value)?,
            "fraction_range" => {
                let v: Vec<f64> = parse_list(value)?;
                if v.len() != 2 {
                    return Err(invalid("fraction_range needs two values"));
                }
                self.fraction_range = (v[0], v[1]);
            }
            "mu" => self.mu = parse_one(value)?,
            "sigma2" => self.sigma2 = parse_one(value)?,
            "shared_streams" => self.shared_streams = parse_one(value)?,
            "jobs" => self.jobs = Some(parse_one(value)?),
            other => return Err(invalid(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

fn parse_one<T: std::str::FromStr>(value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(format!("cannot parse `{value}`")))
}

/// Comma-separated list.
pub fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(parse_one)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.base_seed, 42);
        assert_eq!(c.weights().unwrap(), LambdaWeights::uniform(5));
    }

    #[test]
    fn text_overrides() {
        let c = ExperimentConfig::from_text(
            "# study\nsizes = 100, 200\ntrials=2\n\nk = 4\nreps = 3\nalpha = 0.9\nseed = 7\nlambdas = 0.5,1.5,1,1\nshared_streams = true\nfraction_range = 0.5, 0.8\n",
        )
        .unwrap();
        assert_eq!(c.sizes, vec![100, 200]);
        assert_eq!(c.trials, vec![2]);
        assert_eq!((c.k, c.repetitions, c.base_seed), (4, 3, 7));
        assert_eq!(c.alpha, 0.9);
        assert!(c.shared_streams);
        assert_eq!(c.fraction_range, (0.5, 0.8));
        c.validate().unwrap();
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let e = ExperimentConfig::from_text("k = 5\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");
        let e = ExperimentConfig::from_text("k 5\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        assert!(ExperimentConfig::from_text("k = five").is_err());
    }

    #[test]
    fn invalid_configs() {
        let bad = |f: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.sizes.clear()));
        assert!(bad(|c| c.trials = vec![0]));
        assert!(bad(|c| c.k = 1));
        assert!(bad(|c| c.repetitions = 0));
        assert!(bad(|c| c.alpha = 1.5));
        assert!(bad(|c| c.sigma2 = 0.0));
        assert!(bad(|c| c.lambdas = Some(vec![1.0; 4])));
        assert!(bad(|c| c.lambdas = Some(vec![2.0; 5])));
        assert!(bad(|c| c.sizes = vec![4]));
        assert!(bad(|c| c.fraction_range = (0.9, 0.6)));
        assert!(bad(|c| c.jobs = Some(0)));
    }
}

//! Synthetic normal datasets.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{standard_normal, RngStream};

/// An immutable univariate sample drawn from N(mu, sigma2), with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    true_mean: f64,
    true_var: f64,
    seed: u64,
}

impl Dataset {
    /// Wraps existing values. `true_mean` and `true_var` are the population
    /// parameters the values are meant to represent.
    pub fn from_values(values: Vec<f64>, true_mean: f64, true_var: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("dataset must contain at least one value"));
        }
        if !(true_var > 0.0) {
            return Err(invalid(format!("true variance must be positive, got {true_var}")));
        }
        Ok(Self {
            values,
            true_mean,
            true_var,
            seed: 0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn true_mean(&self) -> f64 {
        self.true_mean
    }

    pub fn true_var(&self) -> f64 {
        self.true_var
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Writes a one-column CSV with header `value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([crate::harness::report::format_sig(*v)])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Draws `n` values of `mu + sqrt(sigma2) * Z` from `stream`.
pub fn generate_dataset(n: usize, mu: f64, sigma2: f64, stream: &mut RngStream) -> Result<Dataset> {
    if n == 0 {
        return Err(invalid("dataset size must be at least 1"));
    }
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(invalid(format!("variance must be positive and finite, got {sigma2}")));
    }
    let sd = sigma2.sqrt();
    let values = standard_normal(stream, n)
        .into_iter()
        .map(|z| mu + sd * z)
        .collect();
    Ok(Dataset {
        values,
        true_mean: mu,
        true_var: sigma2,
        seed: stream.seed(),
    })
}

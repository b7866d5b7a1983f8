//! Data-partitioning validation strategies and a reproducible simulation
//! harness for comparing them.
//!
//! Three ways of estimating a model's loss from one dataset are provided:
//!
//! * simple random sampling ([`sampling`]): a uniform m-subset is drawn
//!   without replacement;
//! * lambda-weighted, repeated k-fold cross-validation ([`kfold`]);
//! * fusion sampling validation ([`fsv`]): T rounds of SRS followed by
//!   k-fold cross-validation, compounded with a weight alpha.
//!
//! [`theory`] holds the variance budget of the compounded measure and its
//! Chebyshev and Hoeffding bounds; [`harness`] runs the full simulation grid
//! and renders tables, CSV, JSON and plot data.

pub mod datagen;
pub mod error;
pub mod estimator;
pub mod fsv;
pub mod harness;
pub mod kfold;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod selftest;
pub mod theory;

pub use error::{Error, Result};

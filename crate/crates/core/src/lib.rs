//! Fitting of Log-Normal, Weibull, Gamma and Beta distributions to wind-speed
//! telemetry by maximum likelihood, with the empirical summaries and
//! goodness-of-fit diagnostics needed to compare the fits.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: ln Γ, regularized incomplete gamma/beta, standard normal.
//! - [`distributions`]: the four shape-location-scale families.
//! - [`empirical`]: samples, ECDF, histograms, plotting positions.
//! - [`estimation`]: Nelder–Mead maximum-likelihood fitting.
//! - [`diagnostics`]: Q-Q reports, KS statistic, model ranking.
//! - [`ingest`]: the semicolon-delimited turbine telemetry format.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod distributions;
pub mod empirical;
mod error;
pub mod estimation;
pub mod ingest;
pub mod optim;
pub mod specfun;

pub use diagnostics::{
    compare, ks_statistic, qq_report, FitComparison, ModelDiagnostics, QQReport,
};
pub use distributions::{Distribution, DistributionKind, ParamSet, ParametrizationMode};
pub use empirical::{
    ecdf, evaluation_grid, histogram, plotting_positions, BinRule, EcdfCurve, Histogram, Sample,
};
pub use error::{Error, Result};
pub use estimation::{
    fit, fit_all, initial_guess, neg_log_likelihood, DistributionSpec, FitSettings, FittedModel,
};

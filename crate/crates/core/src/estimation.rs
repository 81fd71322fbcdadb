//! Maximum-likelihood fitting.
//!
//! Parameters are optimised by Nelder–Mead in an unconstrained space:
//!
//! | parameter | transform |
//! |-----------|-----------|
//! | α, β, s (free) | `ln` |
//! | l (Full mode) | `l = l_max · sigmoid(u)`, `l_max = max(0, min(x) - ε)` |
//! | s (Full Beta) | `s = (max(x) + ε - l) + exp(v)` |
//!
//! with `ε = eps_factor · (max(x) - min(x))`. The loc bound keeps the
//! optimum away from the unbounded-likelihood edge at `l = min(x)`, and the
//! Beta scale transform guarantees `l + s` covers every observation.

use rayon::prelude::*;

use crate::distributions::{Distribution, DistributionKind, ParamSet, ParametrizationMode};
use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::specfun::ln_gamma_unchecked;

/// Smallest sample accepted by [`initial_guess`] and [`fit`].
pub const MIN_FIT_SAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub mode: ParametrizationMode,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, mode: ParametrizationMode) -> Self {
        DistributionSpec { kind, mode }
    }

    /// Number of estimated parameters.
    pub fn free_parameters(&self) -> usize {
        match (self.mode, self.kind) {
            (ParametrizationMode::Reduced, _) => 2,
            (ParametrizationMode::Full, DistributionKind::Beta) => 4,
            (ParametrizationMode::Full, _) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSettings {
    /// Simplex diameter (in transformed coordinates) that counts as converged.
    pub tol: f64,
    /// Iteration cap for each of the two simplex runs.
    pub max_iter: usize,
    /// `ε = eps_factor · range` separates the location from the data minimum.
    pub eps_factor: f64,
    /// Pins α instead of estimating it. Used for constrained sub-models such
    /// as the exponential case of the Weibull family.
    pub fixed_alpha: Option<f64>,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            tol: 1e-9,
            max_iter: 20_000,
            eps_factor: 1e-6,
            fixed_alpha: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub spec: DistributionSpec,
    pub params: ParamSet,
    pub log_likelihood: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    pub aic: f64,
}

impl FittedModel {
    pub fn distribution(&self) -> Result<Distribution> {
        Distribution::new(self.spec.kind, self.params)
    }

    /// Whether any admissible parameters gave the sample positive density.
    pub fn is_feasible(&self) -> bool {
        self.log_likelihood.is_finite()
    }
}

/// `-Σ ln f(x_i)`.
///
/// Returns `+inf` when an observation lies outside the support and `-inf`
/// when one sits on a density singularity; neither is an error.
pub fn neg_log_likelihood(spec: &DistributionSpec, params: &ParamSet, data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("log-likelihood of an empty sample"));
    }
    if !spec.mode.admits(spec.kind, params) {
        return Err(Error::domain(format!(
            "parameters {params:?} are not of the {} form for {}",
            spec.mode, spec.kind
        )));
    }
    let dist = Distribution::new(spec.kind, *params)?;
    Ok(nll(&dist, data))
}

fn nll(dist: &Distribution, data: &[f64]) -> f64 {
    neg_sum(data.iter().map(|&x| dist.log_pdf(x)))
}

/// Negative log-likelihood minus its value at a reference point, summed term
/// by term. Differences of nearby log-densities are small, so the simplex can
/// resolve the optimum far below the rounding floor of the full sum.
fn nll_relative(dist: &Distribution, data: &[f64], reference: &[f64]) -> f64 {
    neg_sum(data.iter().zip(reference).map(|(&x, r)| {
        let term = dist.log_pdf(x);
        if term == f64::NEG_INFINITY {
            term
        } else {
            term - r
        }
    }))
}

/// Neumaier-compensated `-Σ terms`; `+inf` as soon as a term is `-inf`.
fn neg_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for term in terms {
        if term == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    -(sum + comp)
}

/// Data summaries the transforms and starting values depend on.
#[derive(Debug, Clone, Copy)]
struct Bounds {
    min: f64,
    max: f64,
    eps: f64,
}

impl Bounds {
    fn new(sample: &Sample, eps_factor: f64) -> Self {
        let (min, max) = (sample.min(), sample.max());
        Bounds {
            min,
            max,
            eps: eps_factor * (max - min),
        }
    }

    fn range(&self) -> f64 {
        self.max - self.min
    }

    fn loc_max(&self) -> f64 {
        (self.min - self.eps).max(0.0)
    }

    /// Beta's `l + s` must reach at least this.
    fn cover(&self) -> f64 {
        self.max + self.eps
    }
}

fn check_fit_sample(sample: &Sample) -> Result<()> {
    if sample.len() < MIN_FIT_SAMPLE {
        return Err(Error::degenerate(format!(
            "fitting needs at least {MIN_FIT_SAMPLE} observations, got {}",
            sample.len()
        )));
    }
    if !(sample.variance() > 0.0) {
        return Err(Error::degenerate("all observations are equal"));
    }
    Ok(())
}

/// Method-of-moments starting point.
///
/// Fails with [`Error::Degenerate`] for samples that are too small or
/// constant, and with [`Error::Infeasible`] when even the starting point
/// cannot put positive density on every observation (for example Reduced
/// Beta on data outside `[0, 1]`).
pub fn initial_guess(spec: &DistributionSpec, sample: &Sample) -> Result<ParamSet> {
    initial_guess_with(spec, sample, &FitSettings::default())
}

fn initial_guess_with(
    spec: &DistributionSpec,
    sample: &Sample,
    settings: &FitSettings,
) -> Result<ParamSet> {
    check_fit_sample(sample)?;
    let bounds = Bounds::new(sample, settings.eps_factor);
    let guess = moment_guess(spec, sample, &bounds, settings.fixed_alpha);
    let value = neg_log_likelihood(spec, &guess, sample.values())?;
    if !value.is_finite() {
        return Err(Error::Infeasible(format!(
            "no {} {} start has finite likelihood on '{}'",
            spec.mode,
            spec.kind,
            sample.source_label()
        )));
    }
    Ok(guess)
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, s) = values
        .clone()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = s / n as f64;
    let v = values.map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    (m, v)
}

fn or_default(v: f64, fallback: f64) -> f64 {
    if v.is_finite() && v > 0.0 {
        v
    } else {
        fallback
    }
}

/// Always returns a valid `ParamSet`, feasible or not.
fn moment_guess(
    spec: &DistributionSpec,
    sample: &Sample,
    bounds: &Bounds,
    fixed_alpha: Option<f64>,
) -> ParamSet {
    let full = spec.mode == ParametrizationMode::Full;
    let loc = if full {
        (bounds.min - 0.01 * bounds.range())
            .max(0.0)
            .min(bounds.loc_max())
    } else {
        0.0
    };
    let shifted = sample.values().iter().map(move |x| x - loc);
    let (mean, var) = mean_var(shifted.clone());

    let mut params = match spec.kind {
        DistributionKind::LogNormal => {
            let (m, v) = mean_var(shifted.filter(|&y| y > 0.0).map(f64::ln));
            ParamSet::new(
                or_default(v.sqrt(), 1.0),
                None,
                loc,
                or_default(m.exp(), 1.0),
            )
        }
        DistributionKind::Weibull => {
            let cv = var.sqrt() / mean;
            let alpha = or_default(cv.powf(-1.086), 1.0).clamp(0.05, 50.0);
            let scale = mean / ln_gamma_unchecked(1.0 + 1.0 / alpha).exp();
            ParamSet::new(alpha, None, loc, or_default(scale, 1.0))
        }
        DistributionKind::Gamma => ParamSet::new(
            or_default(mean * mean / var, 1.0),
            None,
            loc,
            or_default(var / mean, 1.0),
        ),
        DistributionKind::Beta => {
            let scale = if full {
                let needed = bounds.cover() - loc;
                if 1.02 * bounds.range() > needed {
                    1.02 * bounds.range()
                } else {
                    needed + 0.01 * bounds.range()
                }
            } else {
                1.0
            };
            let (m, v) = mean_var(shifted.map(|y| y / scale));
            let common = m * (1.0 - m) / v - 1.0;
            let (a, b) = if common.is_finite() && common > 0.0 && m > 0.0 && m < 1.0 {
                (m * common, (1.0 - m) * common)
            } else {
                (1.0, 1.0)
            };
            ParamSet::new(a, Some(b), loc, scale)
        }
    };
    if let Some(alpha) = fixed_alpha {
        params.alpha = alpha;
    }
    params
}

/// Maps between `ParamSet` and the unconstrained optimiser coordinates.
struct Coding {
    kind: DistributionKind,
    mode: ParametrizationMode,
    fixed_alpha: Option<f64>,
    bounds: Bounds,
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

impl Coding {
    fn full(&self) -> bool {
        self.mode == ParametrizationMode::Full
    }

    fn encode(&self, p: &ParamSet) -> Vec<f64> {
        let mut theta = Vec::with_capacity(4);
        if self.fixed_alpha.is_none() {
            theta.push(p.alpha.ln());
        }
        match self.kind {
            DistributionKind::Beta => theta.push(p.beta.unwrap_or(1.0).ln()),
            _ => theta.push(p.scale.ln()),
        }
        if self.full() {
            let loc_max = self.bounds.loc_max();
            theta.push(if loc_max > 0.0 {
                logit(p.loc / loc_max)
            } else {
                0.0
            });
            if self.kind == DistributionKind::Beta {
                let excess = p.scale - (self.bounds.cover() - p.loc);
                theta.push(excess.max(1e-3 * self.bounds.range()).ln());
            }
        }
        theta
    }

    fn decode(&self, theta: &[f64]) -> ParamSet {
        let mut it = theta.iter().copied();
        let alpha = match self.fixed_alpha {
            Some(a) => a,
            None => it.next().unwrap().exp(),
        };
        let second = it.next().unwrap().exp();
        let (beta, mut scale) = match self.kind {
            DistributionKind::Beta => (Some(second), 1.0),
            _ => (None, second),
        };
        let mut loc = 0.0;
        if self.full() {
            loc = self.bounds.loc_max() * sigmoid(it.next().unwrap());
            if self.kind == DistributionKind::Beta {
                scale = (self.bounds.cover() - loc) + it.next().unwrap().exp();
            }
        }
        ParamSet::new(alpha, beta, loc, scale)
    }

    fn initial_steps(&self, dim: usize) -> Vec<f64> {
        let logs = if self.fixed_alpha.is_some() { 1 } else { 2 };
        (0..dim).map(|i| if i < logs { 0.1 } else { 0.5 }).collect()
    }
}

fn infeasible_model(spec: DistributionSpec, params: ParamSet, n: usize) -> FittedModel {
    FittedModel {
        spec,
        params,
        log_likelihood: f64::NEG_INFINITY,
        n,
        converged: false,
        iterations: 0,
        aic: f64::INFINITY,
    }
}

/// Fit `spec` to `sample` by maximum likelihood.
///
/// Runs Nelder–Mead from the method-of-moments start, then restarts once
/// from the best point with a fresh simplex. When no admissible parameters
/// put positive density on the whole sample the returned model has
/// `log_likelihood = -inf` and `converged = false`.
pub fn fit(
    spec: &DistributionSpec,
    sample: &Sample,
    settings: &FitSettings,
) -> Result<FittedModel> {
    check_fit_sample(sample)?;
    let bounds = Bounds::new(sample, settings.eps_factor);
    let n = sample.len();
    let guess = match initial_guess_with(spec, sample, settings) {
        Ok(g) => g,
        Err(Error::Infeasible(_)) => {
            return Ok(infeasible_model(
                *spec,
                moment_guess(spec, sample, &bounds, settings.fixed_alpha),
                n,
            ));
        }
        Err(e) => return Err(e),
    };
    let data = sample.values();
    let coding = Coding {
        kind: spec.kind,
        mode: spec.mode,
        fixed_alpha: settings.fixed_alpha,
        bounds,
    };
    let start = Distribution::new(spec.kind, guess)?;
    let reference: Vec<f64> = data.iter().map(|&x| start.log_pdf(x)).collect();
    let objective = |theta: &[f64]| match Distribution::new(spec.kind, coding.decode(theta)) {
        Ok(d) => match nll_relative(&d, data, &reference) {
            v if v.is_finite() => v,
            _ => f64::INFINITY,
        },
        Err(_) => f64::INFINITY,
    };

    let x0 = coding.encode(&guess);
    let opts = NelderMeadOptions {
        tol: settings.tol,
        max_iter: settings.max_iter,
        initial_step: coding.initial_steps(x0.len()),
    };
    let first = nelder_mead(objective, &x0, &opts);
    let second = nelder_mead(objective, &first.x, &opts);
    let best = if second.fx <= first.fx {
        &second
    } else {
        &first
    };

    let guess_ll = -neg_log_likelihood(spec, &guess, data)?;
    let mut params = coding.decode(&best.x);
    let mut log_likelihood = -neg_log_likelihood(spec, &params, data)?;
    if !(log_likelihood >= guess_ll) {
        params = guess;
        log_likelihood = guess_ll;
    }
    let k = spec.free_parameters() - usize::from(settings.fixed_alpha.is_some());
    Ok(FittedModel {
        spec: *spec,
        params,
        log_likelihood,
        n,
        converged: second.converged,
        iterations: first.iterations + second.iterations,
        aic: 2.0 * k as f64 - 2.0 * log_likelihood,
    })
}

/// Fit the given kinds under one mode; output follows the order of `kinds`.
pub fn fit_kinds(
    sample: &Sample,
    mode: ParametrizationMode,
    kinds: &[DistributionKind],
    settings: &FitSettings,
) -> Result<Vec<FittedModel>> {
    check_fit_sample(sample)?;
    kinds
        .par_iter()
        .map(|&kind| fit(&DistributionSpec::new(kind, mode), sample, settings))
        .collect()
}

/// Fit all four kinds, in the order LogNormal, Weibull, Gamma, Beta.
pub fn fit_all(
    sample: &Sample,
    mode: ParametrizationMode,
    settings: &FitSettings,
) -> Result<Vec<FittedModel>> {
    fit_kinds(sample, mode, &DistributionKind::ALL, settings)
}

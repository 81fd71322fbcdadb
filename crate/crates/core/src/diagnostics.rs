//! Goodness-of-fit diagnostics and cross-model ranking.
//!
//! Models are ranked by log-likelihood. The Q-Q deviations and the KS
//! statistic are reported alongside but do not affect the ranking; the
//! model with the smallest tail deviation is reported separately as the
//! tail winner.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::distributions::{DistributionKind, ParamSet};
use crate::empirical::{plotting_positions_with, PlottingPosition, Sample};
use crate::error::{Error, Result};
use crate::estimation::{neg_log_likelihood, DistributionSpec, FittedModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqOptions {
    pub positions: PlottingPosition,
    /// Positions below this or above `1 - tail_fraction` form the tails.
    pub tail_fraction: f64,
}

impl Default for QqOptions {
    fn default() -> Self {
        QqOptions {
            positions: PlottingPosition::Hazen,
            tail_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QQReport {
    pub model: FittedModel,
    pub positions: Vec<f64>,
    /// Model quantiles at the plotting positions (m/s).
    pub theoretical_q: Vec<f64>,
    /// Order statistics of the sample (m/s).
    pub empirical_q: Vec<f64>,
    pub max_abs_dev: f64,
    pub tail_abs_dev: f64,
}

pub fn qq_report(model: &FittedModel, sample: &Sample) -> Result<QQReport> {
    qq_report_with(model, sample, &QqOptions::default())
}

pub fn qq_report_with(model: &FittedModel, sample: &Sample, opts: &QqOptions) -> Result<QQReport> {
    if !(opts.tail_fraction >= 0.0 && opts.tail_fraction < 0.5) {
        return Err(Error::domain(format!(
            "tail fraction must lie in [0, 0.5), got {}",
            opts.tail_fraction
        )));
    }
    let dist = model.distribution()?;
    let empirical_q = sample.sorted();
    let positions = plotting_positions_with(empirical_q.len(), opts.positions)?;
    let theoretical_q = positions
        .par_iter()
        .map(|&p| dist.quantile(p))
        .collect::<Result<Vec<_>>>()?;

    let mut max_abs_dev: f64 = 0.0;
    let mut tail_abs_dev: f64 = 0.0;
    for ((&p, &t), &e) in positions.iter().zip(&theoretical_q).zip(&empirical_q) {
        let dev = (t - e).abs();
        max_abs_dev = max_abs_dev.max(dev);
        if p < opts.tail_fraction || p > 1.0 - opts.tail_fraction {
            tail_abs_dev = tail_abs_dev.max(dev);
        }
    }
    Ok(QQReport {
        model: model.clone(),
        positions,
        theoretical_q,
        empirical_q,
        max_abs_dev,
        tail_abs_dev,
    })
}

/// One-sample Kolmogorov–Smirnov distance between the sample ECDF and the
/// model CDF.
pub fn ks_statistic(model: &FittedModel, sample: &Sample) -> Result<f64> {
    let dist = model.distribution()?;
    let sorted = sample.sorted();
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = dist.cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    Ok(d.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDiagnostics {
    pub spec: DistributionSpec,
    pub params: ParamSet,
    pub log_likelihood: f64,
    pub aic: f64,
    pub free_parameters: usize,
    pub converged: bool,
    pub iterations: usize,
    pub ks_statistic: f64,
    pub max_abs_dev: f64,
    pub tail_abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitComparison {
    /// Diagnostics in the order the models were supplied.
    pub models: Vec<ModelDiagnostics>,
    /// Best first.
    pub ranking: Vec<DistributionKind>,
    pub winner: DistributionKind,
    /// Smallest tail Q-Q deviation among models with finite likelihood.
    pub tail_winner: Option<DistributionKind>,
}

impl FitComparison {
    pub fn get(&self, kind: DistributionKind) -> Option<&ModelDiagnostics> {
        self.models.iter().find(|m| m.spec.kind == kind)
    }
}

fn rank_order(a: &ModelDiagnostics, b: &ModelDiagnostics) -> Ordering {
    b.log_likelihood
        .total_cmp(&a.log_likelihood)
        .then(a.aic.total_cmp(&b.aic))
        .then(a.free_parameters.cmp(&b.free_parameters))
        .then(a.spec.kind.cmp(&b.spec.kind))
}

pub fn diagnose(
    model: &FittedModel,
    sample: &Sample,
    opts: &QqOptions,
) -> Result<ModelDiagnostics> {
    let qq = qq_report_with(model, sample, opts)?;
    Ok(ModelDiagnostics {
        spec: model.spec,
        params: model.params,
        log_likelihood: model.log_likelihood,
        aic: model.aic,
        free_parameters: model.spec.free_parameters(),
        converged: model.converged,
        iterations: model.iterations,
        ks_statistic: ks_statistic(model, sample)?,
        max_abs_dev: qq.max_abs_dev,
        tail_abs_dev: qq.tail_abs_dev,
    })
}

/// Kinds ordered best first: log-likelihood descending, then AIC, then
/// fewer free parameters, then the canonical kind order.
pub fn rank(models: &[ModelDiagnostics]) -> Vec<DistributionKind> {
    let mut order: Vec<&ModelDiagnostics> = models.iter().collect();
    order.sort_by(|a, b| rank_order(a, b));
    order.iter().map(|d| d.spec.kind).collect()
}

/// Diagnose and rank models fitted to the same sample.
pub fn compare(models: &[FittedModel], sample: &Sample) -> Result<FitComparison> {
    compare_with(models, sample, &QqOptions::default())
}

pub fn compare_with(
    models: &[FittedModel],
    sample: &Sample,
    opts: &QqOptions,
) -> Result<FitComparison> {
    if models.len() < 2 {
        return Err(Error::domain("comparison needs at least two models"));
    }
    for m in models {
        check_same_sample(m, sample)?;
    }
    let diagnostics = models
        .iter()
        .map(|m| diagnose(m, sample, opts))
        .collect::<Result<Vec<_>>>()?;

    let ranking = rank(&diagnostics);
    let tail_winner = diagnostics
        .iter()
        .filter(|d| d.log_likelihood.is_finite())
        .min_by(|a, b| {
            a.tail_abs_dev
                .total_cmp(&b.tail_abs_dev)
                .then(rank_order(a, b))
        })
        .map(|d| d.spec.kind);

    Ok(FitComparison {
        winner: ranking[0],
        ranking,
        tail_winner,
        models: diagnostics,
    })
}

/// A model belongs to `sample` if the sizes agree and its recorded
/// log-likelihood reproduces on the sample.
fn check_same_sample(model: &FittedModel, sample: &Sample) -> Result<()> {
    if model.n != sample.len() {
        return Err(Error::domain(format!(
            "{} model was fitted on {} observations, sample has {}",
            model.spec.kind,
            model.n,
            sample.len()
        )));
    }
    if model.log_likelihood.is_finite() {
        let ll = -neg_log_likelihood(&model.spec, &model.params, sample.values())?;
        if !((ll - model.log_likelihood).abs() <= 1e-9 * model.log_likelihood.abs().max(1.0)) {
            return Err(Error::domain(format!(
                "{} model log-likelihood {} does not reproduce on this sample ({ll})",
                model.spec.kind, model.log_likelihood
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Distribution, ParametrizationMode};
    use DistributionKind::*;

    fn model(kind: DistributionKind, params: ParamSet, ll: f64, n: usize) -> FittedModel {
        let spec = DistributionSpec::new(kind, ParametrizationMode::Reduced);
        FittedModel {
            spec,
            params,
            log_likelihood: ll,
            n,
            converged: true,
            iterations: 0,
            aic: 2.0 * spec.free_parameters() as f64 - 2.0 * ll,
        }
    }

    fn true_model(kind: DistributionKind, params: ParamSet, sample: &Sample) -> FittedModel {
        let spec = DistributionSpec::new(kind, ParametrizationMode::Reduced);
        let ll = -neg_log_likelihood(&spec, &params, sample.values()).unwrap();
        model(kind, params, ll, sample.len())
    }

    #[test]
    fn qq_self_consistency() {
        let p = ParamSet::reduced(Gamma, 2.5, 3.0);
        let d = Distribution::new(Gamma, p).unwrap();
        let pos = crate::empirical::plotting_positions(50).unwrap();
        let values: Vec<f64> = pos.iter().map(|&q| d.quantile(q).unwrap()).collect();
        let s = Sample::new(values, "exact").unwrap();
        let r = qq_report(&true_model(Gamma, p, &s), &s).unwrap();
        assert!(r.max_abs_dev < 1e-8, "{}", r.max_abs_dev);
        assert!(r.tail_abs_dev <= r.max_abs_dev);
    }

    #[test]
    fn qq_single_point() {
        let s = Sample::new(vec![3.0], "one").unwrap();
        let m = model(Weibull, ParamSet::reduced(Weibull, 2.0, 3.0), -1.0, 1);
        let r = qq_report(&m, &s).unwrap();
        assert_eq!(r.positions, vec![0.5]);
        assert_eq!(r.theoretical_q.len(), 1);
        assert_eq!(r.empirical_q, vec![3.0]);
        assert_eq!(r.tail_abs_dev, 0.0);
    }

    #[test]
    fn ks_examples() {
        let p = ParamSet::reduced(Weibull, 1.5, 2.0);
        let d = Distribution::new(Weibull, p).unwrap();
        let median = d.quantile(0.5).unwrap();
        let s = Sample::new(vec![median], "median").unwrap();
        let ks = ks_statistic(&model(Weibull, p, 0.0, 1), &s).unwrap();
        assert!((ks - 0.5).abs() < 1e-12);

        let n = 40;
        let values: Vec<f64> = (1..=n)
            .map(|i| d.quantile(i as f64 / (n + 1) as f64).unwrap())
            .collect();
        let s = Sample::new(values, "grid").unwrap();
        let ks = ks_statistic(&model(Weibull, p, 0.0, n), &s).unwrap();
        assert!(ks <= 1.0 / (n + 1) as f64 + 1e-9, "{ks}");
    }

    fn diag(kind: DistributionKind, ll: f64) -> ModelDiagnostics {
        ModelDiagnostics {
            spec: DistributionSpec::new(kind, ParametrizationMode::Reduced),
            params: ParamSet::reduced(kind, 1.0, 1.0),
            log_likelihood: ll,
            aic: 4.0 - 2.0 * ll,
            free_parameters: 2,
            converged: true,
            iterations: 0,
            ks_statistic: 0.1,
            max_abs_dev: 0.1,
            tail_abs_dev: 0.1,
        }
    }

    #[test]
    fn winner_is_max_likelihood() {
        let models: Vec<_> = DistributionKind::ALL
            .iter()
            .zip([-100.0, -90.0, -95.0, -101.0])
            .map(|(&k, ll)| diag(k, ll))
            .collect();
        assert_eq!(rank(&models), vec![Weibull, Gamma, LogNormal, Beta]);
        let mut infeasible = models.clone();
        infeasible[1].log_likelihood = f64::NEG_INFINITY;
        infeasible[1].aic = f64::INFINITY;
        assert_eq!(rank(&infeasible)[3], Weibull);
    }

    #[test]
    fn ranking_by_likelihood_then_tiebreaks() {
        let d = Distribution::new(Weibull, ParamSet::reduced(Weibull, 2.0, 8.0)).unwrap();
        let s = d.sample(200, 4).unwrap();
        let params = [
            (LogNormal, ParamSet::reduced(LogNormal, 0.5, 7.0)),
            (Weibull, ParamSet::reduced(Weibull, 2.0, 8.0)),
            (Gamma, ParamSet::reduced(Gamma, 3.0, 2.3)),
        ];
        let models: Vec<FittedModel> = params.iter().map(|&(k, p)| true_model(k, p, &s)).collect();
        let c = compare(&models, &s).unwrap();
        let best = models
            .iter()
            .max_by(|a, b| a.log_likelihood.total_cmp(&b.log_likelihood))
            .unwrap();
        assert_eq!(c.winner, best.spec.kind);
        assert_eq!(c.ranking[0], c.winner);
        let mut reversed = models.clone();
        reversed.reverse();
        assert_eq!(compare(&reversed, &s).unwrap().ranking, c.ranking);
    }

    #[test]
    fn equal_models_tie_break_on_kind_order() {
        let s = Sample::new(vec![0.2, 0.4, 0.6], "x").unwrap();
        // Weibull(1, 1) and Gamma(1, 1) are the same exponential law.
        let w = true_model(Weibull, ParamSet::reduced(Weibull, 1.0, 1.0), &s);
        let g = true_model(Gamma, ParamSet::reduced(Gamma, 1.0, 1.0), &s);
        assert_eq!(w.log_likelihood, g.log_likelihood);
        let c = compare(&[g.clone(), w.clone()], &s).unwrap();
        assert_eq!(c.ranking, vec![Weibull, Gamma]);
        assert_eq!(compare(&[w, g], &s).unwrap().ranking, vec![Weibull, Gamma]);
    }

    #[test]
    fn compare_rejects_mismatched_sample() {
        let s = Sample::new(vec![0.2, 0.4, 0.6], "x").unwrap();
        let w = true_model(Weibull, ParamSet::reduced(Weibull, 1.0, 1.0), &s);
        let other = Sample::new(vec![0.2, 0.4, 0.6, 0.9], "y").unwrap();
        assert!(matches!(
            compare(&[w.clone(), w.clone()], &other),
            Err(Error::Domain(_))
        ));
        assert!(compare(&[w], &s).is_err());
    }
}

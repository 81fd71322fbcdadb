//! Observed-data side of the analysis: samples, ECDF, histograms, plotting
//! positions and the evaluation grid used for model curves.

use crate::error::{Error, Result};

/// Number of points in the default model-curve grid.
pub const DEFAULT_GRID_POINTS: usize = 1000;

/// A nonempty series of finite, nonnegative wind speeds (m/s) with a label
/// recording where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    source_label: String,
}

impl Sample {
    pub fn new(values: Vec<f64>, source_label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset("sample has no observations".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::domain(format!(
                "observation {i} is {v}; speeds must be finite and >= 0"
            )));
        }
        Ok(Sample {
            values,
            source_label: source_label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance (divisor `n`).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.len() as f64
    }

    /// Same values multiplied by `c`; used by equivariance checks.
    pub fn scaled(&self, c: f64) -> Result<Sample> {
        Sample::new(
            self.values.iter().map(|x| x * c).collect(),
            format!("{} x {c}", self.source_label),
        )
    }

    /// Sample without exact zeros; errors if nothing remains.
    pub fn without_zeros(&self) -> Result<Sample> {
        Sample::new(
            self.values.iter().copied().filter(|&x| x != 0.0).collect(),
            self.source_label.clone(),
        )
    }
}

/// Empirical CDF as a right-continuous step function over the order
/// statistics. Ties are kept: `xs` has one entry per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfCurve {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
}

impl EcdfCurve {
    /// Fraction of observations `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.ps[k - 1]
        }
    }
}

pub fn ecdf(sample: &Sample) -> EcdfCurve {
    let xs = sample.sorted();
    let n = xs.len();
    let ps = (1..=n).map(|i| i as f64 / n as f64).collect();
    EcdfCurve { xs, ps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinRule {
    /// Width `2 IQR n^(-1/3)`, falling back to Sturges when the IQR is zero.
    #[default]
    FreedmanDiaconis,
    /// `ceil(log2 n) + 1` bins.
    Sturges,
    /// A fixed number of equal-width bins.
    Fixed(usize),
}

/// Equal-width histogram over `[min, max]` with densities normalised to
/// unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn area(&self) -> f64 {
        self.density
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub(crate) fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sturges_bins(n: usize) -> usize {
    (n as f64).log2().ceil() as usize + 1
}

pub fn histogram(sample: &Sample, rule: BinRule) -> Result<Histogram> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::degenerate("histogram needs at least 2 observations"));
    }
    let sorted = sample.sorted();
    let (min, max) = (sorted[0], sorted[n - 1]);
    let range = max - min;
    let bins = match rule {
        BinRule::Fixed(0) => return Err(Error::domain("fixed bin count must be at least 1")),
        BinRule::Fixed(k) => k,
        BinRule::Sturges => sturges_bins(n),
        BinRule::FreedmanDiaconis => {
            let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
            if iqr > 0.0 && range > 0.0 {
                let width = 2.0 * iqr / (n as f64).cbrt();
                ((range / width).ceil() as usize).max(1)
            } else {
                sturges_bins(n)
            }
        }
    };
    // A constant sample still gets a unit-width bin so densities stay finite.
    let (lo, hi) = if range > 0.0 {
        (min, max)
    } else {
        (min - 0.5, max + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut bin_edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    bin_edges[bins] = hi;

    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let density = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, e)| c as f64 / (n as f64 * (e[1] - e[0])))
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        density,
    })
}

/// Probability levels assigned to order statistics in Q-Q construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlottingPosition {
    /// `(i - 0.5) / n`
    #[default]
    Hazen,
    /// `i / (n + 1)`
    Weibull,
}

/// Hazen plotting positions `(i - 0.5) / n`, `i = 1..=n`.
pub fn plotting_positions(n: usize) -> Result<Vec<f64>> {
    plotting_positions_with(n, PlottingPosition::Hazen)
}

/// Positions for the given convention; the upper half is built as the
/// complement of the lower half so `p_i + p_{n+1-i} == 1` holds exactly.
pub fn plotting_positions_with(n: usize, rule: PlottingPosition) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("plotting positions need n >= 1"));
    }
    let nf = n as f64;
    let level = |i: usize| match rule {
        PlottingPosition::Hazen => (i as f64 - 0.5) / nf,
        PlottingPosition::Weibull => i as f64 / (nf + 1.0),
    };
    let mut ps = vec![0.0; n];
    for i in 1..=n {
        let mirror = n + 1 - i;
        ps[i - 1] = if i <= mirror {
            level(i)
        } else {
            1.0 - level(mirror)
        };
    }
    Ok(ps)
}

/// `points` evenly spaced values from the sample minimum to its maximum,
/// both endpoints included exactly.
pub fn evaluation_grid(sample: &Sample, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::domain("evaluation grid needs at least 2 points"));
    }
    let (min, max) = (sample.min(), sample.max());
    if min == max {
        return Err(Error::degenerate(
            "sample minimum equals maximum; grid is empty",
        ));
    }
    let step = (max - min) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| min + step * i as f64).collect();
    grid[points - 1] = max;
    Ok(grid)
}

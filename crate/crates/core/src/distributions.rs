//! The four shape-location-scale families: Log-Normal, Weibull, Gamma and
//! (four-parameter) Beta.
//!
//! With `z = (x - l) / s` the densities are
//!
//! ```text
//! LogNormal  1 / ((x-l) α √(2π)) · exp(-½ (ln z / α)²)
//! Weibull    (α/s) z^(α-1) exp(-z^α)
//! Gamma      z^(α-1) exp(-z) / (s Γ(α))
//! Beta       Γ(α+β) / (s Γ(α) Γ(β)) · z^(α-1) (1-z)^(β-1),   0 <= z <= 1
//! ```
//!
//! and all vanish for `x < l`. At `x = l` a shape below one makes the
//! density diverge; [`Distribution::pdf`] then returns `+inf` and
//! [`Distribution::log_pdf`] returns `+inf` as well.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::specfun::{
    inc_beta, inc_gamma_p, ln_gamma_unchecked, normal_quantile_unchecked, std_normal_cdf,
};

/// Bisection stops once `|cdf(x) - p|` is below this.
pub const QUANTILE_PROB_TOL: f64 = 1e-10;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistributionKind {
    LogNormal,
    Weibull,
    Gamma,
    Beta,
}

impl DistributionKind {
    /// All kinds in their canonical report order.
    pub const ALL: [DistributionKind; 4] = [
        DistributionKind::LogNormal,
        DistributionKind::Weibull,
        DistributionKind::Gamma,
        DistributionKind::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::LogNormal => "lognormal",
            DistributionKind::Weibull => "weibull",
            DistributionKind::Gamma => "gamma",
            DistributionKind::Beta => "beta",
        }
    }

    pub fn has_beta(self) -> bool {
        self == DistributionKind::Beta
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lognormal" | "log-normal" | "lognorm" => Ok(DistributionKind::LogNormal),
            "weibull" => Ok(DistributionKind::Weibull),
            "gamma" => Ok(DistributionKind::Gamma),
            "beta" => Ok(DistributionKind::Beta),
            other => Err(Error::domain(format!(
                "unknown distribution kind '{other}'"
            ))),
        }
    }
}

/// Full uses all parameters; Reduced pins `loc = 0` (and `scale = 1` for Beta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParametrizationMode {
    Full,
    Reduced,
}

impl ParametrizationMode {
    pub fn name(self) -> &'static str {
        match self {
            ParametrizationMode::Full => "full",
            ParametrizationMode::Reduced => "reduced",
        }
    }

    /// Whether `params` satisfies the values this mode pins for `kind`.
    pub fn admits(self, kind: DistributionKind, params: &ParamSet) -> bool {
        match self {
            ParametrizationMode::Full => true,
            ParametrizationMode::Reduced => {
                params.loc == 0.0 && (!kind.has_beta() || params.scale == 1.0)
            }
        }
    }
}

impl fmt::Display for ParametrizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParametrizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(ParametrizationMode::Full),
            "reduced" => Ok(ParametrizationMode::Reduced),
            other => Err(Error::domain(format!(
                "unknown parametrization mode '{other}'"
            ))),
        }
    }
}

/// Shape `alpha`, optional second shape `beta` (Beta only), location `loc`
/// and scale `scale`. Speeds are in m/s, so `loc` and `scale` are too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub loc: f64,
    pub scale: f64,
}

impl ParamSet {
    pub fn new(alpha: f64, beta: Option<f64>, loc: f64, scale: f64) -> Self {
        ParamSet {
            alpha,
            beta,
            loc,
            scale,
        }
    }

    /// Two-parameter form: `loc = 0`, and for Beta `scale = 1` with the
    /// second argument read as β.
    pub fn reduced(kind: DistributionKind, alpha: f64, second: f64) -> Self {
        if kind.has_beta() {
            ParamSet::new(alpha, Some(second), 0.0, 1.0)
        } else {
            ParamSet::new(alpha, None, 0.0, second)
        }
    }

    pub fn validate(&self, kind: DistributionKind) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.alpha) {
            return Err(Error::domain(format!(
                "alpha must be finite and > 0, got {}",
                self.alpha
            )));
        }
        match (kind.has_beta(), self.beta) {
            (true, Some(b)) if positive(b) => {}
            (true, Some(b)) => {
                return Err(Error::domain(format!(
                    "beta must be finite and > 0, got {b}"
                )))
            }
            (true, None) => {
                return Err(Error::domain("beta distribution requires a beta parameter"))
            }
            (false, Some(_)) => {
                return Err(Error::domain(format!("{kind} takes no beta parameter")))
            }
            (false, None) => {}
        }
        if !positive(self.scale) {
            return Err(Error::domain(format!(
                "scale must be finite and > 0, got {}",
                self.scale
            )));
        }
        if !(self.loc.is_finite() && self.loc >= 0.0) {
            return Err(Error::domain(format!(
                "loc must be finite and >= 0, got {}",
                self.loc
            )));
        }
        Ok(())
    }
}

/// A family member with validated parameters and cached normalising terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distribution {
    kind: DistributionKind,
    params: ParamSet,
    ln_alpha: f64,
    ln_scale: f64,
    // Family-specific additive constant of log_pdf.
    log_norm: f64,
}

impl Distribution {
    pub fn new(kind: DistributionKind, params: ParamSet) -> Result<Self> {
        params.validate(kind)?;
        let ln_alpha = params.alpha.ln();
        let ln_scale = params.scale.ln();
        let log_norm = match kind {
            DistributionKind::LogNormal => -ln_alpha - LN_SQRT_2PI,
            DistributionKind::Weibull => ln_alpha - ln_scale,
            DistributionKind::Gamma => -ln_scale - ln_gamma_unchecked(params.alpha),
            DistributionKind::Beta => {
                let (a, b) = (params.alpha, params.beta.unwrap_or(1.0));
                ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b) - ln_scale
            }
        };
        Ok(Distribution {
            kind,
            params,
            ln_alpha,
            ln_scale,
            log_norm,
        })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    fn beta(&self) -> f64 {
        self.params.beta.unwrap_or(1.0)
    }

    /// Lower and upper end of the support.
    pub fn support(&self) -> (f64, f64) {
        let upper = match self.kind {
            DistributionKind::Beta => self.params.loc + self.params.scale,
            _ => f64::INFINITY,
        };
        (self.params.loc, upper)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `ln pdf(x)` evaluated in log space; `-inf` outside the support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        let ParamSet {
            alpha, loc, scale, ..
        } = self.params;
        if x.is_nan() {
            return f64::NAN;
        }
        if x < loc {
            return f64::NEG_INFINITY;
        }
        let z = (x - loc) / scale;
        match self.kind {
            DistributionKind::LogNormal => {
                if z == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let ln_z = z.ln();
                let t = ln_z / alpha;
                self.log_norm - (ln_z + self.ln_scale) - 0.5 * t * t
            }
            DistributionKind::Weibull => {
                if z == 0.0 {
                    return endpoint_log_density(alpha, self.log_norm);
                }
                let ln_z = z.ln();
                self.log_norm + (alpha - 1.0) * ln_z - (alpha * ln_z).exp()
            }
            DistributionKind::Gamma => {
                if z == 0.0 {
                    return endpoint_log_density(alpha, self.log_norm);
                }
                self.log_norm + (alpha - 1.0) * z.ln() - z
            }
            DistributionKind::Beta => {
                let beta = self.beta();
                if z > 1.0 {
                    return f64::NEG_INFINITY;
                }
                if z == 0.0 {
                    return endpoint_log_density(alpha, self.log_norm);
                }
                if z == 1.0 {
                    return endpoint_log_density(beta, self.log_norm);
                }
                self.log_norm + (alpha - 1.0) * z.ln() + (beta - 1.0) * (-z).ln_1p()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let ParamSet {
            alpha, loc, scale, ..
        } = self.params;
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= loc {
            return 0.0;
        }
        let z = (x - loc) / scale;
        match self.kind {
            DistributionKind::LogNormal => std_normal_cdf(z.ln() / alpha),
            DistributionKind::Weibull => -(-(alpha * z.ln()).exp()).exp_m1(),
            DistributionKind::Gamma => inc_gamma_p(alpha, z),
            DistributionKind::Beta => {
                if z >= 1.0 {
                    1.0
                } else {
                    inc_beta(alpha, self.beta(), z)
                }
            }
        }
    }

    /// Inverse CDF for `prob` in `(0, 1)`.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(prob > 0.0 && prob < 1.0) {
            return Err(Error::domain(format!(
                "quantile requires a probability in (0, 1), got {prob}"
            )));
        }
        Ok(self.quantile_unchecked(prob))
    }

    fn quantile_unchecked(&self, prob: f64) -> f64 {
        let ParamSet {
            alpha, loc, scale, ..
        } = self.params;
        match self.kind {
            DistributionKind::LogNormal => {
                loc + scale * (alpha * normal_quantile_unchecked(prob)).exp()
            }
            DistributionKind::Weibull => loc + scale * (-(-prob).ln_1p()).powf(1.0 / alpha),
            DistributionKind::Gamma => {
                let mut hi = loc + scale * (alpha + 10.0 * alpha.sqrt()).max(1.0);
                while self.cdf(hi) < prob && hi.is_finite() {
                    hi = loc + 2.0 * (hi - loc);
                }
                self.bisect(prob, loc, hi)
            }
            DistributionKind::Beta => self.bisect(prob, loc, loc + scale),
        }
    }

    fn bisect(&self, prob: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut mid = 0.5 * (lo + hi);
        loop {
            let c = self.cdf(mid);
            if (c - prob).abs() <= QUANTILE_PROB_TOL {
                return mid;
            }
            if c < prob {
                lo = mid;
            } else {
                hi = mid;
            }
            let next = 0.5 * (lo + hi);
            if next == lo || next == hi {
                return next;
            }
            mid = next;
        }
    }

    /// `n` inverse-transform draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let mut uniform = OpenUniform::new(seed);
        let values = (0..n)
            .map(|_| self.quantile_unchecked(uniform.next()))
            .collect();
        Sample::new(values, format!("{} sample (seed {seed})", self.kind))
    }
}

/// `ln` of the density at the left (or, for Beta's β, right) endpoint:
/// diverges for shape < 1, equals the constant for shape = 1, vanishes above.
fn endpoint_log_density(shape: f64, log_norm: f64) -> f64 {
    if shape < 1.0 {
        f64::INFINITY
    } else if shape == 1.0 {
        log_norm
    } else {
        f64::NEG_INFINITY
    }
}

/// Uniform deviates on the open interval (0, 1).
///
/// Each deviate is `(k + 0.5) / 2^53` with `k` the top 53 bits of a ChaCha8
/// output word, so neither 0 nor 1 can occur. This mapping and the generator
/// are part of the reproducibility contract of [`Distribution::sample`].
#[derive(Debug, Clone)]
pub struct OpenUniform {
    rng: ChaCha8Rng,
}

impl OpenUniform {
    pub fn new(seed: u64) -> Self {
        OpenUniform {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * SCALE
    }
}

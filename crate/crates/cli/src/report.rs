//! Line-oriented fit report: `key=value` fields in a fixed order, numbers
//! with ten significant digits.

use std::fmt::Write as _;

use windfit::{FitComparison, ModelDiagnostics};

/// Ten significant digits in scientific notation; `inf`, `-inf` and `NaN`
/// pass through.
pub fn sig10(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9e}")
    } else {
        format!("{v}")
    }
}

pub struct ReportHeader<'a> {
    pub input: &'a str,
    pub column: &'a str,
    pub n: usize,
}

/// Render a comparison as one `#` header line plus one line per model.
pub fn render(header: &ReportHeader<'_>, comparison: &FitComparison) -> String {
    let mut out = String::new();
    let mode = comparison
        .models
        .first()
        .map(|m| m.spec.mode.name())
        .unwrap_or("-");
    let tail = comparison.tail_winner.map(|k| k.name()).unwrap_or("-");
    let _ = writeln!(
        out,
        "# windfit fit input={} column={} mode={mode} n={} models={} winner={} tail_winner={tail}",
        header.input,
        header.column,
        header.n,
        comparison.models.len(),
        comparison.winner.name(),
    );
    for kind in &comparison.ranking {
        let m = comparison.get(*kind).expect("ranking lists fitted kinds");
        out.push_str(&model_line(m, comparison));
        out.push('\n');
    }
    out
}

fn model_line(m: &ModelDiagnostics, comparison: &FitComparison) -> String {
    let rank = comparison
        .ranking
        .iter()
        .position(|k| *k == m.spec.kind)
        .map_or(0, |i| i + 1);
    let beta = m.params.beta.map_or_else(|| "-".to_string(), sig10);
    format!(
        "rank={rank} kind={} mode={} alpha={} beta={beta} loc={} scale={} log_likelihood={} aic={} ks={} \
         max_qq_dev={} tail_qq_dev={} converged={} iterations={}",
        m.spec.kind.name(),
        m.spec.mode.name(),
        sig10(m.params.alpha),
        sig10(m.params.loc),
        sig10(m.params.scale),
        sig10(m.log_likelihood),
        sig10(m.aic),
        sig10(m.ks_statistic),
        sig10(m.max_abs_dev),
        sig10(m.tail_abs_dev),
        m.converged,
        m.iterations,
    )
}

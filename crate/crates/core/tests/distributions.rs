mod common;
mod fixtures;

use common::XorShift;
use fixtures::{random_params, total_mass};
use proptest::prelude::*;
use windfit::{Distribution, DistributionKind, ParamSet};

#[test]
fn densities_integrate_to_one() {
    let mut rng = XorShift::new(10);
    for kind in DistributionKind::ALL {
        for _ in 0..25 {
            let d = Distribution::new(kind, random_params(kind, &mut rng)).unwrap();
            let mass = total_mass(&d);
            assert!(
                (mass - 1.0).abs() <= 1e-6,
                "{kind} {:?}: {mass}",
                d.params()
            );
        }
    }
}

#[test]
fn pdf_is_derivative_of_cdf() {
    let mut rng = XorShift::new(11);
    for kind in DistributionKind::ALL {
        for _ in 0..25 {
            let d = Distribution::new(kind, random_params(kind, &mut rng)).unwrap();
            for i in 1..=9 {
                let x = d.quantile(i as f64 / 10.0).unwrap();
                let h = 1e-5 * d.params().scale;
                let fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                let pdf = d.pdf(x);
                assert!(
                    ((fd - pdf) / pdf).abs() <= 1e-4,
                    "{kind} {:?} at {x}: fd {fd} pdf {pdf}",
                    d.params()
                );
            }
        }
    }
}

#[test]
fn quantile_cdf_round_trips() {
    let probs: Vec<f64> = (1..=999).map(|i| i as f64 / 1000.0).collect();
    let mut rng = XorShift::new(12);
    for kind in DistributionKind::ALL {
        for _ in 0..25 {
            let d = Distribution::new(kind, random_params(kind, &mut rng)).unwrap();
            for &p in &probs {
                let x = d.quantile(p).unwrap();
                assert!(
                    (d.cdf(x) - p).abs() <= 1e-8,
                    "{kind} {:?} p={p}",
                    d.params()
                );
            }
            for i in 1..=9 {
                let x = d.quantile(i as f64 / 10.0).unwrap();
                let back = d.quantile(d.cdf(x)).unwrap();
                assert!(
                    (back - x).abs() <= 1e-6 * (1.0 + x.abs()),
                    "{kind} {:?}: {x} -> {back}",
                    d.params()
                );
            }
        }
    }
}

#[test]
fn gamma_quantile_example() {
    let d = Distribution::new(DistributionKind::Gamma, ParamSet::new(2.0, None, 0.0, 1.0)).unwrap();
    let p = 1.0 - 2.0 * (-1f64).exp();
    assert!((d.quantile(p).unwrap() - 1.0).abs() < 1e-8);
}

fn kind_strategy() -> impl Strategy<Value = DistributionKind> {
    prop::sample::select(DistributionKind::ALL.to_vec())
}

fn params_strategy() -> impl Strategy<Value = (DistributionKind, ParamSet)> {
    (
        kind_strategy(),
        0.05f64..20.0,
        0.05f64..20.0,
        0.0f64..50.0,
        0.01f64..50.0,
    )
        .prop_map(|(k, a, b, l, s)| {
            let beta = k.has_beta().then_some(b);
            (k, ParamSet::new(a, beta, l, s))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn zero_below_location((kind, p) in params_strategy(), gap in 1e-9f64..100.0) {
        let d = Distribution::new(kind, p).unwrap();
        let x = p.loc - gap;
        prop_assert_eq!(d.pdf(x), 0.0);
        prop_assert_eq!(d.cdf(x), 0.0);
        prop_assert_eq!(d.log_pdf(x), f64::NEG_INFINITY);
    }

    #[test]
    fn beta_above_upper_end(a in 0.05f64..20.0, b in 0.05f64..20.0, l in 0.0f64..50.0, s in 0.01f64..50.0, gap in 1e-9f64..100.0) {
        let d = Distribution::new(DistributionKind::Beta, ParamSet::new(a, Some(b), l, s)).unwrap();
        let x = l + s + gap;
        prop_assert_eq!(d.pdf(x), 0.0);
        prop_assert_eq!(d.cdf(x), 1.0);
    }

    #[test]
    fn reduced_equals_full_with_pinned_values(kind in kind_strategy(), a in 0.1f64..10.0, second in 0.1f64..10.0, x in 0.0f64..30.0) {
        let reduced = ParamSet::reduced(kind, a, second);
        let full = if kind.has_beta() { ParamSet::new(a, Some(second), 0.0, 1.0) } else { ParamSet::new(a, None, 0.0, second) };
        let r = Distribution::new(kind, reduced).unwrap();
        let f = Distribution::new(kind, full).unwrap();
        prop_assert_eq!(r.pdf(x).to_bits(), f.pdf(x).to_bits());
        prop_assert_eq!(r.cdf(x).to_bits(), f.cdf(x).to_bits());
    }

    #[test]
    fn cdf_monotone((kind, p) in params_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let d = Distribution::new(kind, p).unwrap();
        let span = if kind.has_beta() { p.scale } else { 5.0 * p.scale };
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        let c0 = d.cdf(p.loc + a * span);
        let c1 = d.cdf(p.loc + b * span);
        prop_assert!((0.0..=1.0).contains(&c0) && c0 <= c1 + 1e-15);
    }

    #[test]
    fn log_pdf_agrees_with_pdf((kind, p) in params_strategy(), q in 0.01f64..0.99) {
        let d = Distribution::new(kind, p).unwrap();
        let x = d.quantile(q).unwrap();
        let lp = d.log_pdf(x);
        prop_assume!(lp.is_finite() && lp > -700.0 && lp < 700.0);
        prop_assert!((d.pdf(x).ln() - lp).abs() <= 1e-12 * (1.0 + lp.abs()));
    }

    #[test]
    fn samples_stay_in_support((kind, p) in params_strategy(), seed in any::<u64>()) {
        let d = Distribution::new(kind, p).unwrap();
        let s = d.sample(64, seed).unwrap();
        let (lo, hi) = d.support();
        prop_assert!(s.values().iter().all(|&x| x >= lo && x <= hi));
    }
}

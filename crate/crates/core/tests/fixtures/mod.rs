//! Test inputs built on the library: random parameter sets, the quadrature
//! mass of a density, and synthetic telemetry.
#![allow(dead_code)]

use crate::common::{integrate, map_power, two_sided_map, XorShift};
use windfit::ingest::TelemetryRecord;
use windfit::{Distribution, DistributionKind, ParamSet};

/// `rows` records at a 10-minute cadence starting at midnight, with Weibull
/// speeds that differ per anemometer height. Values are rounded to one
/// decimal, as turbine loggers report them.
pub fn synthetic_records(rows: usize, seed: u64) -> Vec<TelemetryRecord> {
    let speeds = |shape: f64, scale: f64, offset: u64| {
        Distribution::new(
            DistributionKind::Weibull,
            ParamSet::reduced(DistributionKind::Weibull, shape, scale),
        )
        .unwrap()
        .sample(rows, seed.wrapping_add(offset))
        .unwrap()
        .values()
        .to_vec()
    };
    let nacelle = speeds(2.0, 8.0, 0);
    let ten = speeds(1.8, 6.0, 1);
    let fifty = speeds(2.1, 9.0, 2);
    let round = |v: f64| (v * 10.0).round() / 10.0;
    (0..rows)
        .map(|i| {
            let dir = (i * 37 % 360) as f64;
            TelemetryRecord {
                time_of_day: (i as u32 * 10) % 1440,
                power_kw: round(30.0 * nacelle[i] - 25.0),
                wind_speed_nacelle: round(nacelle[i]),
                wind_dir_nacelle: dir,
                wind_speed_10m: round(ten[i]),
                wind_dir_10m: (dir + 5.0) % 360.0,
                wind_speed_50m: round(fifty[i]),
                wind_dir_50m: (dir + 2.0) % 360.0,
            }
        })
        .collect()
}

/// Serialized form of [`synthetic_records`], header included.
pub fn synthetic_csv(rows: usize, seed: u64) -> Vec<u8> {
    let mut out = Vec::new();
    windfit::ingest::write_csv(&synthetic_records(rows, seed), &mut out).unwrap();
    out
}

/// Parameters drawn over the ranges the density and quantile checks cover.
pub fn random_params(kind: DistributionKind, rng: &mut XorShift) -> ParamSet {
    let loc = rng.uniform(0.0, 5.0);
    let scale = rng.uniform(0.5, 15.0);
    match kind {
        DistributionKind::LogNormal => ParamSet::new(rng.uniform(0.1, 1.5), None, loc, scale),
        DistributionKind::Beta => ParamSet::new(
            rng.uniform(0.5, 8.0),
            Some(rng.uniform(0.5, 8.0)),
            loc,
            scale,
        ),
        _ => ParamSet::new(rng.uniform(0.5, 8.0), None, loc, scale),
    }
}

/// ∫ pdf over the support by quadrature in a variable that removes endpoint
/// singularities: x = l + s (u/(1-u))^m on unbounded supports, and the
/// two-sided power map onto [l, l+s] for Beta.
pub fn total_mass(d: &Distribution) -> f64 {
    let p = *d.params();
    let (l, s) = (p.loc, p.scale);
    match d.kind() {
        DistributionKind::Beta => {
            let m = map_power(p.alpha.min(p.beta.unwrap()));
            integrate(
                |w| {
                    if w <= 0.0 || w >= 1.0 {
                        return 0.0;
                    }
                    let (t, _, ln_jac) = two_sided_map(w, m);
                    let x = l + s * t;
                    // Points that round onto an endpoint carry negligible mass.
                    if x == l || x == l + s {
                        return 0.0;
                    }
                    (d.log_pdf(x) + ln_jac).exp() * s
                },
                0.0,
                1.0,
                1e-11,
            )
        }
        _ => {
            let m = if d.kind() == DistributionKind::LogNormal {
                1.0
            } else {
                map_power(p.alpha)
            };
            integrate(
                |u| {
                    if u <= 0.0 || u >= 1.0 {
                        return 0.0;
                    }
                    let r = u / (1.0 - u);
                    let z = r.powf(m);
                    let ln_jac = m.ln() + (m - 1.0) * r.ln() - 2.0 * (1.0 - u).ln();
                    let x = l + s * z;
                    if x == l || !x.is_finite() {
                        return 0.0;
                    }
                    (d.log_pdf(x) + ln_jac).exp() * s
                },
                0.0,
                1.0,
                1e-11,
            )
        }
    }
}

//! Independent numerical oracles for the test suites: globally adaptive
//! Gauss–Kronrod quadrature and a shifted Stirling series for ln Γ. Nothing
//! here calls into the crate under test.
#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// G7/K15 rule on [a, b]: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Interval awaiting refinement, ordered by its error estimate.
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_PIECES: usize = 20_000;

/// Integral of `f` over `[a, b]` by globally adaptive G7/K15: start from 32
/// equal panels and keep bisecting the piece with the largest error until
/// the summed error is below `tol` or the piece budget is spent.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let panels = 32;
    let w = (b - a) / panels as f64;
    let piece = |lo: f64, hi: f64| {
        let (value, err) = gk15(&f, lo, hi);
        Piece {
            a: lo,
            b: hi,
            value,
            err: if err.is_nan() { f64::INFINITY } else { err },
        }
    };
    let mut heap: std::collections::BinaryHeap<Piece> = (0..panels)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == panels { b } else { lo + w };
            piece(lo, hi)
        })
        .collect();
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    while heap.len() < MAX_PIECES && total_err > tol && total_err > 1e-15 * total.abs() {
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            total_err -= worst.err;
            heap.push(Piece { err: 0.0, ..worst });
            continue;
        }
        let (left, right) = (piece(worst.a, m), piece(m, worst.b));
        total_err += left.err + right.err - worst.err;
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        if !total_err.is_finite() {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut values: Vec<f64> = heap.into_iter().map(|p| p.value).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    values.iter().sum()
}

/// ln Γ(a) by upward recurrence to a >= 10 and the Stirling series there
/// (terms through z^-13; truncation below 1e-16).
pub fn ln_gamma_oracle(a: f64) -> f64 {
    let mut z = a;
    let mut product = 1.0;
    while z < 10.0 {
        product *= z;
        z += 1.0;
    }
    let r = 1.0 / z;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            + r2 * (-1.0 / 360.0
                + r2 * (1.0 / 1260.0
                    + r2 * (-1.0 / 1680.0
                        + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 / 156.0))))));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - product.ln()
}

/// P(a, x) by quadrature of the gamma density over [0, x].
pub fn inc_gamma_oracle(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let lg = ln_gamma_oracle(a);
    if a >= 1.0 {
        integrate(
            |t| {
                if t == 0.0 {
                    if a == 1.0 {
                        (-lg).exp()
                    } else {
                        0.0
                    }
                } else {
                    ((a - 1.0) * t.ln() - t - lg).exp()
                }
            },
            0.0,
            x,
            1e-14,
        )
    } else {
        // t = u^(1/a) removes the endpoint singularity:
        // ∫ t^(a-1) e^-t dt = (1/a) ∫_0^{x^a} exp(-u^(1/a)) du.
        let lg1 = ln_gamma_oracle(a + 1.0);
        integrate(|u| (-u.powf(1.0 / a) - lg1).exp(), 0.0, x.powf(a), 1e-14)
    }
}

/// Map of [0, 1] onto itself with `t ~ w^m` at 0 and `1 - t ~ (1-w)^m` at 1,
/// returning `(t, 1 - t, ln dt/dw)`.
pub fn two_sided_map(w: f64, m: f64) -> (f64, f64, f64) {
    let a = w.powf(m);
    let b = (1.0 - w).powf(m);
    let t = a / (a + b);
    let one_minus_t = b / (a + b);
    let ln_jac = m.ln() + (m - 1.0) * (w.ln() + (1.0 - w).ln()) - 2.0 * (a + b).ln();
    (t, one_minus_t, ln_jac)
}

/// Inverse of [`two_sided_map`].
pub fn two_sided_unmap(t: f64, m: f64) -> f64 {
    let r = (t / (1.0 - t)).powf(1.0 / m);
    r / (1.0 + r)
}

pub fn map_power(shape_min: f64) -> f64 {
    (1.0 / shape_min).ceil() + 1.0
}

/// I_x(a, b) by quadrature of the beta density over [0, x].
pub fn inc_beta_oracle(a: f64, b: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let m = map_power(a.min(b));
    let ln_b = ln_gamma_oracle(a) + ln_gamma_oracle(b) - ln_gamma_oracle(a + b);
    let integrand = |w: f64| {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        let (t, s, ln_jac) = two_sided_map(w, m);
        ((a - 1.0) * t.ln() + (b - 1.0) * s.ln() + ln_jac - ln_b).exp()
    };
    integrate(integrand, 0.0, two_sided_unmap(x, m), 1e-14)
}

/// Deterministic xorshift stream for choosing test parameters.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[test]
fn kronrod_integrates_polynomials_exactly() {
    for k in 0..20 {
        let v = integrate(|x: f64| x.powi(k), 0.0, 1.0, 1e-15);
        assert!((v - 1.0 / (k + 1) as f64).abs() < 1e-14, "k={k}: {v}");
    }
}

#[test]
fn stirling_oracle_known_values() {
    assert!(
        (ln_gamma_oracle(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14,
        "{}",
        ln_gamma_oracle(0.5) - 0.5 * std::f64::consts::PI.ln()
    );
    assert!(ln_gamma_oracle(1.0).abs() < 1e-14);
    assert!((ln_gamma_oracle(11.0) - 3_628_800f64.ln()).abs() < 1e-13);
}

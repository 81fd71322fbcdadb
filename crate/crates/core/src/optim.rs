//! Derivative-free Nelder–Mead simplex minimisation.

/// Reflection, expansion, contraction and shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Converged once the largest vertex-to-vertex distance is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Offsets of the initial simplex along each coordinate axis.
    pub initial_step: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimise `f` starting from `x0`.
///
/// Non-finite objective values are treated as `+inf`, so an objective can
/// mark infeasible points by returning `f64::INFINITY` (or NaN).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(
        opts.initial_step.len(),
        dim,
        "one initial step per coordinate"
    );
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step[i];
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let centroid = centroid(&simplex[..dim]);
        let (worst, f_worst) = simplex[dim].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;

        let xr = lerp(&centroid, &worst, -REFLECT);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = lerp(&centroid, &worst, -REFLECT * EXPAND);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[dim] = (xr, fr);
            continue;
        }
        if fr < f_worst {
            let xc = lerp(&centroid, &xr, CONTRACT);
            let fc = eval(&xc);
            if fc <= fr {
                simplex[dim] = (xc, fc);
                continue;
            }
        } else {
            let xc = lerp(&centroid, &worst, CONTRACT);
            let fc = eval(&xc);
            if fc < f_worst {
                simplex[dim] = (xc, fc);
                continue;
            }
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &vertex.0, SHRINK);
            let fx = eval(&x);
            *vertex = (x, fx);
        }
    }

    let (x, fx) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        fx,
        iterations,
        evaluations,
        converged,
    }
}

/// `a + t (b - a)`
fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

fn centroid(vertices: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let mut c = vec![0.0; vertices[0].0.len()];
    for (x, _) in vertices {
        for (ci, xi) in c.iter_mut().zip(x) {
            *ci += xi;
        }
    }
    let k = vertices.len() as f64;
    c.iter_mut().for_each(|ci| *ci /= k);
    c
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let mut d2: f64 = 0.0;
    for (i, (a, _)) in simplex.iter().enumerate() {
        for (b, _) in &simplex[i + 1..] {
            let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            d2 = d2.max(s);
        }
    }
    d2.sqrt()
}

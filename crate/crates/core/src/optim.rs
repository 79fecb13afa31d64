//! Derivative-free local minimisers used by the numerical bounds and weight searches.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    /// Stop once an accepted step improves the objective by less than this.
    pub min_improvement: f64,
    pub max_iterations: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { min_improvement: 1e-12, max_iterations: 2000, fd_step: 1e-7 }
    }
}

/// Steepest descent with central-difference gradients and a backtracking line search.
pub fn gradient_descent<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: DescentOptions) -> Minimum {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1;
    let mut step = 1.0;
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..opts.max_iterations {
        for i in 0..n {
            let h = opts.fd_step * x[i].abs().max(1.0);
            let xi = x[i];
            x[i] = xi + h;
            let up = f(&x);
            x[i] = xi - h;
            let down = f(&x);
            x[i] = xi;
            grad[i] = (up - down) / (2.0 * h);
        }
        evals += 2 * n;
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if !(gnorm2 > 0.0) || !gnorm2.is_finite() {
            break;
        }
        let gnorm = gnorm2.sqrt();
        let mut accepted = None;
        step = (step * 4.0).min(1e3);
        while step * gnorm > 1e-16 {
            for i in 0..n {
                trial[i] = x[i] - step * grad[i] / gnorm;
            }
            let ft = f(&trial);
            evals += 1;
            // Armijo condition on the normalised direction.
            if ft <= fx - 1e-4 * step * gnorm {
                accepted = Some(ft);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(ft) => {
                let gain = fx - ft;
                x.copy_from_slice(&trial);
                fx = ft;
                if gain < opts.min_improvement {
                    break;
                }
            }
            None => break,
        }
    }
    Minimum { x, value: fx, evaluations: evals }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.1, f_tol: 1e-13, x_tol: 1e-10, max_evaluations: 20_000 }
    }
}

/// Nelder–Mead simplex search with standard coefficients.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: NelderMeadOptions) -> Minimum {
    let n = x0.len();
    if n == 0 {
        let value = f(x0);
        return Minimum { x: Vec::new(), value, evaluations: 1 };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step * x0[i].abs().max(1.0);
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let point = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };

    while evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol && size <= opts.x_tol.max(opts.f_tol) || size <= opts.x_tol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = point(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = point(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = point(&centroid, &worst, -0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = point(&centroid, &worst, 0.5);
                let fc = f(&c);
                (c, fc)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = point(&best, &simplex[i], 0.5);
                    values[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), value: values[best], evaluations: evals }
}

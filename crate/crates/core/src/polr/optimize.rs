//! BFGS minimisation with a backtracking Armijo line search.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Convergence when the gradient max-norm drops below this.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-6, max_iter: 500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimise `f`, which returns the value and gradient at a point.
pub fn minimize<F>(f: F, x0: Vec<f64>, opts: BfgsOptions) -> BfgsResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let identity = || {
        let mut h = vec![0.0; n * n];
        (0..n).for_each(|i| h[i * n + i] = 1.0);
        h
    };
    // inverse Hessian approximation, row-major
    let mut h = identity();
    let mut fresh = true;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        if max_abs(&g) < opts.grad_tol {
            break;
        }
        iterations += 1;

        let mut dir: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            h = identity();
            fresh = true;
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if fresh { (1.0 / max_abs(&dir)).min(1.0) } else { 1.0 };

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }

        let Some((x_new, f_new, g_new)) = accepted else {
            if fresh {
                break;
            }
            h = identity();
            fresh = true;
            continue;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                // scale the initial approximation before the first update
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
            fresh = false;
        }

        let stalled = (fx - f_new).abs() <= f64::EPSILON * fx.abs().max(1.0) && max_abs(&s) < 1e-14;
        x = x_new;
        fx = f_new;
        g = g_new;
        if stalled {
            break;
        }
    }

    let converged = max_abs(&g) < opts.grad_tol;
    BfgsResult { x, value: fx, grad: g, iterations, converged }
}

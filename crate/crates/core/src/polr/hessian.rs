use nalgebra::DMatrix;

/// Central-difference Hessian of `f` at `x`; step sizes are `h_i = max(1e-5, 1e-4 |x_i|)`.
///
/// Off-diagonal entries come from one symmetric four-point stencil, so the result is symmetric.
pub fn numerical_hessian<F>(f: F, x: &[f64]) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let steps: Vec<f64> = x.iter().map(|v| (1e-4 * v.abs()).max(1e-5)).collect();
    let f0 = f(x);
    let eval = |moves: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(i, d) in moves {
            p[i] += d;
        }
        f(&p)
    };
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        let hi = steps[i];
        h[i][i] = (eval(&[(i, hi)]) - 2.0 * f0 + eval(&[(i, -hi)])) / (hi * hi);
        for j in 0..i {
            let hj = steps[j];
            let v = (eval(&[(i, hi), (j, hj)]) - eval(&[(i, hi), (j, -hj)]) - eval(&[(i, -hi), (j, hj)])
                + eval(&[(i, -hi), (j, -hj)]))
                / (4.0 * hi * hj);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    h
}

/// Inverse of `-(H + H^T) / 2` when it is positive definite.
pub fn covariance_from_hessian(hessian: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, String> {
    let n = hessian.len();
    let info = DMatrix::from_fn(n, n, |i, j| -0.5 * (hessian[i][j] + hessian[j][i]));
    let chol = info
        .cholesky()
        .ok_or_else(|| "negated Hessian is not positive definite".to_string())?;
    let inv = chol.inverse();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
        }
    }
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err("covariance has non-finite entries".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_hessian() {
        let a = [[2.0, 0.3, -0.4], [0.3, 1.5, 0.2], [-0.4, 0.2, 3.0]];
        let f = |x: &[f64]| {
            let mut v = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    v += x[i] * a[i][j] * x[j];
                }
            }
            -0.5 * v
        };
        let h = numerical_hessian(f, &[0.1, -0.2, 0.3]);
        for i in 0..3 {
            for j in 0..3 {
                let rel = (h[i][j] + a[i][j]).abs() / a[i][j].abs();
                assert!(rel < 1e-6, "({i},{j}) {} vs {}", h[i][j], -a[i][j]);
            }
        }
        let cov = covariance_from_hessian(&h).unwrap();
        // cov * A ~ I
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| cov[i][k] * a[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let h = vec![vec![-1.0, 0.0], vec![0.0, 1.0]];
        assert!(covariance_from_hessian(&h).is_err());
    }
}

//! Jacobi-preconditioned conjugate gradients and BiCGStab.

use super::sparse::{dot, norm, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap as a multiple of `√n`.
    pub max_iter_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter_factor: 20.0,
        }
    }
}

impl SolverOptions {
    pub fn max_iter(&self, n: usize) -> usize {
        ((self.max_iter_factor * (n as f64).sqrt()).ceil() as usize).max(50)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
}

fn true_residual(a: &CsrMatrix, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    a.matvec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm(r)
}

fn inverse_diagonal(a: &CsrMatrix) -> Vec<f64> {
    a.diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect()
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: &SolverOptions) -> Result<SolveStats> {
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats::default());
    }
    let dinv = inverse_diagonal(a);
    let max_iter = opts.max_iter(n);
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut it = 0;
    let mut res = true_residual(a, b, x, &mut r) / bnorm;
    // Outer loop restarts from the true residual if recursion drifted.
    while res > opts.tol && it < max_iter {
        for i in 0..n {
            z[i] = dinv[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while it < max_iter {
            it += 1;
            a.matvec_into(&p, &mut q);
            let pq = dot(&p, &q);
            if pq <= 0.0 {
                break;
            }
            let alpha = rz / pq;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if norm(&r) <= opts.tol * bnorm * 0.5 {
                break;
            }
            for i in 0..n {
                z[i] = dinv[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        res = true_residual(a, b, x, &mut r) / bnorm;
    }
    if res > opts.tol {
        return Err(Error::NoConvergence {
            method: "pcg",
            iterations: it,
            residual: res,
        });
    }
    Ok(SolveStats {
        iterations: it,
        residual: res,
    })
}

/// Right-preconditioned BiCGStab for general nonsingular `a`.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    opts: &SolverOptions,
) -> Result<SolveStats> {
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats::default());
    }
    let dinv = inverse_diagonal(a);
    let max_iter = opts.max_iter(n);
    let mut r = vec![0.0; n];
    let mut it = 0;
    let mut res = true_residual(a, b, x, &mut r) / bnorm;
    let (mut p, mut v, mut s, mut t) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut ph, mut sh) = (vec![0.0; n], vec![0.0; n]);
    while res > opts.tol && it < max_iter {
        let rhat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        p.iter_mut().for_each(|e| *e = 0.0);
        v.iter_mut().for_each(|e| *e = 0.0);
        while it < max_iter {
            it += 1;
            let rho_new = dot(&rhat, &r);
            if rho_new == 0.0 || omega == 0.0 {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                ph[i] = dinv[i] * p[i];
            }
            a.matvec_into(&ph, &mut v);
            let rv = dot(&rhat, &v);
            if rv == 0.0 {
                break;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) <= opts.tol * bnorm * 0.5 {
                for i in 0..n {
                    x[i] += alpha * ph[i];
                }
                break;
            }
            for i in 0..n {
                sh[i] = dinv[i] * s[i];
            }
            a.matvec_into(&sh, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) <= opts.tol * bnorm * 0.5 {
                break;
            }
        }
        res = true_residual(a, b, x, &mut r) / bnorm;
    }
    if res > opts.tol {
        return Err(Error::NoConvergence {
            method: "bicgstab",
            iterations: it,
            residual: res,
        });
    }
    Ok(SolveStats {
        iterations: it,
        residual: res,
    })
}

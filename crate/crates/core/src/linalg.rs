//! Tridiagonal elimination and preconditioned conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Solves a tridiagonal system with `lower[i]` at `(i, i-1)` and `upper[i]` at `(i, i+1)`.
///
/// `lower[0]` and `upper[n-1]` are ignored. No pivoting: meant for
/// diagonally dominant or symmetric positive definite matrices.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::InvalidParameter("tridiagonal bands must have equal length"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SolverDiverged { iterations: 0, residual: f64::INFINITY });
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SolverDiverged { iterations: i, residual: f64::INFINITY });
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Jacobi-preconditioned CG for a symmetric positive definite operator.
///
/// Stops when `‖r‖₂ <= tol · ‖b‖₂`. Entries with `diag == 0` are treated as
/// fixed (their residual is ignored), which is how Dirichlet nodes ride along.
pub fn conjugate_gradient<F>(apply: F, diag: &[f64], rhs: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let active: Vec<bool> = diag.iter().map(|d| *d != 0.0).collect();
    let inv: Vec<f64> = diag.iter().map(|d| if *d != 0.0 { 1.0 / d } else { 0.0 }).collect();
    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; n],
    };
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = (0..n).map(|i| if active[i] { rhs[i] - ax[i] } else { 0.0 }).collect();
    let bnorm = (0..n).filter(|i| active[*i]).map(|i| rhs[i] * rhs[i]).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let mut rnorm = norm2(&r);
    for it in 0..max_iter {
        if rnorm <= tol * bnorm {
            return Ok((x, it));
        }
        apply(&p, &mut ap);
        for i in 0..n {
            if !active[i] {
                ap[i] = 0.0;
            }
        }
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::SolverDiverged { iterations: it, residual: rnorm / bnorm });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = norm2(&r);
    }
    if rnorm <= tol * bnorm {
        return Ok((x, max_iter));
    }
    Err(Error::SolverDiverged { iterations: max_iter, residual: rnorm / bnorm })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_poisson_stencil() {
        let n = 5;
        let x: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![2.0; n];
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = 2.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 };
        }
        let got = thomas(&lower, &diag, &upper, &b).unwrap();
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cg_matches_thomas() {
        let n = 40;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..v.len() {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < v.len() { v[i + 1] } else { 0.0 };
                out[i] = 3.0 * v[i] - l - r;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let (x, _) = conjugate_gradient(apply, &vec![3.0; n], &b, None, 1e-14, 500).unwrap();
        let y = thomas(&vec![-1.0; n], &vec![3.0; n], &vec![-1.0; n], &b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }
}

//! The discrete Dirichlet Laplacian `A ≈ -Δ` and solves with `A + diag(s)`.
//!
//! Radial rows come from a finite-volume balance over the shell
//! `[r - h/2, r + h/2]`, which handles `r = 0` without a special stencil and
//! is exact on quadratics.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Mesh, ScalarField};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, thomas};

const CG_TOL: f64 = 1e-12;

/// Rows of a 1D or radial operator over all nodes; Dirichlet rows are zero.
fn tridiagonal(mesh: &Mesh) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = mesh.node_count();
    let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (h, _) = mesh.spacing();
    match *mesh {
        Mesh::Interval { .. } => {
            let c = 1.0 / (h * h);
            for i in 1..n - 1 {
                lower[i] = -c;
                diag[i] = 2.0 * c;
                upper[i] = -c;
            }
        }
        Mesh::RadialDisk { dim, .. } => {
            let e = dim as i32;
            for i in 0..n - 1 {
                let r = mesh.coord(i)[0];
                let (ra, rb) = ((r - 0.5 * h).max(0.0), r + 0.5 * h);
                let vol = (rb.powi(e) - ra.powi(e)) / dim as f64;
                let a_out = rb.powi(e - 1);
                let a_in = if i == 0 { 0.0 } else { ra.powi(e - 1) };
                lower[i] = -a_in / (h * vol);
                upper[i] = -a_out / (h * vol);
                diag[i] = (a_in + a_out) / (h * vol);
            }
        }
        Mesh::Rectangle { .. } => unreachable!("rectangles use the five-point stencil"),
    }
    (lower, diag, upper)
}

/// Diagonal of `A` (zero on Dirichlet nodes).
pub fn operator_diagonal(mesh: &Mesh) -> Vec<f64> {
    match *mesh {
        Mesh::Rectangle { .. } => {
            let (hx, hy) = mesh.spacing();
            let d = 2.0 / (hx * hx) + 2.0 / (hy * hy);
            (0..mesh.node_count()).map(|i| if mesh.is_boundary(i) { 0.0 } else { d }).collect()
        }
        _ => tridiagonal(mesh).1,
    }
}

/// `out = (A + diag(shift)) u` on interior nodes, zero on Dirichlet nodes.
/// Boundary entries of `u` are read as zero.
pub fn shifted_apply(mesh: &Mesh, u: &[f64], shift: Option<&[f64]>, out: &mut [f64]) {
    let s = |i: usize| shift.map_or(0.0, |s| s[i]);
    match *mesh {
        Mesh::Rectangle { nx, ny, .. } => {
            let (hx, hy) = mesh.spacing();
            let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
            let w = nx + 1;
            for iy in 0..=ny {
                for ix in 0..=nx {
                    let k = iy * w + ix;
                    if ix == 0 || iy == 0 || ix == nx || iy == ny {
                        out[k] = 0.0;
                        continue;
                    }
                    let at = |j: usize| if mesh.is_boundary(j) { 0.0 } else { u[j] };
                    out[k] = cx * (2.0 * u[k] - at(k - 1) - at(k + 1))
                        + cy * (2.0 * u[k] - at(k - w) - at(k + w))
                        + s(k) * u[k];
                }
            }
        }
        _ => {
            let (lower, diag, upper) = tridiagonal(mesh);
            let n = mesh.node_count();
            for i in 0..n {
                if mesh.is_boundary(i) {
                    out[i] = 0.0;
                    continue;
                }
                let at = |j: usize| if mesh.is_boundary(j) { 0.0 } else { u[j] };
                let mut v = (diag[i] + s(i)) * u[i];
                if i > 0 {
                    v += lower[i] * at(i - 1);
                }
                if i + 1 < n {
                    v += upper[i] * at(i + 1);
                }
                out[i] = v;
            }
        }
    }
}

/// Discrete `-Δ` of a Dirichlet field.
pub fn laplacian_apply(field: &ScalarField) -> ScalarField {
    let mesh = *field.mesh();
    let mut out = vec![0.0; mesh.node_count()];
    shifted_apply(&mesh, field.values(), None, &mut out);
    ScalarField::from_raw(mesh, out)
}

/// Solves `A u = f` with `u = 0` on the boundary.
pub fn solve_dirichlet(rhs: &ScalarField) -> Result<ScalarField> {
    solve_with_diagonal(rhs, None)
}

/// Solves `(A + σ I) u = f`; negative `σ` above `-λ₁` is fine.
pub fn solve_shifted(rhs: &ScalarField, sigma: f64) -> Result<ScalarField> {
    let shift = vec![sigma; rhs.mesh().node_count()];
    solve_with_diagonal(rhs, Some(&shift))
}

/// Solves `(A + diag(shift)) u = f` with `u = 0` on the boundary.
pub fn solve_with_diagonal(rhs: &ScalarField, shift: Option<&[f64]>) -> Result<ScalarField> {
    let mesh = *rhs.mesh();
    let n = mesh.node_count();
    if let Some(s) = shift {
        if s.len() != n {
            return Err(Error::InvalidParameter("shift length does not match the mesh"));
        }
    }
    let s = |i: usize| shift.map_or(0.0, |s| s[i]);
    match mesh {
        Mesh::Rectangle { nx, ny, .. } => {
            let mut diag = operator_diagonal(&mesh);
            for (i, d) in diag.iter_mut().enumerate() {
                if *d != 0.0 {
                    *d += s(i);
                }
            }
            let b: Vec<f64> =
                (0..n).map(|i| if mesh.is_boundary(i) { 0.0 } else { rhs.values()[i] }).collect();
            let apply = |v: &[f64], out: &mut [f64]| shifted_apply(&mesh, v, shift, out);
            let max_iter = 50 * (nx + ny);
            let (x, _) = conjugate_gradient(apply, &diag, &b, None, CG_TOL, max_iter)?;
            Ok(ScalarField::from_raw(mesh, x))
        }
        _ => {
            let (lower, diag, upper) = tridiagonal(&mesh);
            // unknowns: every non-Dirichlet node, which is a contiguous range
            let first = if matches!(mesh, Mesh::Interval { .. }) { 1 } else { 0 };
            let last = n - 1; // exclusive
            let m = last - first;
            let mut l = Vec::with_capacity(m);
            let mut d = Vec::with_capacity(m);
            let mut u = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            for i in first..last {
                l.push(lower[i]);
                d.push(diag[i] + s(i));
                u.push(upper[i]);
                b.push(rhs.values()[i]);
            }
            let x = thomas(&l, &d, &u, &b)?;
            let mut values = vec![0.0; n];
            values[first..last].copy_from_slice(&x);
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::SolverDiverged { iterations: 0, residual: f64::INFINITY });
            }
            Ok(ScalarField::from_raw(mesh, values))
        }
    }
}

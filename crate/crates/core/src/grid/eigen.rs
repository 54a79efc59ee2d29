//! First and second Dirichlet eigenpairs by inverse iteration.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::operator::{shifted_apply, solve_dirichlet};
use super::{Mesh, ScalarField};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-10;
const RESIDUAL_ACCEPT: f64 = 1e-8;

/// An eigenvalue with its eigenfunction normalised to sup-norm one.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub field: ScalarField,
    /// `sup |A φ - λ φ|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Principal eigenpair; the eigenfunction is positive inside.
pub fn first_eigenpair(mesh: &Mesh) -> Result<EigenPair> {
    mesh.validate()?;
    let start = ScalarField::from_fn(*mesh, |_| 1.0).with_dirichlet();
    let mut pair = inverse_iteration(mesh, start, None)?;
    let sum: f64 = pair.field.values().iter().sum();
    if sum < 0.0 {
        pair.field = pair.field.scaled(-1.0);
    }
    Ok(pair)
}

/// Second eigenpair, deflating the first one at every step.
pub fn second_eigenpair(mesh: &Mesh, first: &EigenPair) -> Result<EigenPair> {
    if first.field.mesh() != mesh {
        return Err(Error::MeshMisaligned);
    }
    if !(first.residual <= RESIDUAL_ACCEPT * first.value) {
        return Err(Error::NoConvergence { iterations: first.iterations, residual: first.residual });
    }
    // deterministic start without symmetry
    let start = ScalarField::from_raw(
        *mesh,
        (0..mesh.node_count()).map(|i| (2.3 * i as f64 + 0.7).sin() + 0.5).collect(),
    )
    .with_dirichlet();
    let mut pair = inverse_iteration(mesh, start, Some(&first.field))?;
    // sign convention: the extreme value is positive
    let (mut best, mut at) = (0.0, 0);
    for (i, v) in pair.field.values().iter().enumerate() {
        if v.abs() > best {
            best = v.abs();
            at = i;
        }
    }
    if pair.field.get(at) < 0.0 {
        pair.field = pair.field.scaled(-1.0);
    }
    Ok(pair)
}

fn orthogonalise(v: &mut Vec<f64>, against: &ScalarField, mesh: &Mesh) {
    let field = ScalarField::from_raw(*mesh, core::mem::take(v));
    let coef = field.inner(against) / against.inner(against);
    *v = field.into_values();
    for (x, p) in v.iter_mut().zip(against.values()) {
        *x -= coef * p;
    }
}

fn inverse_iteration(mesh: &Mesh, start: ScalarField, deflate: Option<&ScalarField>) -> Result<EigenPair> {
    let n = mesh.node_count();
    let mut v = start.into_values();
    let mut av = vec![0.0; n];
    let mut last = (f64::INFINITY, f64::NAN);
    for it in 1..=MAX_ITERATIONS {
        if let Some(phi) = deflate {
            orthogonalise(&mut v, phi, mesh);
        }
        let mut w = solve_dirichlet(&ScalarField::from_raw(*mesh, v))?.into_values();
        if let Some(phi) = deflate {
            orthogonalise(&mut w, phi, mesh);
        }
        let sup = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if sup == 0.0 {
            return Err(Error::NoConvergence { iterations: it, residual: f64::INFINITY });
        }
        for x in w.iter_mut() {
            *x /= sup;
        }
        shifted_apply(mesh, &w, None, &mut av);
        let wf = ScalarField::from_raw(*mesh, w);
        let afield = ScalarField::from_raw(*mesh, av);
        let lambda = wf.inner(&afield) / wf.inner(&wf);
        av = afield.into_values();
        w = wf.into_values();
        let residual = (0..n).fold(0.0_f64, |m, i| m.max((av[i] - lambda * w[i]).abs()));
        let settled = (lambda - last.1).abs() <= 1e-14 * lambda && residual >= 0.5 * last.0;
        if residual <= RESIDUAL_TOL * lambda || (settled && residual <= RESIDUAL_ACCEPT * lambda) {
            return Ok(EigenPair { value: lambda, field: ScalarField::from_raw(*mesh, w), residual, iterations: it });
        }
        last = (residual, lambda);
        v = w;
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: last.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn interval_spectrum() {
        let mesh = Mesh::interval(-1.0, 1.0, 128).unwrap();
        let p1 = first_eigenpair(&mesh).unwrap();
        assert!((p1.value - PI * PI / 4.0).abs() < 1e-3);
        assert!((p1.field.sup_norm() - 1.0).abs() < 1e-15);
        let mid = p1.field.get(64);
        assert!((mid - 1.0).abs() < 1e-12);
        let p2 = second_eigenpair(&mesh, &p1).unwrap();
        assert!((p2.value - PI * PI).abs() < 5e-3, "{}", p2.value);
        assert!(p2.field.inner(&p1.field).abs() < 1e-12);
    }

    #[test]
    fn disk_principal_value() {
        let mesh = Mesh::radial_disk(128, 1.0, 2).unwrap();
        let p = first_eigenpair(&mesh).unwrap();
        assert!((p.value - 5.783185962946784).abs() < 2e-3, "{}", p.value);
        assert!(p.field.min_interior().0 > 0.0);
    }
}

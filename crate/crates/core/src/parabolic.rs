//! The heat equation `u_t - Δu = f` by the θ-scheme, positivity times and
//! spectral decay of data orthogonal to `φ₁`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{first_eigenpair, operator_diagonal, second_eigenpair, shifted_apply, solve_dirichlet, solve_with_diagonal};
use crate::grid::{EigenPair, Mesh, ScalarField};

/// Relative tolerance on `∫ û₀ φ₁` for decay estimates.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Fraction of the horizon, counted from the end, used by the decay fit.
pub const TAIL_FRACTION: f64 = 0.5;

/// Right-hand side of the heat equation.
pub enum ParabolicForcing {
    Stationary(ScalarField),
    /// Nodal `f(i, t)`, required to stay above the field `floor`.
    Varying { floor: ScalarField, f: Box<dyn Fn(usize, f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for ParabolicForcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParabolicForcing::Stationary(g) => f.debug_tuple("Stationary").field(g).finish(),
            ParabolicForcing::Varying { floor, .. } => f.debug_struct("Varying").field("floor", floor).finish_non_exhaustive(),
        }
    }
}

impl ParabolicForcing {
    pub fn zero(mesh: Mesh) -> Self {
        ParabolicForcing::Stationary(ScalarField::zeros(mesh))
    }

    /// The time-independent lower bound `g`.
    pub fn floor(&self) -> &ScalarField {
        match self {
            ParabolicForcing::Stationary(g) => g,
            ParabolicForcing::Varying { floor, .. } => floor,
        }
    }

    fn fill(&self, mesh: &Mesh, t: f64, out: &mut [f64]) -> Result<()> {
        match self {
            ParabolicForcing::Stationary(g) => out.copy_from_slice(g.values()),
            ParabolicForcing::Varying { floor, f } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let v = f(i, t);
                    let g = floor.get(i);
                    if !mesh.is_boundary(i) && v < g - 1e-12 * g.abs().max(1.0) {
                        return Err(Error::InvalidParameter("forcing drops below its floor"));
                    }
                    *o = v;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ParabolicProblem {
    mesh: Mesh,
    u0: ScalarField,
    forcing: ParabolicForcing,
    dt: f64,
    theta: f64,
    horizon: f64,
    phi1: EigenPair,
    u0_phi1: f64,
}

impl ParabolicProblem {
    pub fn new(u0: ScalarField, forcing: ParabolicForcing, dt: f64, theta: f64, horizon: f64) -> Result<Self> {
        let mesh = *u0.mesh();
        mesh.validate()?;
        if forcing.floor().mesh() != &mesh {
            return Err(Error::MeshMisaligned);
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter("time step must be positive"));
        }
        if !(0.5..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter("theta must lie in [1/2, 1]"));
        }
        if !(horizon >= dt) || !horizon.is_finite() {
            return Err(Error::InvalidParameter("horizon must cover at least one step"));
        }
        let phi1 = first_eigenpair(&mesh)?;
        let u0 = u0.with_dirichlet();
        let u0_phi1 = u0.inner(&phi1.field);
        Ok(ParabolicProblem { mesh, u0, forcing, dt, theta, horizon, phi1, u0_phi1 })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn initial(&self) -> &ScalarField {
        &self.u0
    }

    pub fn forcing(&self) -> &ParabolicForcing {
        &self.forcing
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn first_eigenpair(&self) -> &EigenPair {
        &self.phi1
    }

    /// `∫ u₀ φ₁` in the mesh inner product.
    pub fn initial_projection(&self) -> f64 {
        self.u0_phi1
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// True when `I - (1-θ)dt A` is entrywise nonnegative, so the scheme
    /// preserves order between solutions.
    pub fn preserves_order(&self) -> bool {
        let d = operator_diagonal(&self.mesh).iter().fold(0.0_f64, |m, v| m.max(*v));
        (1.0 - self.theta) * self.dt * d <= 1.0
    }
}

/// One θ-step from `t` to `t + dt`:
/// `(I + θ dt A) u_new = (I - (1-θ) dt A) u_old + dt (θ f(t+dt) + (1-θ) f(t))`.
pub fn step(problem: &ParabolicProblem, state: &ScalarField, t: f64) -> Result<ScalarField> {
    let mut stepper = Stepper::new(problem);
    stepper.advance(state.values(), t)
}

struct Stepper<'a> {
    p: &'a ParabolicProblem,
    shift: Vec<f64>,
    au: Vec<f64>,
    f_old: Vec<f64>,
    f_new: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a ParabolicProblem) -> Self {
        let n = p.mesh.node_count();
        let s = 1.0 / (p.theta * p.dt);
        let shift = (0..n).map(|i| if p.mesh.is_boundary(i) { 0.0 } else { s }).collect();
        Stepper { p, shift, au: vec![0.0; n], f_old: vec![0.0; n], f_new: vec![0.0; n] }
    }

    fn advance(&mut self, u: &[f64], t: f64) -> Result<ScalarField> {
        let p = self.p;
        let (dt, th) = (p.dt, p.theta);
        p.forcing.fill(&p.mesh, t, &mut self.f_old)?;
        p.forcing.fill(&p.mesh, t + dt, &mut self.f_new)?;
        shifted_apply(&p.mesh, u, None, &mut self.au);
        let scale = 1.0 / (th * dt);
        let rhs: Vec<f64> = (0..u.len())
            .map(|i| {
                if p.mesh.is_boundary(i) {
                    0.0
                } else {
                    let explicit = u[i] - (1.0 - th) * dt * self.au[i];
                    let f = th * self.f_new[i] + (1.0 - th) * self.f_old[i];
                    (explicit + dt * f) * scale
                }
            })
            .collect();
        let next = solve_with_diagonal(&ScalarField::new(p.mesh, rhs)?, Some(&self.shift))?;
        if next.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverDiverged { iterations: 0, residual: f64::INFINITY });
        }
        Ok(next)
    }
}

/// Runs the scheme to the horizon, calling `visit(t, u)` at every grid time.
pub fn evolve<F: FnMut(f64, &ScalarField)>(problem: &ParabolicProblem, mut visit: F) -> Result<ScalarField> {
    let mut stepper = Stepper::new(problem);
    let mut u = problem.u0.clone();
    visit(0.0, &u);
    for k in 0..problem.steps() {
        let t = k as f64 * problem.dt;
        u = stepper.advance(u.values(), t)?;
        visit(t + problem.dt, &u);
    }
    Ok(u)
}

/// Least-squares fit `log y ≈ log prefactor - rate · t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of the fit in log space.
    pub fit_residual: f64,
}

/// Fits over the samples with `t ≥ from` and `y > 0`.
pub fn fit_decay(times: &[f64], values: &[f64], from: f64) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> =
        times.iter().zip(values).filter(|(t, y)| **t >= from && **y > 0.0 && y.is_finite()).map(|(t, y)| (*t, y.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum::<f64>();
    if stt == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>() / stt;
    let icpt = my - slope * mt;
    let rms = (pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Some(DecayFit { rate: -slope, prefactor: icpt.exp(), fit_residual: rms })
}

/// `max_i |w_i| / φ₁_i` over interior nodes.
pub fn sup_ratio(w: &ScalarField, phi: &ScalarField) -> f64 {
    w.mesh().interior().fold(0.0_f64, |m, i| m.max(w.get(i).abs() / phi.get(i)))
}

/// Time history of the interior minimum and the positivity time.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityTrace {
    pub times: Vec<f64>,
    pub min_interior: Vec<f64>,
    /// `max |u - v| / φ₁` with `v` the stationary solution for the floor.
    pub sup_ratio: Vec<f64>,
    /// `None` when the minimum is not positive at the horizon.
    pub t0: Option<f64>,
    pub decay_fit: Option<DecayFit>,
    /// Interior minimum of the stationary solution for the floor.
    pub stationary_min: f64,
    /// Set when the stationary solution is not positive, so no `t₀` is guaranteed.
    pub hypothesis_warning: bool,
    pub initial_projection: f64,
}

/// Integrates to the horizon and reports the first grid time after which the
/// interior minimum stays positive.
pub fn find_positivity_time(problem: &ParabolicProblem) -> Result<PositivityTrace> {
    let v = solve_dirichlet(problem.forcing.floor())?;
    let (stationary_min, _) = v.min_interior();
    let phi = &problem.phi1.field;
    let cap = problem.steps() + 1;
    let (mut times, mut mins, mut ratios) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    evolve(problem, |t, u| {
        times.push(t);
        mins.push(u.min_interior().0);
        let w = u.zip_map(&v, |a, b| a - b).expect("same mesh");
        ratios.push(sup_ratio(&w, phi));
    })?;
    let t0 = match mins.iter().rposition(|m| !(*m > 0.0)) {
        None => Some(0.0),
        Some(k) if k + 1 < times.len() => Some(times[k + 1]),
        Some(_) => None,
    };
    let from = problem.horizon * (1.0 - TAIL_FRACTION);
    let decay_fit = fit_decay(&times, &ratios, from);
    Ok(PositivityTrace {
        times,
        min_interior: mins,
        sup_ratio: ratios,
        t0,
        decay_fit,
        stationary_min,
        hypothesis_warning: !(stationary_min > 0.0),
        initial_projection: problem.u0_phi1,
    })
}

/// Removes the `φ₁` component; returns the projected field and the removed coefficient.
pub fn project_out_first_mode(u: &ScalarField, phi: &EigenPair) -> Result<(ScalarField, f64)> {
    if u.mesh() != phi.field.mesh() {
        return Err(Error::MeshMisaligned);
    }
    let c = u.inner(&phi.field) / phi.field.inner(&phi.field);
    let out = u.zip_map(&phi.field, |a, b| a - c * b)?;
    Ok((out, c))
}

/// Outcome of the decay test for data orthogonal to `φ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEstimate {
    pub fit: DecayFit,
    pub lambda2: f64,
    /// Smallest `C` with `|w| ≤ C ‖û₀‖ e^{-λ₂t} φ₁` over the tail window.
    pub bound_constant: f64,
    /// `fit.rate ≥ λ₂ (1 - tol)`.
    pub bound_ok: bool,
    pub times: Vec<f64>,
    pub sup_ratio: Vec<f64>,
}

/// Evolves `û₀` with zero forcing and fits the decay of `max |w|/φ₁`.
pub fn verify_decay_estimate(mesh: &Mesh, u0_hat: &ScalarField, dt: f64, theta: f64, horizon: f64, tol: f64) -> Result<DecayEstimate> {
    if u0_hat.mesh() != mesh {
        return Err(Error::MeshMisaligned);
    }
    let problem = ParabolicProblem::new(u0_hat.clone(), ParabolicForcing::zero(*mesh), dt, theta, horizon)?;
    let phi = &problem.phi1;
    let projection = problem.u0_phi1;
    let scale = problem.u0.l2_norm() * phi.field.l2_norm();
    if !(projection.abs() <= ORTHOGONALITY_TOL * scale) {
        return Err(Error::OrthogonalityViolated { projection });
    }
    let lambda2 = second_eigenpair(mesh, phi)?.value;
    let norm0 = problem.u0.l2_norm();
    let (mut times, mut ratios) = (Vec::new(), Vec::new());
    evolve(&problem, |t, w| {
        times.push(t);
        ratios.push(sup_ratio(w, &phi.field));
    })?;
    let from = horizon * (1.0 - TAIL_FRACTION);
    let fit = fit_decay(&times, &ratios, from).ok_or(Error::PrerequisiteFailed("too few samples to fit a decay rate"))?;
    let bound_constant = times
        .iter()
        .zip(&ratios)
        .filter(|(t, _)| **t >= from)
        .fold(0.0_f64, |m, (t, r)| m.max(r / (norm0 * (-lambda2 * t).exp())));
    let bound_ok = fit.rate >= lambda2 * (1.0 - tol);
    Ok(DecayEstimate { fit, lambda2, bound_constant, bound_ok, times, sup_ratio: ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stays_zero() {
        let mesh = Mesh::interval(-1.0, 1.0, 32).unwrap();
        let p = ParabolicProblem::new(ScalarField::zeros(mesh), ParabolicForcing::zero(mesh), 0.01, 0.5, 0.1).unwrap();
        let end = evolve(&p, |_, _| {}).unwrap();
        assert_eq!(end.sup_norm(), 0.0);
    }

    #[test]
    fn first_mode_decays_at_its_eigenvalue() {
        let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
        let phi = first_eigenpair(&mesh).unwrap();
        let dt = 1e-3;
        let p = ParabolicProblem::new(phi.field.clone(), ParabolicForcing::zero(mesh), dt, 0.5, 0.5).unwrap();
        let end = evolve(&p, |_, _| {}).unwrap();
        let g = (1.0 - 0.5 * dt * phi.value) / (1.0 + 0.5 * dt * phi.value);
        let expect = g.powi(p.steps() as i32);
        assert!((end.sup_norm() - expect).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_an_exponential() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (-2.5 * t).exp()).collect();
        let fit = fit_decay(&t, &y, 0.0).unwrap();
        assert!((fit.rate - 2.5).abs() < 1e-12 && (fit.prefactor - 3.0).abs() < 1e-12);
    }

    #[test]
    fn first_mode_is_not_orthogonal() {
        let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
        let phi = first_eigenpair(&mesh).unwrap();
        let r = verify_decay_estimate(&mesh, &phi.field, 1e-3, 0.5, 0.2, 0.02);
        assert!(matches!(r, Err(Error::OrthogonalityViolated { .. })));
    }

    #[test]
    fn nonnegative_start_is_positive_at_once() {
        let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
        let phi = first_eigenpair(&mesh).unwrap();
        let g = ScalarField::from_fn(mesh, |_| 1.0);
        let p = ParabolicProblem::new(phi.field, ParabolicForcing::Stationary(g), 1e-3, 1.0, 0.1).unwrap();
        let trace = find_positivity_time(&p).unwrap();
        assert_eq!(trace.t0, Some(0.0));
        assert!(!trace.hypothesis_warning);
    }
}

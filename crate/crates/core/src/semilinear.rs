//! Sublinear indefinite problems `-Δu = λu + m u^α` with `0 < α < 1`.
//!
//! The subsolution `[(1-α)U]^{1/(1-α)}` with `-Δ_h U = m` and the
//! supersolution `Cψ` with `(-Δ_h - λ)ψ = 1` bracket a positive solution,
//! which a lagged-shift iteration then finds.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{first_eigenpair, shifted_apply, solve_dirichlet, solve_shifted, solve_with_diagonal, Mesh, ScalarField};

/// Headroom factor on the supersolution constant.
pub const SUPER_HEADROOM: f64 = 1.01;
const MAX_DOUBLINGS: usize = 60;
pub const MAX_ITERATIONS: usize = 2000;
const UPDATE_TOL: f64 = 1e-11;
/// Bracket slack `BRACKET_SLACK · h² · ‖u⁰‖`.
const BRACKET_SLACK: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearProblem {
    mesh: Mesh,
    m: ScalarField,
    lambda: f64,
    alpha: f64,
    lambda1: f64,
}

impl SemilinearProblem {
    /// Validates `0 < α < 1`, `0 ≤ λ < λ₁(mesh)` and that `m` is positive somewhere.
    pub fn new(m: ScalarField, lambda: f64, alpha: f64) -> Result<Self> {
        let mesh = *m.mesh();
        mesh.validate()?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter("exponent must lie in (0, 1)"));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite and nonnegative"));
        }
        if m.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("weight must be finite"));
        }
        if !mesh.interior().any(|i| m.get(i) > 0.0) {
            return Err(Error::InvalidParameter("weight has no positive part"));
        }
        let lambda1 = first_eigenpair(&mesh)?.value;
        if lambda >= lambda1 {
            return Err(Error::ResolventNotPositive { lambda, lambda1 });
        }
        Ok(SemilinearProblem { mesh, m, lambda, alpha, lambda1 })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn weight(&self) -> &ScalarField {
        &self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Discrete principal eigenvalue of the mesh.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// `sup_i |(A u)_i - λ u_i - m_i max(u_i, 0)^α|` over interior nodes.
    pub fn residual(&self, u: &ScalarField) -> f64 {
        let mut au = vec![0.0; self.mesh.node_count()];
        shifted_apply(&self.mesh, u.values(), None, &mut au);
        self.mesh.interior().fold(0.0_f64, |acc, i| {
            let v = u.get(i);
            acc.max((au[i] - self.lambda * v - self.m.get(i) * v.max(0.0).powf(self.alpha)).abs())
        })
    }

    fn slack(&self, scale: f64) -> f64 {
        let h = self.mesh.h();
        BRACKET_SLACK * h * h * scale
    }
}

/// A solution together with the bracket it was found in.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketedSolution {
    pub u: ScalarField,
    pub sub: ScalarField,
    pub sup: ScalarField,
    pub residual: f64,
    pub iterations: usize,
    /// Supersolution constant `C` in `u⁰ = Cψ`.
    pub sup_constant: f64,
    /// Whether every iterate was nodewise above its predecessor (reported, not required).
    pub monotone: bool,
}

/// `U` with `-Δ_h U = m`; errors unless `U > 0` at every interior node.
pub fn linear_profile(p: &SemilinearProblem) -> Result<ScalarField> {
    let u = solve_dirichlet(&p.m)?;
    for i in p.mesh.interior() {
        if !(u.get(i) > 0.0) {
            return Err(Error::PositivityPrerequisiteFailed { node: i, value: u.get(i) });
        }
    }
    Ok(u)
}

/// `u₀ = [(1-α)U]^{1/(1-α)}`, checked against `-Δ_h u₀ ≤ λu₀ + m u₀^α + slack`.
///
/// The map `U ↦ u₀` is convex, so the discrete inequality holds without any
/// consistency error; the slack only absorbs rounding.
pub fn build_subsolution_semilinear(p: &SemilinearProblem) -> Result<ScalarField> {
    let big_u = linear_profile(p)?;
    let a = p.alpha;
    let sub = big_u.map(|v| ((1.0 - a) * v.max(0.0)).powf(1.0 / (1.0 - a))).with_dirichlet();
    let mut lap = vec![0.0; p.mesh.node_count()];
    shifted_apply(&p.mesh, sub.values(), None, &mut lap);
    let m_sup = p.m.sup_norm();
    let tol = p.slack(m_sup * sub.sup_norm().powf(a)) + 1e-12 * lap.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    for i in p.mesh.interior() {
        let v = sub.get(i);
        let defect = lap[i] - p.lambda * v - p.m.get(i) * v.powf(a);
        if defect > tol {
            return Err(Error::SubsolutionCheckFailed { node: i, defect });
        }
    }
    Ok(sub)
}

/// `ψ` with `(-Δ_h - λ)ψ = 1`.
pub fn resolvent_profile(p: &SemilinearProblem) -> Result<ScalarField> {
    if p.lambda >= p.lambda1 {
        return Err(Error::ResolventNotPositive { lambda: p.lambda, lambda1: p.lambda1 });
    }
    let one = ScalarField::from_fn(p.mesh, |_| 1.0).with_dirichlet();
    let psi = solve_shifted(&one, -p.lambda)?;
    if p.mesh.interior().any(|i| !(psi.get(i) > 0.0)) {
        return Err(Error::ResolventNotPositive { lambda: p.lambda, lambda1: p.lambda1 });
    }
    Ok(psi)
}

/// Smallest admissible supersolution constant, before the ordering check.
pub fn supersolution_constant(m_sup: f64, psi_sup: f64, alpha: f64) -> f64 {
    SUPER_HEADROOM * (m_sup * psi_sup.powf(alpha)).powf(1.0 / (1.0 - alpha))
}

/// `u⁰ = Cψ`, doubling `C` until `u₀ ≤ u⁰` at every node.
pub fn build_supersolution_semilinear(p: &SemilinearProblem) -> Result<ScalarField> {
    let sub = build_subsolution_semilinear(p)?;
    supersolution_above(p, &sub).map(|(s, _)| s)
}

fn supersolution_above(p: &SemilinearProblem, sub: &ScalarField) -> Result<(ScalarField, f64)> {
    let psi = resolvent_profile(p)?;
    let mut c = supersolution_constant(p.m.sup_norm(), psi.sup_norm(), p.alpha);
    for _ in 0..MAX_DOUBLINGS {
        if p.mesh.interior().all(|i| sub.get(i) <= c * psi.get(i)) {
            return Ok((psi.scaled(c), c));
        }
        c *= 2.0;
    }
    Err(Error::PrerequisiteFailed("no supersolution constant orders the bracket"))
}

/// Result of the fixed-point iteration without a bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub u: ScalarField,
    pub residual: f64,
    pub iterations: usize,
    pub monotone: bool,
}

/// Finds `u` with `u₀ ≤ u ≤ u⁰` solving the discrete problem.
pub fn solve_bracketed(p: &SemilinearProblem) -> Result<BracketedSolution> {
    let sub = build_subsolution_semilinear(p)?;
    let (sup, sup_constant) = supersolution_above(p, &sub)?;
    let out = iterate(p, &sub, Some((&sub, &sup)))?;
    Ok(BracketedSolution { u: out.u, sub, sup, residual: out.residual, iterations: out.iterations, sup_constant, monotone: out.monotone })
}

/// Runs the iteration from `start`, which also serves as the floor of the shift.
pub fn iterate_from(p: &SemilinearProblem, start: &ScalarField) -> Result<IterationOutcome> {
    if start.mesh() != &p.mesh {
        return Err(Error::MeshMisaligned);
    }
    iterate(p, start, None)
}

/// Each step solves `(A + D) u_{n+1} = λu_n + m max(u_n,0)^α + D u_n` with the
/// nodal shift `D_i = α m⁻_i max(u_n, s)_i^{α-1}`, `s` the start. This
/// linearises the absorbing part and lags the rest.
fn iterate(p: &SemilinearProblem, start: &ScalarField, bracket: Option<(&ScalarField, &ScalarField)>) -> Result<IterationOutcome> {
    let slack = p.slack(bracket.map_or(start.sup_norm(), |(_, sup)| sup.sup_norm()));
    let n = p.mesh.node_count();
    let a = p.alpha;
    let mut u = start.clone().with_dirichlet();
    let mut shift = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut monotone = true;
    let mut update = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        for i in 0..n {
            if p.mesh.is_boundary(i) {
                shift[i] = 0.0;
                rhs[i] = 0.0;
                continue;
            }
            let v = u.get(i);
            let mi = p.m.get(i);
            let base = v.max(start.get(i));
            shift[i] = if mi < 0.0 && base > 0.0 { -a * mi * base.powf(a - 1.0) } else { 0.0 };
            rhs[i] = p.lambda * v + mi * v.max(0.0).powf(a) + shift[i] * v;
        }
        let next = solve_with_diagonal(&ScalarField::from_raw(p.mesh, rhs.clone()), Some(&shift))?;
        update = 0.0;
        for i in p.mesh.interior() {
            let (old, new) = (u.get(i), next.get(i));
            update = update.max((new - old).abs());
            if new < old - slack {
                monotone = false;
            }
            if let Some((sub, sup)) = bracket {
                if new < sub.get(i) - slack || new > sup.get(i) + slack {
                    let excursion = if new < sub.get(i) { new - sub.get(i) } else { new - sup.get(i) };
                    return Err(Error::BracketViolated { node: i, excursion });
                }
            }
        }
        u = next;
        if update <= UPDATE_TOL * u.sup_norm() {
            let residual = p.residual(&u);
            let (min_u, node) = u.min_interior();
            if !(min_u > 0.0) {
                return Err(Error::PositivityPrerequisiteFailed { node, value: min_u });
            }
            return Ok(IterationOutcome { u, residual, iterations: it, monotone });
        }
    }
    Err(Error::IterationStalled { iterations: MAX_ITERATIONS, update })
}

/// The weight `m̂` for which `u₀` is an exact discrete solution, with `u₀`.
///
/// `m̂_i = ((A - λ)u₀)_i / u₀_i^α`; its continuum limit is
/// `m - α|∇U|²/((1-α)U) - λ(1-α)U`.
pub fn exact_weight(p: &SemilinearProblem) -> Result<(ScalarField, ScalarField)> {
    let sub = build_subsolution_semilinear(p)?;
    let mut au = vec![0.0; p.mesh.node_count()];
    shifted_apply(&p.mesh, sub.values(), None, &mut au);
    let values: Vec<f64> = (0..p.mesh.node_count())
        .map(|i| {
            if p.mesh.is_boundary(i) {
                p.m.get(i)
            } else {
                let v = sub.get(i);
                (au[i] - p.lambda * v) / v.powf(p.alpha)
            }
        })
        .collect();
    Ok((ScalarField::from_raw(p.mesh, values), sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::grid::sample_forcing;

    fn flat_problem(n: usize, alpha: f64) -> SemilinearProblem {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let m = sample_forcing(&mesh, &families::plateau_unit(2.0).unwrap()).unwrap();
        SemilinearProblem::new(m, 0.0, alpha).unwrap()
    }

    #[test]
    fn resolvent_is_exact_for_lambda_zero() {
        let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
        let m = ScalarField::from_fn(mesh, |_| 1.0);
        let p = SemilinearProblem::new(m, 0.0, 0.5).unwrap();
        let psi = resolvent_profile(&p).unwrap();
        for i in 0..mesh.node_count() {
            let x = mesh.coord(i)[0];
            assert!((psi.get(i) - 0.5 * (1.0 - x * x)).abs() < 1e-13);
        }
        assert!((supersolution_constant(1.0, 0.5, 0.5) - 0.505).abs() < 1e-15);
    }

    #[test]
    fn lambda_at_or_above_the_spectrum_is_rejected() {
        let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
        let m = ScalarField::from_fn(mesh, |_| 1.0);
        assert!(matches!(SemilinearProblem::new(m, 2.5, 0.5), Err(Error::ResolventNotPositive { .. })));
    }

    #[test]
    fn flat_weight_brackets_and_converges() {
        let p = flat_problem(128, 0.5);
        let sol = solve_bracketed(&p).unwrap();
        assert!(sol.residual < 1e-10 * p.weight().sup_norm() * sol.u.sup_norm(), "{}", sol.residual);
        assert!(sol.u.min_interior().0 > 0.0);
        for i in p.mesh().interior() {
            assert!(sol.sub.get(i) <= sol.u.get(i) + 1e-12);
            assert!(sol.u.get(i) <= sol.sup.get(i) + 1e-12);
        }
    }

    #[test]
    fn exact_weight_is_a_fixed_point() {
        let p = flat_problem(128, 0.75);
        let (m_hat, u0) = exact_weight(&p).unwrap();
        let q = SemilinearProblem::new(m_hat, 0.0, 0.75).unwrap();
        assert!(q.residual(&u0) < 1e-10 * u0.sup_norm() * q.weight().sup_norm());
        let out = iterate_from(&q, &u0).unwrap();
        assert_eq!(out.iterations, 1);
    }
}

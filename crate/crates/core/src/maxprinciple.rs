//! Balance and decay hypotheses in several dimensions, and the positivity
//! certificate they produce.
//!
//! The chain is: auxiliary solves `-Δς_y = χ_{B_ρ(y)}` for `y ∈ ∂K` give
//! `c* δ ≤ ς_y ≤ C* δ`; then `C⁺ = ĉ (c* ∫f⁺δ - C* ∫f⁻δ)` bounds `u` from
//! below on `K`; then `w = k φ₁^α` is a subsolution on `Ω \ K` as long as
//! `f ≥ -M φ₁^(α-2)` there. A solution `u` of the discrete problem is
//! certified by checking `u ≥ min(w, C⁺) - C h²` node by node.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forcing::PiecewiseForcing;
use crate::grid::{
    distance_field, laplacian_apply, sample_forcing, solve_dirichlet, sphere_area, EigenPair, Mesh, ScalarField,
};
use crate::verdict::{relative_margin, Verdict, REL_TOL};

/// Exponents tried when the caller does not fix `α`.
pub const ALPHA_SCAN: [f64; 6] = [1.25, 1.5, 2.0, 3.0, 4.0, 6.0];

/// Default number of boundary points of `K` used for the auxiliary problems.
pub const DEFAULT_SAMPLES: usize = 16;

/// Subsolution consistency slack factor: `τ = SLACK · h² · ‖w‖ · λ₁²`.
const SUBSOLUTION_SLACK: f64 = 10.0;

/// A forcing term on a mesh: a symbolic profile or sampled node values.
#[derive(Debug, Clone, PartialEq)]
pub enum NdForcing {
    /// On an interval mesh, the forcing on that interval; on a radial mesh,
    /// the radial profile on `(0, R)` or `(-R, R)`.
    Profile(PiecewiseForcing),
    Field(ScalarField),
}

impl NdForcing {
    /// Right-hand side for the discrete solve (cell averages for profiles).
    pub fn sampled(&self, mesh: &Mesh) -> Result<ScalarField> {
        match self {
            NdForcing::Profile(f) => sample_forcing(mesh, f),
            NdForcing::Field(f) => {
                if f.mesh() != mesh {
                    return Err(Error::MeshMisaligned);
                }
                Ok(f.clone().with_dirichlet())
            }
        }
    }

    /// Pointwise value at an interior node.
    pub fn nodal(&self, mesh: &Mesh, i: usize) -> Result<f64> {
        match self {
            NdForcing::Profile(f) => f.eval(mesh.coord(i)[0]),
            NdForcing::Field(f) => Ok(f.get(i)),
        }
    }

    /// `(∫ f⁺ δ, ∫ f⁻ δ)` over the domain.
    pub fn distance_weighted_parts(&self, mesh: &Mesh) -> Result<(f64, f64)> {
        match self {
            NdForcing::Profile(f) => {
                let (plus, minus) = (f.positive_part(), f.negative_part());
                match *mesh {
                    Mesh::Interval { lo, hi, .. } => Ok((
                        plus.weighted_integral(crate::Weight::DistanceToBoundary, lo, hi)?,
                        minus.weighted_integral(crate::Weight::DistanceToBoundary, lo, hi)?,
                    )),
                    Mesh::RadialDisk { radius, dim, .. } => {
                        let w = |g: &PiecewiseForcing| -> Result<f64> {
                            let k = dim - 1;
                            Ok(sphere_area(dim) * (radius * g.moment(0.0, radius, 0.0, k)? - g.moment(0.0, radius, 0.0, k + 1)?))
                        };
                        Ok((w(&plus)?, w(&minus)?))
                    }
                    Mesh::Rectangle { .. } => Err(Error::InvalidMesh("profiles need an interval or radial mesh")),
                }
            }
            NdForcing::Field(f) => {
                let mut plus = 0.0;
                let mut minus = 0.0;
                for i in mesh.interior() {
                    let v = f.get(i) * mesh.distance(i) * mesh.cell_volume(i);
                    if v > 0.0 {
                        plus += v;
                    } else {
                        minus -= v;
                    }
                }
                Ok((plus, minus))
            }
        }
    }

    /// `(∫ f, ∫ |f|)` over the domain.
    pub fn integrals(&self, mesh: &Mesh) -> Result<(f64, f64)> {
        match self {
            NdForcing::Profile(f) => {
                let (plus, minus) = (f.positive_part(), f.negative_part());
                let m = |g: &PiecewiseForcing| -> Result<f64> {
                    match *mesh {
                        Mesh::Interval { lo, hi, .. } => g.integrate(lo, hi),
                        Mesh::RadialDisk { radius, dim, .. } => Ok(sphere_area(dim) * g.moment(0.0, radius, 0.0, dim - 1)?),
                        Mesh::Rectangle { .. } => Err(Error::InvalidMesh("profiles need an interval or radial mesh")),
                    }
                };
                let (p, n) = (m(&plus)?, m(&minus)?);
                Ok((p - n, p + n))
            }
            NdForcing::Field(f) => {
                let mut total = 0.0;
                let mut abs = 0.0;
                for i in mesh.interior() {
                    total += f.get(i) * mesh.cell_volume(i);
                    abs += f.get(i).abs() * mesh.cell_volume(i);
                }
                Ok((total, abs))
            }
        }
    }
}

/// Shape of the compact set `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactShape {
    /// `{ |x| ≤ r_K }` on a radial mesh.
    RadialBall { radius: f64 },
    /// `[lo, hi]` on an interval mesh.
    Segment { lo: f64, hi: f64 },
    /// `[x0, x1] × [y0, y1]` on a rectangle mesh.
    SubRectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

/// A compact set of mesh nodes, its node mask and boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    shape: CompactShape,
    mask: Vec<bool>,
    boundary: Vec<usize>,
}

impl CompactSet {
    pub fn new(mesh: &Mesh, shape: CompactShape) -> Result<Self> {
        let n = mesh.node_count();
        let eps = 1e-12 * mesh.h();
        let inside = |p: [f64; 2]| match (shape, *mesh) {
            (CompactShape::RadialBall { radius }, Mesh::RadialDisk { .. }) => Some(p[0] <= radius + eps),
            (CompactShape::Segment { lo, hi }, Mesh::Interval { .. }) => Some(p[0] >= lo - eps && p[0] <= hi + eps),
            (CompactShape::SubRectangle { x0, x1, y0, y1 }, Mesh::Rectangle { .. }) => {
                Some(p[0] >= x0 - eps && p[0] <= x1 + eps && p[1] >= y0 - eps && p[1] <= y1 + eps)
            }
            _ => None,
        };
        let mut mask = vec![false; n];
        for (i, m) in mask.iter_mut().enumerate() {
            *m = inside(mesh.coord(i)).ok_or(Error::InvalidMesh("compact set does not match the mesh kind"))?;
        }
        let boundary: Vec<usize> = match *mesh {
            Mesh::RadialDisk { .. } => (0..n).filter(|i| mask[*i]).max().into_iter().collect(),
            Mesh::Interval { .. } => {
                let inside: Vec<usize> = (0..n).filter(|i| mask[*i]).collect();
                match (inside.first(), inside.last()) {
                    (Some(a), Some(b)) if a != b => vec![*a, *b],
                    (Some(a), _) => vec![*a],
                    _ => Vec::new(),
                }
            }
            Mesh::Rectangle { nx, ny, .. } => (0..n)
                .filter(|&i| {
                    if !mask[i] {
                        return false;
                    }
                    let (ix, iy) = (i % (nx + 1), i / (nx + 1));
                    let w = nx + 1;
                    (ix == 0 || !mask[i - 1])
                        || (ix == nx || !mask[i + 1])
                        || (iy == 0 || !mask[i - w])
                        || (iy == ny || !mask[i + w])
                })
                .collect(),
        };
        if boundary.is_empty() {
            return Err(Error::InvalidParameter("compact set contains no nodes"));
        }
        let h = mesh.h();
        for i in 0..n {
            if mask[i] && mesh.distance(i) <= 2.0 * h {
                return Err(Error::InvalidParameter("compact set must stay more than 2h from the boundary"));
            }
        }
        Ok(CompactSet { shape, mask, boundary })
    }

    pub fn shape(&self) -> CompactShape {
        self.shape
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior mesh nodes outside `K`.
    pub fn ring<'a>(&'a self, mesh: &'a Mesh) -> impl Iterator<Item = usize> + 'a {
        mesh.interior().filter(move |i| !self.mask[*i])
    }
}

/// Volume of a ball of radius `rho` in dimension `dim`.
pub fn ball_volume(rho: f64, dim: u32) -> f64 {
    sphere_area(dim) * rho.powi(dim as i32) / dim as f64
}

/// Share of the sphere `|z| = r` lying within `rho` of a point at distance `d`
/// from the origin, i.e. the rotation average of `χ_{B_ρ(y)}`.
fn sphere_fraction(r: f64, d: f64, rho: f64, dim: u32) -> f64 {
    if dim == 1 {
        let a = if (r - d).abs() < rho { 0.5 } else { 0.0 };
        let b = if (r + d).abs() < rho { 0.5 } else { 0.0 };
        return a + b;
    }
    if r == 0.0 || d == 0.0 {
        return if (r - d).abs() < rho { 1.0 } else { 0.0 };
    }
    let c0 = ((r * r + d * d - rho * rho) / (2.0 * r * d)).clamp(-1.0, 1.0);
    if dim == 2 {
        c0.acos() / PI
    } else {
        0.5 * (1.0 - c0)
    }
}

const SUBCELLS: usize = 16;

/// `ς_y` solving `-Δ_h ς = χ_{B_ρ(y)}`, with the indicator weighted by the
/// fraction of each cell inside the ball. On radial meshes the indicator is
/// averaged over rotations, which leaves every integral against radial data unchanged.
pub fn auxiliary_solution(mesh: &Mesh, y: usize, rho: f64) -> Result<ScalarField> {
    let h = mesh.h();
    if !(rho > 2.0 * h) {
        return Err(Error::InvalidParameter("ball radius must exceed 2h"));
    }
    if y >= mesh.node_count() || mesh.distance(y) - rho <= h {
        return Err(Error::BallNotInterior);
    }
    let yc = mesh.coord(y);
    let mut rhs = vec![0.0; mesh.node_count()];
    match *mesh {
        Mesh::Interval { .. } => {
            for i in mesh.interior() {
                let x = mesh.coord(i)[0];
                let overlap = (x + 0.5 * h).min(yc[0] + rho) - (x - 0.5 * h).max(yc[0] - rho);
                rhs[i] = (overlap / h).clamp(0.0, 1.0);
            }
        }
        Mesh::Rectangle { .. } => {
            let (hx, hy) = mesh.spacing();
            for i in mesh.interior() {
                let p = mesh.coord(i);
                if (p[0] - yc[0]).abs() > rho + hx || (p[1] - yc[1]).abs() > rho + hy {
                    continue;
                }
                let mut hits = 0usize;
                for a in 0..SUBCELLS {
                    for b in 0..SUBCELLS {
                        let x = p[0] - 0.5 * hx + hx * (a as f64 + 0.5) / SUBCELLS as f64;
                        let z = p[1] - 0.5 * hy + hy * (b as f64 + 0.5) / SUBCELLS as f64;
                        if (x - yc[0]).powi(2) + (z - yc[1]).powi(2) < rho * rho {
                            hits += 1;
                        }
                    }
                }
                rhs[i] = hits as f64 / (SUBCELLS * SUBCELLS) as f64;
            }
        }
        Mesh::RadialDisk { dim, .. } => {
            let d = yc[0];
            for i in mesh.interior() {
                let (ra, rb) = mesh.radial_cell(i);
                if ra > d + rho || rb < d - rho {
                    continue;
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for k in 0..SUBCELLS {
                    let r = ra + (rb - ra) * (k as f64 + 0.5) / SUBCELLS as f64;
                    let w = r.powi(dim as i32 - 1);
                    num += w * sphere_fraction(r, d, rho, dim);
                    den += w;
                }
                rhs[i] = num / den;
            }
        }
    }
    solve_dirichlet(&ScalarField::new(*mesh, rhs)?)
}

/// The constants `c*`, `C*` with `c* δ ≤ ς_y ≤ C* δ` for every sampled `y ∈ ∂K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformConstants {
    pub c_star: f64,
    pub big_c_star: f64,
    pub samples_used: usize,
}

/// Ratio `ς / δ` over admissible nodes plus its one-sided boundary limits.
fn ratio_extremes(mesh: &Mesh, sigma: &ScalarField) -> Result<(f64, f64)> {
    let h = mesh.h();
    let v = sigma.values();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut push = |r: f64| -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::DegenerateRatio { value: r });
        }
        lo = lo.min(r);
        hi = hi.max(r);
        Ok(())
    };
    let trimmed = matches!(mesh, Mesh::Rectangle { .. });
    for i in mesh.interior() {
        let d = mesh.distance(i);
        if trimmed && d < 2.0 * h - 1e-12 * h {
            continue;
        }
        push(v[i] / d)?;
    }
    // normal derivative at the boundary, second-order one-sided
    match *mesh {
        Mesh::Interval { n, .. } => {
            push((4.0 * v[1] - v[2]) / (2.0 * h))?;
            push((4.0 * v[n - 1] - v[n - 2]) / (2.0 * h))?;
        }
        Mesh::RadialDisk { n, .. } => push((4.0 * v[n - 1] - v[n - 2]) / (2.0 * h))?,
        Mesh::Rectangle { .. } => {}
    }
    Ok((lo, hi))
}

/// Extremes of `ς_y / δ` over up to `samples` evenly spaced points of `∂K`.
pub fn uniform_constants(mesh: &Mesh, k: &CompactSet, rho: f64, samples: usize) -> Result<UniformConstants> {
    let nodes = k.boundary_nodes();
    let take = samples.max(1).min(nodes.len());
    let mut c_star = f64::INFINITY;
    let mut big = f64::NEG_INFINITY;
    for s in 0..take {
        let y = nodes[s * nodes.len() / take];
        let sigma = auxiliary_solution(mesh, y, rho)?;
        let (lo, hi) = ratio_extremes(mesh, &sigma)?;
        c_star = c_star.min(lo);
        big = big.max(hi);
    }
    Ok(UniformConstants { c_star, big_c_star: big, samples_used: take })
}

/// A node where a hypothesis is tightest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdWitness {
    pub condition: &'static str,
    pub node: usize,
    pub margin: f64,
}

/// Constants and verdicts of both hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub rho: f64,
    pub c_star: f64,
    pub big_c_star: f64,
    /// `1 / |B_ρ|`.
    pub c_hat: f64,
    /// `∫ f⁺ δ`.
    pub positive_weighted: f64,
    /// `∫ f⁻ δ`.
    pub negative_weighted: f64,
    pub c_plus: f64,
    pub h1: Verdict,
    pub alpha: f64,
    pub lambda1: f64,
    pub epsilon: f64,
    pub big_m: f64,
    pub k: f64,
    /// `None` until [`check_h2`] has run.
    pub h2: Option<Verdict>,
    pub witnesses: Vec<NdWitness>,
}

fn check_sign_structure(f: &NdForcing, mesh: &Mesh, k: &CompactSet) -> Result<()> {
    let mut any_positive = false;
    for i in mesh.interior() {
        if k.contains(i) {
            let v = f.nodal(mesh, i)?;
            if v < 0.0 {
                return Err(Error::SignStructureViolation { location: mesh.coord(i)[0] });
            }
            any_positive |= v > 0.0;
        }
    }
    if !any_positive {
        return Err(Error::SignStructureViolation { location: mesh.coord(k.boundary_nodes()[0])[0] });
    }
    Ok(())
}

/// Checks that every sampled ball `B_ρ(y)`, `y ∈ ∂K`, lies where `f ≥ 0`.
fn check_balls_in_positive_set(f: &NdForcing, mesh: &Mesh, k: &CompactSet, rho: f64) -> Result<()> {
    for &y in k.boundary_nodes() {
        let yc = mesh.coord(y);
        for i in mesh.interior() {
            let p = mesh.coord(i);
            let dist = match *mesh {
                Mesh::RadialDisk { .. } => (p[0] - yc[0]).abs(),
                _ => ((p[0] - yc[0]).powi(2) + (p[1] - yc[1]).powi(2)).sqrt(),
            };
            if dist <= rho + mesh.h() && f.nodal(mesh, i)? < 0.0 {
                return Err(Error::BallNotInterior);
            }
        }
    }
    Ok(())
}

/// Balance hypothesis: `c* ∫f⁺δ > C* ∫f⁻δ`, and the bound `C⁺` on `∂K`.
pub fn check_h1(f: &NdForcing, mesh: &Mesh, k: &CompactSet, rho: f64, samples: usize) -> Result<HypothesisReport> {
    check_sign_structure(f, mesh, k)?;
    check_balls_in_positive_set(f, mesh, k, rho)?;
    let consts = uniform_constants(mesh, k, rho, samples)?;
    let (pos, neg) = f.distance_weighted_parts(mesh)?;
    let c_hat = 1.0 / ball_volume(rho, mesh.dim());
    let lhs = consts.c_star * pos;
    let rhs = consts.big_c_star * neg;
    let (h1, margin) = Verdict::strict(lhs, rhs);
    let node = k.boundary_nodes()[0];
    Ok(HypothesisReport {
        rho,
        c_star: consts.c_star,
        big_c_star: consts.big_c_star,
        c_hat,
        positive_weighted: pos,
        negative_weighted: neg,
        c_plus: c_hat * (lhs - rhs),
        h1,
        alpha: f64::NAN,
        lambda1: f64::NAN,
        epsilon: f64::NAN,
        big_m: f64::NAN,
        k: f64::NAN,
        h2: None,
        witnesses: vec![NdWitness { condition: "h1", node, margin }],
    })
}

/// Discrete `|∇φ|` at a node: centred inside, second-order one-sided on the boundary.
fn gradient_norm(mesh: &Mesh, phi: &[f64], i: usize) -> f64 {
    let one_d = |v: &dyn Fn(usize) -> f64, j: usize, last: usize, h: f64, sym_at_zero: bool| -> f64 {
        if j == 0 {
            if sym_at_zero {
                0.0
            } else {
                (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
            }
        } else if j == last {
            (3.0 * v(last) - 4.0 * v(last - 1) + v(last - 2)) / (2.0 * h)
        } else {
            (v(j + 1) - v(j - 1)) / (2.0 * h)
        }
    };
    match *mesh {
        Mesh::Interval { n, .. } => one_d(&|j| phi[j], i, n, mesh.h(), false).abs(),
        Mesh::RadialDisk { n, .. } => one_d(&|j| phi[j], i, n, mesh.h(), true).abs(),
        Mesh::Rectangle { nx, ny, .. } => {
            let (hx, hy) = mesh.spacing();
            let (ix, iy) = (i % (nx + 1), i / (nx + 1));
            let gx = one_d(&|j| phi[iy * (nx + 1) + j], ix, nx, hx, false);
            let gy = one_d(&|j| phi[j * (nx + 1) + ix], iy, ny, hy, false);
            (gx * gx + gy * gy).sqrt()
        }
    }
}

/// Decay hypothesis for a given `α > 1`; fills `ε`, `M`, `k` and `h2`.
pub fn check_h2(report: &mut HypothesisReport, f: &NdForcing, mesh: &Mesh, k: &CompactSet, alpha: f64, phi: &EigenPair) -> Result<()> {
    if !report.c_plus.is_finite() {
        return Err(Error::PrerequisiteFailed("run the balance check first"));
    }
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter("alpha must exceed 1"));
    }
    if phi.field.mesh() != mesh {
        return Err(Error::MeshMisaligned);
    }
    let lambda = phi.value;
    let v = phi.field.values();
    let mut eps = f64::INFINITY;
    let mut eps_node = 0;
    for i in 0..mesh.node_count() {
        if k.contains(i) && !k.boundary_nodes().contains(&i) {
            continue;
        }
        let g = gradient_norm(mesh, v, i);
        let e = (alpha - 1.0) * g * g - lambda * v[i] * v[i];
        if e < eps {
            eps = e;
            eps_node = i;
        }
    }
    let peak = k.boundary_nodes().iter().map(|&i| v[i].powf(alpha)).fold(0.0_f64, f64::max);
    let kk = report.c_plus / peak;
    let big_m = alpha * report.c_plus * eps / peak;
    report.alpha = alpha;
    report.lambda1 = lambda;
    report.epsilon = eps;
    report.big_m = big_m;
    report.k = kk;
    report.witnesses.retain(|w| w.condition == "h1");

    let eps_margin = eps / lambda;
    report.witnesses.push(NdWitness { condition: "h2-epsilon", node: eps_node, margin: eps_margin });
    let mut worst = (f64::INFINITY, 0usize);
    for i in k.ring(mesh) {
        let fi = f.nodal(mesh, i)?;
        let bound = big_m * v[i].powf(alpha - 2.0);
        let margin = relative_margin(fi + bound, fi.abs() + bound.abs());
        if margin < worst.0 {
            worst = (margin, i);
        }
    }
    report.witnesses.push(NdWitness { condition: "h2-decay", node: worst.1, margin: worst.0 });
    let verdict = if !(eps_margin > REL_TOL) || !(report.c_plus > 0.0) {
        Verdict::Fails
    } else {
        Verdict::from_margin(worst.0)
    };
    report.h2 = Some(verdict);
    Ok(())
}

/// Runs the balance check and then the decay check, scanning `α` when not given.
pub fn check_hypotheses(f: &NdForcing, mesh: &Mesh, k: &CompactSet, rho: f64, alpha: Option<f64>, phi: &EigenPair) -> Result<HypothesisReport> {
    let mut report = check_h1(f, mesh, k, rho, DEFAULT_SAMPLES)?;
    match alpha {
        Some(a) => check_h2(&mut report, f, mesh, k, a, phi)?,
        None => {
            for a in ALPHA_SCAN {
                check_h2(&mut report, f, mesh, k, a, phi)?;
                if report.h2 == Some(Verdict::Holds) {
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// The subsolution `w = k φ₁^α` on `Ω \ K` and the minorant `min(w, C⁺)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsolution {
    pub w: ScalarField,
    /// `min(w, C⁺)` on the ring, `C⁺` on `K`.
    pub minorant: ScalarField,
    /// Largest value of `-Δ_h w - f_h` over ring nodes.
    pub max_defect: f64,
    pub slack: f64,
}

/// Builds `w` and checks `-Δ_h w ≤ f_h + τ` on the ring and `w ≤ C⁺` on `∂K`.
pub fn build_subsolution(report: &HypothesisReport, f: &NdForcing, mesh: &Mesh, k: &CompactSet, phi: &EigenPair) -> Result<Subsolution> {
    if report.h1 != Verdict::Holds || report.h2 != Some(Verdict::Holds) {
        return Err(Error::PrerequisiteFailed("both hypotheses must hold"));
    }
    let w = phi.field.map(|p| report.k * p.max(0.0).powf(report.alpha)).with_dirichlet();
    let lap = laplacian_apply(&w);
    let rhs = f.sampled(mesh)?;
    let h = mesh.h();
    let slack = SUBSOLUTION_SLACK * h * h * w.sup_norm() * report.lambda1 * report.lambda1;
    let mut max_defect = f64::NEG_INFINITY;
    for i in k.ring(mesh) {
        let defect = lap.get(i) - rhs.get(i);
        max_defect = max_defect.max(defect);
        if defect > slack {
            return Err(Error::SubsolutionCheckFailed { node: i, defect });
        }
    }
    let bound_tol = 1e-12 * report.c_plus.abs();
    for &i in k.boundary_nodes() {
        if w.get(i) > report.c_plus + bound_tol {
            return Err(Error::SubsolutionCheckFailed { node: i, defect: w.get(i) - report.c_plus });
        }
    }
    let minorant = ScalarField::from_fn(*mesh, |_| 0.0);
    let values: Vec<f64> = (0..mesh.node_count())
        .map(|i| {
            if mesh.is_boundary(i) {
                0.0
            } else if k.contains(i) {
                report.c_plus
            } else {
                w.get(i).min(report.c_plus)
            }
        })
        .collect();
    let minorant = ScalarField::new(*minorant.mesh(), values)?;
    Ok(Subsolution { w, minorant, max_defect, slack })
}

/// Everything needed to trust `u > 0`: constants, subsolution and the sandwich.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCertificate {
    pub report: HypothesisReport,
    pub u: ScalarField,
    pub subsolution: Subsolution,
    /// `min (u - minorant)` over interior nodes, and where it occurs.
    pub min_gap: f64,
    pub gap_node: usize,
    /// Allowed sandwich violation `C h²`.
    pub tolerance: f64,
    pub min_u: f64,
}

/// Sandwich constant: `u ≥ minorant - SANDWICH · h² · max(‖minorant‖, ‖u‖)`.
const SANDWICH: f64 = 10.0;

/// Runs both hypotheses, builds the subsolution, solves and certifies `u > 0`.
pub fn verify_positivity(f: &NdForcing, mesh: &Mesh, k: &CompactSet, rho: f64, alpha: Option<f64>) -> Result<PositivityCertificate> {
    let phi = crate::grid::first_eigenpair(mesh)?;
    let report = check_hypotheses(f, mesh, k, rho, alpha, &phi)?;
    if report.h1 != Verdict::Holds {
        return Err(Error::PrerequisiteFailed("balance hypothesis does not hold"));
    }
    if report.h2 != Some(Verdict::Holds) {
        return Err(Error::PrerequisiteFailed("decay hypothesis does not hold"));
    }
    let sub = build_subsolution(&report, f, mesh, k, &phi)?;
    let u = solve_dirichlet(&f.sampled(mesh)?)?;
    let h = mesh.h();
    let tolerance = SANDWICH * h * h * sub.minorant.sup_norm().max(u.sup_norm());
    let mut min_gap = f64::INFINITY;
    let mut gap_node = 0;
    for i in mesh.interior() {
        let g = u.get(i) - sub.minorant.get(i);
        if g < min_gap {
            min_gap = g;
            gap_node = i;
        }
    }
    let (min_u, min_node) = u.min_interior();
    if min_gap < -tolerance {
        return Err(Error::CertificateFailed { node: gap_node, gap: min_gap });
    }
    if !(min_u > 0.0) {
        return Err(Error::CertificateFailed { node: min_node, gap: min_u });
    }
    Ok(PositivityCertificate { report, u, subsolution: sub, min_gap, gap_node, tolerance, min_u })
}

/// Flatness in several dimensions: `∫ f = 0`, with the boundary flux of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub verdict: Verdict,
    pub integral: f64,
    pub abs_integral: f64,
    /// Largest inward one-sided difference quotient `u_{next} / h` at boundary nodes.
    pub max_boundary_quotient: f64,
    /// Sum over boundary nodes of the outward normal quotient times boundary measure.
    pub boundary_flux: f64,
}

/// `∫ f = 0` within `REL_TOL · ∫|f|`; needs a positivity certificate for `f`.
pub fn verify_flatness_nd(cert: &PositivityCertificate, f: &NdForcing, mesh: &Mesh) -> Result<FlatnessReport> {
    if cert.u.mesh() != mesh {
        return Err(Error::PrerequisiteFailed("certificate belongs to another mesh"));
    }
    let (integral, abs_integral) = f.integrals(mesh)?;
    let verdict = if abs_integral > 0.0 && integral.abs() < REL_TOL * abs_integral {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    let (quotient, flux) = boundary_quotients(&cert.u);
    Ok(FlatnessReport { verdict, integral, abs_integral, max_boundary_quotient: quotient, boundary_flux: flux })
}

/// `(max |u_inner| / h, Σ ∂u/∂n · |face|)` over the Dirichlet boundary.
pub fn boundary_quotients(u: &ScalarField) -> (f64, f64) {
    let mesh = u.mesh();
    let v = u.values();
    match *mesh {
        Mesh::Interval { n, .. } => {
            let h = mesh.h();
            let (a, b) = (v[1] / h, v[n - 1] / h);
            (a.abs().max(b.abs()), -(a + b))
        }
        Mesh::RadialDisk { n, radius, dim } => {
            let h = mesh.h();
            let q = v[n - 1] / h;
            (q.abs(), -q * sphere_area(dim) * radius.powi(dim as i32 - 1))
        }
        Mesh::Rectangle { nx, ny, .. } => {
            let (hx, hy) = mesh.spacing();
            let mut max_q: f64 = 0.0;
            let mut flux = 0.0;
            for ix in 1..nx {
                for (edge, inner) in [(0, 1), (ny, ny - 1)] {
                    let _ = edge;
                    let q = v[mesh.index2(ix, inner)] / hy;
                    max_q = max_q.max(q.abs());
                    flux -= q * hx;
                }
            }
            for iy in 1..ny {
                for inner in [1, nx - 1] {
                    let q = v[mesh.index2(inner, iy)] / hx;
                    max_q = max_q.max(q.abs());
                    flux -= q * hy;
                }
            }
            (max_q, flux)
        }
    }
}

/// Zero-padded forcing and solution on a larger, node-aligned mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct NdExtension {
    pub forcing: ScalarField,
    pub padded: ScalarField,
    pub solved: ScalarField,
    pub sup_difference: f64,
    pub tolerance: f64,
}

/// Pads a flat solution by zero and checks it against a direct solve on `big`.
///
/// `big` must share the spacing of `mesh` and contain it: a longer interval
/// with the same centre, or a larger ball.
pub fn extend_by_zero_nd(flatness: &FlatnessReport, f: &NdForcing, u: &ScalarField, big: &Mesh) -> Result<NdExtension> {
    if flatness.verdict != Verdict::Holds && flatness.abs_integral > 0.0 {
        return Err(Error::NotFlat { integral: flatness.integral });
    }
    let mesh = *u.mesh();
    let h = mesh.h();
    let offset = match (mesh, *big) {
        (Mesh::Interval { lo, hi, .. }, Mesh::Interval { lo: blo, hi: bhi, .. }) => {
            let shift = (lo - blo) / h;
            if (big.h() - h).abs() > 1e-12 * h || blo > lo || bhi < hi || (shift - shift.round()).abs() > 1e-9 {
                return Err(Error::MeshMisaligned);
            }
            shift.round() as usize
        }
        (Mesh::RadialDisk { radius, dim, .. }, Mesh::RadialDisk { radius: br, dim: bd, .. }) => {
            if (big.h() - h).abs() > 1e-12 * h || br < radius || bd != dim {
                return Err(Error::MeshMisaligned);
            }
            0
        }
        _ => return Err(Error::MeshMisaligned),
    };
    let small_f = f.sampled(&mesh)?;
    let mut fv = vec![0.0; big.node_count()];
    let mut uv = vec![0.0; big.node_count()];
    for i in 0..mesh.node_count() {
        fv[i + offset] = small_f.get(i);
        uv[i + offset] = u.get(i);
    }
    let forcing = ScalarField::new(*big, fv)?;
    let padded = ScalarField::new(*big, uv)?;
    let solved = solve_dirichlet(&forcing)?;
    let sup_difference = (0..big.node_count()).fold(0.0_f64, |m, i| m.max((solved.get(i) - padded.get(i)).abs()));
    let scale = small_f.sup_norm().max(1.0) * match mesh {
        Mesh::Interval { lo, hi, .. } => (hi - lo) * (hi - lo),
        Mesh::RadialDisk { radius, .. } => radius * radius,
        Mesh::Rectangle { .. } => 1.0,
    };
    let tolerance = SANDWICH * h * h * scale;
    if sup_difference > tolerance {
        return Err(Error::NotFlat { integral: flatness.integral });
    }
    Ok(NdExtension { forcing, padded, solved, sup_difference, tolerance })
}

/// Distance field restricted to interior nodes; convenience for callers.
pub fn interior_distance(mesh: &Mesh) -> ScalarField {
    distance_field(mesh).with_dirichlet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::grid::first_eigenpair;

    #[test]
    fn sphere_fraction_limits() {
        assert_eq!(sphere_fraction(0.0, 0.05, 0.1, 2), 1.0);
        assert!((sphere_fraction(0.5, 0.5, 0.1, 2) - 0.98_f64.acos() / PI).abs() < 1e-15);
        assert_eq!(sphere_fraction(0.9, 0.5, 0.1, 2), 0.0);
        assert!((sphere_fraction(0.5, 0.5, 0.1, 3) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn auxiliary_is_nonnegative() {
        let mesh = Mesh::radial_disk(64, 1.0, 2).unwrap();
        let s = auxiliary_solution(&mesh, 40, 0.1).unwrap();
        assert!(s.values().iter().all(|v| *v >= 0.0));
        assert!(s.min_interior().0 > 0.0);
        assert!(matches!(auxiliary_solution(&mesh, 60, 0.1), Err(Error::BallNotInterior)));
    }

    #[test]
    fn interval_constants_are_ordered() {
        let mesh = Mesh::interval(-1.0, 1.0, 128).unwrap();
        let k = CompactSet::new(&mesh, CompactShape::Segment { lo: -0.25, hi: 0.25 }).unwrap();
        let c = uniform_constants(&mesh, &k, 0.25, 16).unwrap();
        assert!(0.0 < c.c_star && c.c_star < c.big_c_star && c.big_c_star < 1.0, "{c:?}");
        let half = uniform_constants(&mesh, &k, 0.125, 16).unwrap();
        assert!(half.c_star < c.c_star);
    }

    #[test]
    fn epsilon_on_the_interval() {
        let mesh = Mesh::interval(-1.0, 1.0, 256).unwrap();
        let phi = first_eigenpair(&mesh).unwrap();
        let f = NdForcing::Profile(families::plateau(1.0).unwrap());
        let wide = CompactSet::new(&mesh, CompactShape::Segment { lo: -0.75, hi: 0.75 }).unwrap();
        let mut report = check_h1(&f, &mesh, &wide, 0.2, 16).unwrap();
        check_h2(&mut report, &f, &mesh, &wide, 2.0, &phi).unwrap();
        let t = 3.0 * PI / 8.0;
        let expect = PI * PI / 4.0 * (t.sin().powi(2) - t.cos().powi(2));
        assert!((report.epsilon - expect).abs() < 1e-3, "{} vs {expect}", report.epsilon);

        let narrow = CompactSet::new(&mesh, CompactShape::Segment { lo: -0.25, hi: 0.25 }).unwrap();
        let mut report = check_h1(&f, &mesh, &narrow, 0.2, 16).unwrap();
        check_h2(&mut report, &f, &mesh, &narrow, 2.0, &phi).unwrap();
        assert!(report.epsilon < 0.0);
        assert_eq!(report.h2, Some(Verdict::Fails));
    }

    #[test]
    fn classical_case_certifies() {
        let mesh = Mesh::radial_disk(64, 1.0, 2).unwrap();
        let f = NdForcing::Profile(PiecewiseForcing::piecewise_constant(&[0.0, 1.0], &[1.0]).unwrap());
        let k = CompactSet::new(&mesh, CompactShape::RadialBall { radius: 0.7 }).unwrap();
        let cert = verify_positivity(&f, &mesh, &k, 0.1, None).unwrap();
        assert_eq!(cert.report.h1, Verdict::Holds);
        assert!(cert.min_u > 0.0);
    }
}

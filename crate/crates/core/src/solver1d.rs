//! Exact solutions of `-u'' = f` on an interval with zero boundary values.
//!
//! With `L = hi - lo`, `A(x) = ∫_lo^x (y - lo) f` and `B(x) = ∫_x^hi (hi - y) f`
//! the Green representation reads `u = ((hi - x) A + (x - lo) B) / L` and
//! `u' = (B - A) / L`. Both moments are closed forms, so `u` is exact up to
//! rounding.
//!
//! On a symmetric domain `(c - R, c + R)` the positivity conditions are
//! stated on the half profile `r = x - c ∈ (0, R)`: `f = f⁺` on `(0, r0)` and
//! `f = -f⁻` on `(r0, R)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forcing::{double_tail_integral, PiecewiseForcing, Sign, Weight};
use crate::verdict::{relative_margin, Verdict, REL_TOL};

/// Default number of Chebyshev probes for the decay condition.
pub const DECAY_PROBES: usize = 512;

/// `G(x, y)` for `-d²/dx²` on `(lo, hi)` with Dirichlet conditions.
pub fn green_function(x: f64, y: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter("need lo < hi"));
    }
    for p in [x, y] {
        if !(p >= lo && p <= hi) {
            return Err(Error::OutOfDomain { x: p });
        }
    }
    let l = hi - lo;
    Ok(if x < y { (hi - y) * (x - lo) / l } else { (y - lo) * (hi - x) / l })
}

/// Exact solution of the Dirichlet problem for a symbolic forcing.
#[derive(Debug, Clone)]
pub struct Solution1D {
    forcing: PiecewiseForcing,
}

impl Solution1D {
    pub fn forcing(&self) -> &PiecewiseForcing {
        &self.forcing
    }

    pub fn domain(&self) -> (f64, f64) {
        self.forcing.domain()
    }

    fn left_moment(&self, x: f64) -> Result<f64> {
        let lo = self.forcing.domain().0;
        self.forcing.moment(lo, x, lo, 1)
    }

    fn right_moment(&self, x: f64) -> Result<f64> {
        let hi = self.forcing.domain().1;
        Ok(-self.forcing.moment(x, hi, hi, 1)?)
    }

    /// `u(x)`; exactly zero at both ends.
    pub fn value(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.forcing.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x });
        }
        if x == lo || x == hi {
            return Ok(0.0);
        }
        let a = self.left_moment(x)?;
        let b = self.right_moment(x)?;
        Ok(((hi - x) * a + (x - lo) * b) / (hi - lo))
    }

    /// `u'(x)`, including the one-sided values at the ends when they exist.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.forcing.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x });
        }
        let a = if x == lo { 0.0 } else { self.left_moment(x)? };
        let b = if x == hi { 0.0 } else { self.right_moment(x)? };
        Ok((b - a) / (hi - lo))
    }

    /// Values and derivatives on `n + 1` uniform nodes.
    pub fn sample(&self, n: usize) -> Result<SampledSolution> {
        let (lo, hi) = self.forcing.domain();
        let n = n.max(1);
        let mut x = Vec::with_capacity(n + 1);
        let mut u = Vec::with_capacity(n + 1);
        let mut du = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let xi = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
            x.push(xi);
            u.push(self.value(xi)?);
            du.push(self.derivative(xi).unwrap_or(f64::NAN));
        }
        Ok(SampledSolution { x, u, du })
    }

    /// Boundary slopes `(u'(lo), u'(hi))`, or one-sided difference quotients
    /// when a singular forcing makes the exact slope diverge.
    pub fn boundary_slopes(&self) -> (f64, f64, bool) {
        let (lo, hi) = self.forcing.domain();
        match (self.derivative(lo), self.derivative(hi)) {
            (Ok(l), Ok(r)) => (l, r, true),
            (l, r) => {
                let eta = 1e-8 * (hi - lo);
                let ql = l.unwrap_or_else(|_| self.value(lo + eta).unwrap_or(f64::NAN) / eta);
                let qr = r.unwrap_or_else(|_| -self.value(hi - eta).unwrap_or(f64::NAN) / eta);
                (ql, qr, false)
            }
        }
    }
}

/// Uniform samples of a solution: nodes, `u` and `u'` (NaN where `u'` diverges).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSolution {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

/// Solves `-u'' = f`, `u(lo) = u(hi) = 0`.
pub fn solve_exact(f: &PiecewiseForcing) -> Result<Solution1D> {
    f.check_distance_integrable()?;
    Ok(Solution1D { forcing: f.clone() })
}

/// `u'(hi)`; equals `∫_{r0}^R f⁻ - ∫_0^{r0} f⁺` on symmetric domains.
pub fn boundary_derivative(f: &PiecewiseForcing) -> Result<f64> {
    f.check_integrable()?;
    let (lo, hi) = f.domain();
    Ok(-f.moment(lo, hi, lo, 1)? / (hi - lo))
}

/// The half profile `(0, R)` of a symmetric forcing with its split point.
#[derive(Debug, Clone)]
pub struct HalfProfile {
    centre: f64,
    big_r: f64,
    r0: f64,
    f_minus: PiecewiseForcing,
    /// `∫_0^{r0} f⁺`.
    positive_mass: f64,
}

impl HalfProfile {
    /// Splits a symmetric forcing; `r0` is inferred from the sign structure when `None`.
    pub fn new(f: &PiecewiseForcing, r0: Option<f64>) -> Result<Self> {
        if !f.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let centre = f.center();
        let big_r = 0.5 * f.length();
        let half = f.restricted(centre, f.domain().1)?.mapped(-centre, 1.0)?;
        let half = half.refined_by_sign();
        let has_negative = half.pieces().iter().any(|p| p.sign() == Sign::Negative);
        let r0 = match r0 {
            Some(r0) => {
                if !(r0 > 0.0 && r0 < big_r) {
                    return Err(Error::InvalidParameter("r0 must lie in (0, R)"));
                }
                r0
            }
            None => infer_r0(&half, big_r, has_negative)?,
        };
        for p in half.pieces() {
            match p.sign() {
                Sign::Negative if p.lo() < r0 => {
                    return Err(Error::SignStructureViolation { location: centre + p.lo() });
                }
                Sign::Positive if has_negative && p.hi() > r0 => {
                    return Err(Error::SignStructureViolation { location: centre + p.hi().min(r0.max(p.lo())) });
                }
                _ => {}
            }
        }
        let positive_mass = half.positive_part().integrate(0.0, r0)?;
        Ok(HalfProfile { centre, big_r, r0, f_minus: half.negative_part(), positive_mass })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn centre(&self) -> f64 {
        self.centre
    }

    pub fn positive_mass(&self) -> f64 {
        self.positive_mass
    }

    /// `∫_{r0}^R f⁻`; errors for non-integrable singularities.
    pub fn negative_mass(&self) -> Result<f64> {
        self.f_minus.integrate(self.r0, self.big_r)
    }

    /// Sides of the balance inequality: `(R - r0) ∫f⁺` and `∫ f⁻ (R - s)`.
    pub fn balance_sides(&self) -> Result<(f64, f64)> {
        let lhs = (self.big_r - self.r0) * self.positive_mass;
        let rhs = self
            .f_minus
            .weighted_integral(Weight::LinearTent { apex: self.big_r }, self.r0, self.big_r)?;
        Ok((lhs, rhs))
    }

    /// `D(r) = (R - r) ∫_0^{r0} f⁺ - ∫_r^R ∫_{r0}^t f⁻`, which equals `u` on `(r0, R)`.
    pub fn decay_function(&self, r: f64) -> Result<f64> {
        let (d, _) = self.decay_parts(r)?;
        Ok(d)
    }

    /// `(D(r), scale)` with `scale` the sum of the magnitudes of both terms.
    fn decay_parts(&self, r: f64) -> Result<(f64, f64)> {
        let first = (self.big_r - r) * self.positive_mass;
        let tail = double_tail_integral(&self.f_minus, self.r0, r, self.big_r)?;
        Ok((first - tail, first + tail))
    }

    /// Minimiser of the convex function `D` when it is interior, from `D' = -P + ∫_{r0}^r f⁻`.
    fn decay_minimiser(&self) -> Result<Option<f64>> {
        let (r0, big_r) = (self.r0, self.big_r);
        let p = self.positive_mass;
        let total = self.f_minus.integrate(r0, big_r);
        let exceeds = match total {
            // equality puts the minimiser at R itself, where D vanishes identically
            Ok(t) => t > p * (1.0 + REL_TOL),
            Err(Error::NonIntegrableSingularity { .. }) => true,
            Err(e) => return Err(e),
        };
        if !exceeds {
            return Ok(None);
        }
        let (mut a, mut b) = (r0, big_r);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.f_minus.integrate(r0, m)? > p {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(Some(0.5 * (a + b)))
    }
}

fn infer_r0(half: &PiecewiseForcing, big_r: f64, has_negative: bool) -> Result<f64> {
    let positive: Vec<_> = half.pieces().iter().filter(|p| p.sign() == Sign::Positive).collect();
    let (Some(first), Some(last)) = (positive.first(), positive.last()) else {
        return Err(Error::SignStructureViolation { location: 0.0 });
    };
    if has_negative {
        Ok(last.hi())
    } else {
        // no negative part: any split inside the positive support will do
        Ok(0.5 * (first.lo() + big_r))
    }
}

/// A location where a condition is tightest, with its relative margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub condition: &'static str,
    pub location: f64,
    pub margin: f64,
}

/// Verdicts for the one-dimensional positivity and flatness conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub r0: f64,
    pub balance: Verdict,
    pub decay: Verdict,
    /// `None` when balance or decay fails, making flatness meaningless.
    pub flatness: Option<Verdict>,
    /// `∫ f δ > 0`.
    pub weighted_positivity: Verdict,
    /// `u'(R)`; `None` when `f ∉ L¹`.
    pub boundary_derivative: Option<f64>,
    pub witnesses: Vec<Witness>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.balance.holds() && self.decay.holds()
    }
}

/// Balance: `(R - r0) ∫_0^{r0} f⁺ > ∫_{r0}^R f⁻ (R - s) ds`.
pub fn check_balance(f: &PiecewiseForcing, r0: Option<f64>) -> Result<(Verdict, Witness)> {
    let profile = HalfProfile::new(f, r0)?;
    balance_of(&profile)
}

fn balance_of(profile: &HalfProfile) -> Result<(Verdict, Witness)> {
    let (lhs, rhs) = profile.balance_sides()?;
    let (verdict, margin) = Verdict::strict(lhs, rhs);
    let location = profile.centre + profile.r0;
    Ok((verdict, Witness { condition: "balance", location, margin }))
}

/// Decay: `D(r) > 0` on `(r0, R)`, probed at Chebyshev points, at the `r0`
/// limit and at the exact minimiser of `D`. The witness is the worst point.
pub fn check_decay(f: &PiecewiseForcing, r0: Option<f64>, probe_count: usize) -> Result<(Verdict, Witness)> {
    let profile = HalfProfile::new(f, r0)?;
    decay_of(&profile, probe_count)
}

fn decay_of(profile: &HalfProfile, probe_count: usize) -> Result<(Verdict, Witness)> {
    let (r0, big_r) = (profile.r0, profile.big_r);
    let n = probe_count.max(1);
    let mut worst = (f64::INFINITY, r0);
    let mut consider = |r: f64| -> Result<()> {
        let (d, scale) = profile.decay_parts(r)?;
        let margin = relative_margin(d, scale);
        if margin < worst.0 {
            worst = (margin, r);
        }
        Ok(())
    };
    consider(r0)?;
    for k in 0..n {
        let t = (1.0 - ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos()) / 2.0;
        let r = r0 + (big_r - r0) * t;
        if r < big_r {
            consider(r)?;
        }
    }
    if let Some(r_star) = profile.decay_minimiser()? {
        if r_star < big_r {
            consider(r_star)?;
        }
    }
    let (margin, r) = worst;
    Ok((
        Verdict::from_margin(margin),
        Witness { condition: "decay", location: profile.centre + r, margin },
    ))
}

/// Flatness: `∫_0^{r0} f⁺ = ∫_{r0}^R f⁻`. Requires balance and decay not to fail.
pub fn check_flatness(f: &PiecewiseForcing, r0: Option<f64>) -> Result<(Verdict, Witness)> {
    let profile = HalfProfile::new(f, r0)?;
    if balance_of(&profile)?.0 == Verdict::Fails || decay_of(&profile, DECAY_PROBES)?.0 == Verdict::Fails {
        return Err(Error::PrerequisiteFailed("flatness needs balance and decay"));
    }
    flatness_of(&profile)
}

fn flatness_of(profile: &HalfProfile) -> Result<(Verdict, Witness)> {
    let p = profile.positive_mass;
    let m = profile.negative_mass()?;
    let margin = relative_margin((p - m).abs(), p.abs().max(m.abs()));
    let verdict = if margin <= REL_TOL { Verdict::Holds } else { Verdict::Fails };
    let location = profile.centre + profile.big_r;
    Ok((verdict, Witness { condition: "flatness", location, margin }))
}

/// Runs every one-dimensional condition on a symmetric forcing.
pub fn check_conditions(f: &PiecewiseForcing, r0: Option<f64>, probe_count: usize) -> Result<ConditionReport> {
    let profile = HalfProfile::new(f, r0)?;
    let (balance, wb) = balance_of(&profile)?;
    let (decay, wd) = decay_of(&profile, probe_count)?;
    let mut witnesses = alloc::vec![wb, wd];
    let flatness = if balance != Verdict::Fails && decay != Verdict::Fails {
        match flatness_of(&profile) {
            Ok((v, w)) => {
                witnesses.push(w);
                Some(v)
            }
            Err(Error::NonIntegrableSingularity { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (lo, hi) = f.domain();
    let plus = f.positive_part().weighted_integral(Weight::DistanceToBoundary, lo, hi)?;
    let minus = f.negative_part().weighted_integral(Weight::DistanceToBoundary, lo, hi)?;
    let (weighted_positivity, wm) = Verdict::strict(plus, minus);
    witnesses.push(Witness { condition: "weighted_positivity", location: f.center(), margin: wm });
    let boundary_derivative = match boundary_derivative(f) {
        Ok(d) => Some(d),
        Err(Error::NonIntegrableSingularity { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ConditionReport { r0: profile.r0, balance, decay, flatness, weighted_positivity, boundary_derivative, witnesses })
}

/// Qualitative shape of a solution.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    StrictlyPositive,
    PositiveFlat,
    DeadCore(Vec<(f64, f64)>),
    SignChanging(Vec<(f64, f64)>),
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::StrictlyPositive => "strictly-positive",
            Shape::PositiveFlat => "positive-flat",
            Shape::DeadCore(_) => "dead-core",
            Shape::SignChanging(_) => "sign-changing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub shape: Shape,
    pub min_value: f64,
    /// `(u'(lo), u'(hi))`.
    pub boundary_slopes: (f64, f64),
    /// False when the slopes are difference quotients next to a singularity.
    pub slopes_exact: bool,
}

const ZERO_TOL: f64 = 1e-10;

/// Classifies the exact solution using `grid_n` uniform nodes plus breakpoints
/// and critical points, so the recorded minimum is the true minimum.
pub fn classify(f: &PiecewiseForcing, grid_n: usize) -> Result<Classification> {
    let sol = solve_exact(f)?;
    let (lo, hi) = f.domain();
    let l = hi - lo;
    let refined = f.refined_by_sign();

    let mut pts: Vec<f64> = refined.breakpoints();
    let n = grid_n.max(2);
    pts.extend((1..n).map(|i| lo + l * i as f64 / n as f64));
    for piece in refined.pieces() {
        if let Some(c) = critical_point(&sol, piece.lo(), piece.hi())? {
            pts.push(c);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    pts.dedup();
    let vals: Vec<f64> = pts.iter().map(|x| sol.value(*x)).collect::<Result<_>>()?;

    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (sl, sr, slopes_exact) = sol.boundary_slopes();
    let interior = &vals[1..vals.len() - 1];
    let min_value = interior.iter().cloned().fold(f64::INFINITY, f64::min);
    if scale == 0.0 {
        return Ok(Classification { shape: Shape::DeadCore(alloc::vec![(lo, hi)]), min_value: 0.0, boundary_slopes: (sl, sr), slopes_exact });
    }
    let flat_tol = 1e-8 * scale;
    let slope_tol = 1e-6 * scale / l;

    // Maximal runs where u < 0 that dip below -flat_tol.
    let mut negative = Vec::new();
    let mut i = 1;
    while i + 1 < pts.len() {
        if vals[i] < 0.0 {
            let start = i;
            let mut deepest = vals[i];
            while i + 1 < pts.len() && vals[i] < 0.0 {
                deepest = deepest.min(vals[i]);
                i += 1;
            }
            if deepest < -flat_tol {
                let a = zero_crossing(&sol, pts[start - 1], pts[start])?;
                let b = zero_crossing(&sol, pts[i - 1], pts[i])?;
                negative.push((a, b));
            }
        } else {
            i += 1;
        }
    }
    if !negative.is_empty() {
        return Ok(Classification { shape: Shape::SignChanging(negative), min_value, boundary_slopes: (sl, sr), slopes_exact });
    }

    // u is linear on zero-forcing pieces, so checking both ends is exact.
    let mut cores: Vec<(f64, f64)> = Vec::new();
    for piece in refined.pieces() {
        if piece.sign() != Sign::Zero {
            continue;
        }
        let (a, b) = (piece.lo(), piece.hi());
        if sol.value(a)?.abs() <= flat_tol && sol.value(b)?.abs() <= flat_tol {
            match cores.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => cores.push((a, b)),
            }
        }
    }
    if !cores.is_empty() {
        return Ok(Classification { shape: Shape::DeadCore(cores), min_value, boundary_slopes: (sl, sr), slopes_exact });
    }

    let flat_side = sl.abs() <= slope_tol || sr.abs() <= slope_tol;
    let touches_zero = min_value <= flat_tol;
    let shape = if flat_side || touches_zero { Shape::PositiveFlat } else { Shape::StrictlyPositive };
    Ok(Classification { shape, min_value, boundary_slopes: (sl, sr), slopes_exact })
}

/// Interior zero of `u'` on a piece where `f` keeps one sign, if any.
fn critical_point(sol: &Solution1D, a: f64, b: f64) -> Result<Option<f64>> {
    let d = |x: f64| -> Result<f64> {
        match sol.derivative(x) {
            Err(Error::NonIntegrableSingularity { .. }) => {
                // pull away from the pole
                let inner = if x == a { a + (b - a) * 1e-12 } else { b - (b - a) * 1e-12 };
                sol.derivative(inner)
            }
            other => other,
        }
    };
    let (da, db) = (d(a)?, d(b)?);
    if da == 0.0 || db == 0.0 || (da < 0.0) == (db < 0.0) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let dm = d(m)?;
        if (dm < 0.0) == (da < 0.0) {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Zero of `u` between `a` and `b` (opposite signs or a zero endpoint), to `ZERO_TOL`.
fn zero_crossing(sol: &Solution1D, a: f64, b: f64) -> Result<f64> {
    let (ua, ub) = (sol.value(a)?, sol.value(b)?);
    if ua == 0.0 {
        return Ok(a);
    }
    if ub == 0.0 {
        return Ok(b);
    }
    let (mut lo, mut hi) = (a, b);
    let neg_lo = ua < 0.0;
    while hi - lo > ZERO_TOL * 0.5 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if (sol.value(m)? < 0.0) == neg_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which end of the domain a slope is read at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Scalar functionals of a solution used in parameter searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    ValueAt(f64),
    DerivativeAt(f64),
    BoundarySlope(Side),
}

impl Functional {
    pub fn evaluate(&self, f: &PiecewiseForcing) -> Result<f64> {
        let sol = solve_exact(f)?;
        match *self {
            Functional::ValueAt(x) => sol.value(x),
            Functional::DerivativeAt(x) => sol.derivative(x),
            Functional::BoundarySlope(side) => {
                let (lo, hi) = f.domain();
                sol.derivative(if side == Side::Left { lo } else { hi })
            }
        }
    }
}

/// Parameter at which `functional(family(p)) = target`, by bisection to `tol`.
///
/// Monotonicity over the bracket is checked on 17 samples first.
pub fn find_critical_parameter<F>(
    family: F,
    functional: Functional,
    target: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<PiecewiseForcing>,
{
    let (mut a, mut b) = bracket;
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::InvalidParameter("need bracket lo < hi and tol > 0"));
    }
    let g = |p: f64| -> Result<f64> { Ok(functional.evaluate(&family(p)?)? - target) };
    let (ga, gb) = (g(a)?, g(b)?);
    if ga * gb > 0.0 {
        return Err(Error::NoSignChange { lo_value: ga + target, hi_value: gb + target });
    }
    const SAMPLES: usize = 16;
    let mut prev = ga;
    let increasing = gb > ga;
    for k in 1..=SAMPLES {
        let p = a + (b - a) * k as f64 / SAMPLES as f64;
        let v = if k == SAMPLES { gb } else { g(p)? };
        let scale = v.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        if (increasing && v < prev - 1e-12 * scale) || (!increasing && v > prev + 1e-12 * scale) {
            return Err(Error::NotMonotone);
        }
        prev = v;
    }
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    let neg_a = ga < 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == neg_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// A flat solution padded by zero onto a larger symmetric domain.
#[derive(Debug, Clone)]
pub struct ZeroExtension {
    pub forcing: PiecewiseForcing,
    pub solution: Solution1D,
    /// Sup-norm gap between the padded `u` and the solve of the padded forcing.
    pub sup_difference: f64,
}

/// Pads `f` and `u` by zero onto `(c - R_big, c + R_big)` and certifies the result.
pub fn extend_by_zero(f: &PiecewiseForcing, u: &Solution1D, big_r: f64) -> Result<ZeroExtension> {
    let (verdict, w) = check_flatness(f, None)?;
    if verdict != Verdict::Holds {
        return Err(Error::NotFlat { integral: f.total_mass().unwrap_or(w.margin) });
    }
    let c = f.center();
    let r = 0.5 * f.length();
    if !(big_r > r) {
        return Err(Error::InvalidParameter("extension radius must exceed the original"));
    }
    let padded = f.zero_extended((c - big_r, c + big_r))?;
    let sol = solve_exact(&padded)?;
    let (lo, hi) = f.domain();
    const CHECK_POINTS: usize = 2048;
    let mut sup: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..=CHECK_POINTS {
        let x = c - big_r + 2.0 * big_r * i as f64 / CHECK_POINTS as f64;
        let padded_u = if x > lo && x < hi { u.value(x)? } else { 0.0 };
        let v = sol.value(x)?;
        sup = sup.max((v - padded_u).abs());
        scale = scale.max(padded_u.abs());
    }
    if sup > 1e-10 * scale.max(1.0) {
        return Err(Error::NotFlat { integral: f.total_mass()? });
    }
    Ok(ZeroExtension { forcing: padded, solution: sol, sup_difference: sup })
}

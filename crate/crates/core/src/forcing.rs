//! Piecewise forcing terms with exact antiderivatives.
//!
//! Every integral the positivity conditions need is a *moment*
//! `∫_a^b f(y) (y - c)^k dy`, evaluated in closed form per piece. Three piece
//! kinds cover all the model problems: constants, polynomials and
//! boundary power singularities `-C |x - pole|^(-beta)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative tolerance used when matching piece endpoints.
const JOIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    Constant(f64),
    /// Coefficients in ascending powers of `x`.
    Polynomial(Vec<f64>),
    /// `x ↦ -coeff · |x - pole|^(-beta)`, pole outside the open piece.
    PowerSingularity { coeff: f64, beta: f64, pole: f64 },
}

/// Sign of a piece on its open interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingPiece {
    lo: f64,
    hi: f64,
    kind: PieceKind,
}

impl ForcingPiece {
    pub fn new(lo: f64, hi: f64, kind: PieceKind) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidForcing("piece needs finite lo < hi"));
        }
        match &kind {
            PieceKind::Constant(c) if !c.is_finite() => {
                return Err(Error::InvalidForcing("non-finite constant"))
            }
            PieceKind::Polynomial(coeffs) if coeffs.iter().any(|c| !c.is_finite()) => {
                return Err(Error::InvalidForcing("non-finite polynomial coefficient"))
            }
            PieceKind::PowerSingularity { coeff, beta, pole } => {
                if !(coeff.is_finite() && beta.is_finite() && pole.is_finite()) {
                    return Err(Error::InvalidForcing("non-finite singularity parameters"));
                }
                if *pole > lo && *pole < hi {
                    return Err(Error::InvalidForcing("singularity pole inside its piece"));
                }
            }
            _ => {}
        }
        Ok(ForcingPiece { lo, hi, kind })
    }

    pub fn constant(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Self::new(lo, hi, PieceKind::Constant(value))
    }

    pub fn polynomial(lo: f64, hi: f64, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(lo, hi, PieceKind::Polynomial(coeffs))
    }

    pub fn power_singularity(lo: f64, hi: f64, coeff: f64, beta: f64, pole: f64) -> Result<Self> {
        Self::new(lo, hi, PieceKind::PowerSingularity { coeff, beta, pole })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn kind(&self) -> &PieceKind {
        &self.kind
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PieceKind::Constant(c) => *c,
            PieceKind::Polynomial(p) => poly_eval(p, x),
            PieceKind::PowerSingularity { coeff, beta, pole } => {
                -coeff * (x - pole).abs().powf(-beta)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PieceKind::Constant(c) => *c == 0.0,
            PieceKind::Polynomial(p) => p.iter().all(|c| *c == 0.0),
            PieceKind::PowerSingularity { coeff, .. } => *coeff == 0.0,
        }
    }

    /// True if the pole sits on one of this piece's endpoints.
    pub fn touches_pole(&self) -> Option<(f64, f64)> {
        match self.kind {
            PieceKind::PowerSingularity { beta, pole, coeff } if coeff != 0.0 && beta > 0.0 => {
                if pole == self.lo || pole == self.hi {
                    Some((pole, beta))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// `∫_a^b f(y) (y - c)^k dy` for `lo <= a <= b <= hi`.
    pub fn moment(&self, a: f64, b: f64, c: f64, k: u32) -> Result<f64> {
        debug_assert!(a >= self.lo - JOIN_TOL * (self.hi - self.lo).abs().max(1.0));
        debug_assert!(b <= self.hi + JOIN_TOL * (self.hi - self.lo).abs().max(1.0));
        if a == b {
            return Ok(0.0);
        }
        match &self.kind {
            PieceKind::Constant(v) => Ok(v * monomial_integral(a - c, b - c, k)),
            PieceKind::Polynomial(p) => {
                let q = taylor_shift(p, c);
                let (ta, tb) = (a - c, b - c);
                Ok(q
                    .iter()
                    .enumerate()
                    .map(|(j, qj)| qj * monomial_integral(ta, tb, j as u32 + k))
                    .sum())
            }
            PieceKind::PowerSingularity { coeff, beta, pole } => {
                if *coeff == 0.0 {
                    return Ok(0.0);
                }
                // s = |y - pole| grows away from the pole; y - c = (pole - c) + σ s
                let sigma = if *pole <= self.lo { 1.0 } else { -1.0 };
                let (sa, sb) = ((a - pole).abs(), (b - pole).abs());
                let (smin, smax) = if sa < sb { (sa, sb) } else { (sb, sa) };
                let offset = pole - c;
                let mut total = 0.0;
                let mut binom = 1.0;
                for j in 0..=k {
                    if offset == 0.0 && j < k {
                        binom = binom * (k - j) as f64 / (j + 1) as f64;
                        continue;
                    }
                    let gamma = j as f64 - beta;
                    let s_int = power_integral(smin, smax, gamma)
                        .ok_or(Error::NonIntegrableSingularity { pole: *pole, beta: *beta })?;
                    let sign = if j % 2 == 1 { sigma } else { 1.0 };
                    total += binom * offset.powi((k - j) as i32) * sign * s_int;
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
                Ok(-coeff * total)
            }
        }
    }

    /// `∫_a^b f(y) sin(omega (y - origin)) dy`, closed form for polynomial pieces.
    fn sine_moment(&self, a: f64, b: f64, omega: f64, origin: f64) -> Result<f64> {
        let p = match &self.kind {
            PieceKind::Constant(v) => vec![*v],
            PieceKind::Polynomial(p) => p.clone(),
            PieceKind::PowerSingularity { coeff, .. } => {
                if *coeff == 0.0 {
                    return Ok(0.0);
                }
                return Err(Error::UnsupportedWeight);
            }
        };
        Ok(poly_sine_antiderivative(&p, b, omega, origin)
            - poly_sine_antiderivative(&p, a, omega, origin))
    }

    pub(crate) fn sign(&self) -> Sign {
        match &self.kind {
            PieceKind::Constant(c) => sign_of(*c),
            PieceKind::PowerSingularity { coeff, .. } => sign_of(-*coeff),
            PieceKind::Polynomial(p) => {
                if p.iter().all(|c| *c == 0.0) {
                    return Sign::Zero;
                }
                let roots = poly_roots_in(p, self.lo, self.hi);
                if roots.is_empty() {
                    sign_of(poly_eval(p, 0.5 * (self.lo + self.hi)))
                } else {
                    Sign::Mixed
                }
            }
        }
    }

    fn restricted(&self, lo: f64, hi: f64) -> ForcingPiece {
        ForcingPiece { lo, hi, kind: self.kind.clone() }
    }

    fn scaled(&self, factor: f64) -> ForcingPiece {
        let kind = match &self.kind {
            PieceKind::Constant(c) => PieceKind::Constant(c * factor),
            PieceKind::Polynomial(p) => PieceKind::Polynomial(p.iter().map(|c| c * factor).collect()),
            PieceKind::PowerSingularity { coeff, beta, pole } => {
                PieceKind::PowerSingularity { coeff: coeff * factor, beta: *beta, pole: *pole }
            }
        };
        ForcingPiece { lo: self.lo, hi: self.hi, kind }
    }

    /// Image under `x ↦ shift + stretch·x` (stretch ≠ 0), preserving values.
    fn mapped(&self, shift: f64, stretch: f64) -> ForcingPiece {
        let (a, b) = (shift + stretch * self.lo, shift + stretch * self.hi);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let kind = match &self.kind {
            PieceKind::Constant(c) => PieceKind::Constant(*c),
            // new(x) = old((x - shift)/stretch)
            PieceKind::Polynomial(p) => {
                PieceKind::Polynomial(compose_affine(p, -shift / stretch, 1.0 / stretch))
            }
            PieceKind::PowerSingularity { coeff, beta, pole } => PieceKind::PowerSingularity {
                coeff: coeff * stretch.abs().powf(*beta),
                beta: *beta,
                pole: shift + stretch * pole,
            },
        };
        ForcingPiece { lo, hi, kind }
    }

    fn positive_part(&self) -> ForcingPiece {
        match self.sign() {
            Sign::Positive => self.clone(),
            _ => self.restricted(self.lo, self.hi).scaled(0.0).zeroed(),
        }
    }

    fn negative_part(&self) -> ForcingPiece {
        match self.sign() {
            Sign::Negative => self.scaled(-1.0),
            _ => self.zeroed(),
        }
    }

    fn zeroed(&self) -> ForcingPiece {
        ForcingPiece { lo: self.lo, hi: self.hi, kind: PieceKind::Constant(0.0) }
    }
}

/// Weights for [`PiecewiseForcing::weighted_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// `δ(y) = min(y - lo, hi - y)` over the forcing's own domain.
    DistanceToBoundary,
    /// `apex - y`.
    LinearTent { apex: f64 },
    /// `sin(π (y - lo) / L)`, the first Dirichlet eigenfunction of the domain.
    FirstEigenfunction,
}

/// A forcing term on `(x_lo, x_hi)`: contiguous, non-overlapping pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseForcing {
    domain: (f64, f64),
    pieces: Vec<ForcingPiece>,
}

impl PiecewiseForcing {
    /// Builds a forcing from pieces in any order. An empty list means `f ≡ 0`.
    pub fn new(domain: (f64, f64), mut pieces: Vec<ForcingPiece>) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidForcing("domain needs finite lo < hi"));
        }
        if pieces.is_empty() {
            pieces.push(ForcingPiece::constant(lo, hi, 0.0)?);
        }
        pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(core::cmp::Ordering::Equal));
        let tol = JOIN_TOL * (hi - lo).max(1.0);
        if (pieces[0].lo - lo).abs() > tol {
            return Err(Error::InvalidForcing("pieces do not start at the domain's left end"));
        }
        pieces[0].lo = lo;
        for i in 1..pieces.len() {
            let prev_hi = pieces[i - 1].hi;
            if (pieces[i].lo - prev_hi).abs() > tol {
                return Err(Error::InvalidForcing("pieces overlap or leave a gap"));
            }
            pieces[i].lo = prev_hi;
            if pieces[i].lo >= pieces[i].hi {
                return Err(Error::InvalidForcing("degenerate piece after joining"));
            }
        }
        let last = pieces.len() - 1;
        if (pieces[last].hi - hi).abs() > tol {
            return Err(Error::InvalidForcing("pieces do not reach the domain's right end"));
        }
        pieces[last].hi = hi;
        Ok(PiecewiseForcing { domain, pieces })
    }

    pub fn zero(domain: (f64, f64)) -> Result<Self> {
        Self::new(domain, Vec::new())
    }

    /// Piecewise constant forcing from breakpoints `b_0 < … < b_n` and `n` values.
    pub fn piecewise_constant(breaks: &[f64], values: &[f64]) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidForcing("need one more breakpoint than values"));
        }
        let pieces = values
            .iter()
            .enumerate()
            .map(|(i, v)| ForcingPiece::constant(breaks[i], breaks[i + 1], *v))
            .collect::<Result<Vec<_>>>()?;
        Self::new((breaks[0], breaks[breaks.len() - 1]), pieces)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.domain.0 + self.domain.1)
    }

    pub fn pieces(&self) -> &[ForcingPiece] {
        &self.pieces
    }

    /// Interior piece boundaries followed by the two domain ends, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        pts.push(self.domain.1);
        pts
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain;
        if x < lo || x > hi || x.is_nan() {
            return None;
        }
        let idx = self.pieces.partition_point(|p| p.hi <= x);
        Some(idx.min(self.pieces.len() - 1))
    }

    /// Pointwise value; at an interior breakpoint the right-hand piece wins.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let idx = self.piece_index(x).ok_or(Error::OutOfDomain { x })?;
        Ok(self.pieces[idx].eval(x))
    }

    fn check_range(&self, a: f64, b: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        let tol = JOIN_TOL * (hi - lo).max(1.0);
        for x in [a, b] {
            if !(x >= lo - tol && x <= hi + tol) {
                return Err(Error::OutOfDomain { x });
            }
        }
        Ok(())
    }

    /// `∫_a^b f(y) (y - c)^k dy`, exact per piece.
    pub fn moment(&self, a: f64, b: f64, c: f64, k: u32) -> Result<f64> {
        if a > b {
            return self.moment(b, a, c, k).map(|v| -v);
        }
        self.check_range(a, b)?;
        let (a, b) = (a.max(self.domain.0), b.min(self.domain.1));
        let mut total = 0.0;
        for piece in &self.pieces {
            let (pa, pb) = (a.max(piece.lo), b.min(piece.hi));
            if pa < pb {
                total += piece.moment(pa, pb, c, k)?;
            }
        }
        Ok(total)
    }

    /// Exact `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        self.moment(a, b, 0.0, 0)
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.integrate(self.domain.0, self.domain.1)
    }

    /// `∫ |f|` over the whole domain.
    pub fn absolute_mass(&self) -> Result<f64> {
        let refined = self.refined_by_sign();
        let mut total = 0.0;
        for piece in &refined.pieces {
            total += piece.moment(piece.lo, piece.hi, 0.0, 0)?.abs();
        }
        Ok(total)
    }

    /// Exact `∫_a^b f · w`.
    pub fn weighted_integral(&self, weight: Weight, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return self.weighted_integral(weight, b, a).map(|v| -v);
        }
        self.check_range(a, b)?;
        let (lo, hi) = self.domain;
        match weight {
            Weight::DistanceToBoundary => {
                let mid = self.center();
                let mut total = 0.0;
                if a < mid {
                    total += self.moment(a, b.min(mid), lo, 1)?;
                }
                if b > mid {
                    total -= self.moment(a.max(mid), b, hi, 1)?;
                }
                Ok(total)
            }
            Weight::LinearTent { apex } => Ok(-self.moment(a, b, apex, 1)?),
            Weight::FirstEigenfunction => {
                let omega = PI / (hi - lo);
                let mut total = 0.0;
                for piece in &self.pieces {
                    let (pa, pb) = (a.max(piece.lo), b.min(piece.hi));
                    if pa < pb {
                        total += piece.sine_moment(pa, pb, omega, lo)?;
                    }
                }
                Ok(total)
            }
        }
    }

    /// Same forcing with every polynomial piece split at its sign changes.
    pub fn refined_by_sign(&self) -> PiecewiseForcing {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            match &piece.kind {
                PieceKind::Polynomial(p) => {
                    let mut cuts = poly_roots_in(p, piece.lo, piece.hi);
                    cuts.retain(|r| *r > piece.lo && *r < piece.hi);
                    let mut start = piece.lo;
                    for r in cuts {
                        if r > start {
                            pieces.push(piece.restricted(start, r));
                            start = r;
                        }
                    }
                    pieces.push(piece.restricted(start, piece.hi));
                }
                _ => pieces.push(piece.clone()),
            }
        }
        PiecewiseForcing { domain: self.domain, pieces }
    }

    /// `f⁺ = max(f, 0)` on the sign-refined partition.
    pub fn positive_part(&self) -> PiecewiseForcing {
        let refined = self.refined_by_sign();
        let pieces = refined.pieces.iter().map(ForcingPiece::positive_part).collect();
        PiecewiseForcing { domain: self.domain, pieces }
    }

    /// `f⁻ = max(-f, 0)` on the sign-refined partition, so `f = f⁺ - f⁻`.
    pub fn negative_part(&self) -> PiecewiseForcing {
        let refined = self.refined_by_sign();
        let pieces = refined.pieces.iter().map(ForcingPiece::negative_part).collect();
        PiecewiseForcing { domain: self.domain, pieces }
    }

    pub fn scaled(&self, factor: f64) -> PiecewiseForcing {
        PiecewiseForcing {
            domain: self.domain,
            pieces: self.pieces.iter().map(|p| p.scaled(factor)).collect(),
        }
    }

    /// Values transported by `x ↦ shift + stretch·x`.
    pub fn mapped(&self, shift: f64, stretch: f64) -> Result<PiecewiseForcing> {
        if stretch == 0.0 || !stretch.is_finite() {
            return Err(Error::InvalidParameter("stretch must be finite and nonzero"));
        }
        let (a, b) = (shift + stretch * self.domain.0, shift + stretch * self.domain.1);
        let domain = if a < b { (a, b) } else { (b, a) };
        PiecewiseForcing::new(domain, self.pieces.iter().map(|p| p.mapped(shift, stretch)).collect())
    }

    /// Restriction to a sub-interval `[a, b]` of the domain.
    pub fn restricted(&self, a: f64, b: f64) -> Result<PiecewiseForcing> {
        self.check_range(a, b)?;
        if a >= b {
            return Err(Error::InvalidForcing("empty restriction"));
        }
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.hi > a && p.lo < b)
            .map(|p| p.restricted(p.lo.max(a), p.hi.min(b)))
            .collect();
        PiecewiseForcing::new((a, b), pieces)
    }

    /// Zero padding onto a larger domain.
    pub fn zero_extended(&self, domain: (f64, f64)) -> Result<PiecewiseForcing> {
        let (lo, hi) = self.domain;
        if domain.0 > lo || domain.1 < hi {
            return Err(Error::InvalidParameter("extension domain must contain the original"));
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() + 2);
        if domain.0 < lo {
            pieces.push(ForcingPiece::constant(domain.0, lo, 0.0)?);
        }
        pieces.extend(self.pieces.iter().cloned());
        if domain.1 > hi {
            pieces.push(ForcingPiece::constant(hi, domain.1, 0.0)?);
        }
        PiecewiseForcing::new(domain, pieces)
    }

    /// Symmetry about the domain centre, checked on the partition and by sampling.
    pub fn is_symmetric(&self) -> bool {
        let c = self.center();
        let tol = 1e-10 * self.length().max(1.0);
        let bps = self.breakpoints();
        let n = bps.len();
        for i in 0..n {
            if (bps[i] - c) + (bps[n - 1 - i] - c) > tol || (bps[i] - c) + (bps[n - 1 - i] - c) < -tol {
                return false;
            }
        }
        for piece in &self.pieces {
            for j in 1..8 {
                let x = piece.lo + (piece.hi - piece.lo) * j as f64 / 8.0;
                let xm = 2.0 * c - x;
                let (Ok(v), Ok(vm)) = (self.eval(x), self.eval(xm)) else {
                    return false;
                };
                if (v - vm).abs() > 1e-10 * v.abs().max(vm.abs()).max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    /// Fails with `NonIntegrableSingularity` unless `∫ |f| δ < ∞`.
    pub fn check_distance_integrable(&self) -> Result<()> {
        for piece in &self.pieces {
            if let Some((pole, beta)) = piece.touches_pole() {
                let on_boundary = pole == self.domain.0 || pole == self.domain.1;
                if !on_boundary || beta >= 2.0 {
                    return Err(Error::NonIntegrableSingularity { pole, beta });
                }
            }
        }
        Ok(())
    }

    /// Fails with `NonIntegrableSingularity` unless `f ∈ L¹`.
    pub fn check_integrable(&self) -> Result<()> {
        for piece in &self.pieces {
            if let Some((pole, beta)) = piece.touches_pole() {
                if beta >= 1.0 {
                    return Err(Error::NonIntegrableSingularity { pole, beta });
                }
            }
        }
        Ok(())
    }
}

/// `∫_r^R ∫_{r0}^t f⁻(s) ds dt`, computed as
/// `(R - r) ∫_{r0}^r f⁻ + ∫_r^R f⁻(s) (R - s) ds`.
pub fn double_tail_integral(f_minus: &PiecewiseForcing, r0: f64, r: f64, big_r: f64) -> Result<f64> {
    if !(r0 <= r && r <= big_r) {
        return Err(Error::InvalidParameter("need r0 <= r <= R"));
    }
    if r == big_r {
        return Ok(0.0);
    }
    let inner = f_minus.integrate(r0, r)?;
    let tail = -f_minus.moment(r, big_r, big_r, 1)?;
    Ok((big_r - r) * inner + tail)
}

fn sign_of(v: f64) -> Sign {
    if v > 0.0 {
        Sign::Positive
    } else if v < 0.0 {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

/// `∫_a^b t^k dt`.
fn monomial_integral(a: f64, b: f64, k: u32) -> f64 {
    let e = k as i32 + 1;
    (b.powi(e) - a.powi(e)) / e as f64
}

/// `∫_{smin}^{smax} s^gamma ds` for `0 <= smin <= smax`; `None` when divergent.
fn power_integral(smin: f64, smax: f64, gamma: f64) -> Option<f64> {
    if smin == smax {
        return Some(0.0);
    }
    if (gamma + 1.0).abs() < 1e-14 {
        if smin == 0.0 {
            return None;
        }
        return Some((smax / smin).ln());
    }
    let e = gamma + 1.0;
    if smin == 0.0 {
        if e < 0.0 {
            return None;
        }
        return Some(smax.powf(e) / e);
    }
    Some((smax.powf(e) - smin.powf(e)) / e)
}

pub(crate) fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

/// Coefficients of `t ↦ p(c + t)`.
fn taylor_shift(p: &[f64], c: f64) -> Vec<f64> {
    compose_affine(p, c, 1.0)
}

/// Coefficients of `x ↦ p(a + b x)`.
fn compose_affine(p: &[f64], a: f64, b: f64) -> Vec<f64> {
    // Horner with polynomial arithmetic
    let mut out: Vec<f64> = Vec::with_capacity(p.len());
    for &coef in p.iter().rev() {
        // out = out * (a + b x) + coef
        let mut next = vec![0.0; out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i] += o * a;
            next[i + 1] += o * b;
        }
        next[0] += coef;
        out = next;
    }
    if out.is_empty() {
        out.push(0.0);
    }
    out
}

/// Antiderivative of `p(y) sin(omega (y - origin))` evaluated at `y`,
/// from repeated integration by parts.
fn poly_sine_antiderivative(p: &[f64], y: f64, omega: f64, origin: f64) -> f64 {
    let theta = omega * (y - origin);
    let (s, c) = (theta.sin(), theta.cos());
    let mut deriv = p.to_vec();
    let mut total = 0.0;
    let mut sign = 1.0;
    let mut power = omega;
    while !deriv.is_empty() && deriv.iter().any(|v| *v != 0.0) {
        total += sign * (-poly_eval(&deriv, y) * c / power);
        deriv = poly_derivative(&deriv);
        if deriv.is_empty() {
            break;
        }
        total += sign * (poly_eval(&deriv, y) * s / (power * omega));
        deriv = poly_derivative(&deriv);
        sign = -sign;
        power *= omega * omega;
    }
    total
}

/// Sign-change roots of `p` strictly inside `(lo, hi)`.
pub(crate) fn poly_roots_in(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    const SAMPLES: usize = 128;
    let mut roots = Vec::new();
    let step = (hi - lo) / SAMPLES as f64;
    let scale = p.iter().fold(0.0_f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    let mut x0 = lo;
    let mut v0 = poly_eval(p, x0);
    for i in 1..=SAMPLES {
        let x1 = if i == SAMPLES { hi } else { lo + step * i as f64 };
        let v1 = poly_eval(p, x1);
        if v0 == 0.0 && x0 > lo && x0 < hi {
            // exact root on a sample point: only a cut if the sign changes across it
            let left = poly_eval(p, x0 - 0.25 * step);
            if left * v1 < 0.0 {
                roots.push(x0);
            }
        } else if v0 * v1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, v0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = poly_eval(p, m);
                if fm == 0.0 || fm.abs() < 1e-300 * scale {
                    a = m;
                    b = m;
                    break;
                }
                if (fa < 0.0) == (fm < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        v0 = v1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(a: f64) -> PiecewiseForcing {
        PiecewiseForcing::piecewise_constant(&[-a, -1.0, 1.0, a], &[-1.0, 1.0, -1.0]).unwrap()
    }

    #[test]
    fn zero_forcing_integrates_to_zero() {
        let f = PiecewiseForcing::zero((-1.0, 1.0)).unwrap();
        assert_eq!(f.integrate(-1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn example_forcing_half_mass_cancels() {
        let f = example1(2.0);
        assert!((f.integrate(0.0, 2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn inverse_square_root_singularity() {
        let p = ForcingPiece::power_singularity(0.0, 1.0, 1.0, 0.5, 1.0).unwrap();
        let f = PiecewiseForcing::new((0.0, 1.0), vec![p]).unwrap();
        assert!((f.integrate(0.0, 1.0).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_integrable_pole_is_rejected() {
        let p = ForcingPiece::power_singularity(0.0, 1.0, 1.0, 1.5, 1.0).unwrap();
        let f = PiecewiseForcing::new((0.0, 1.0), vec![p]).unwrap();
        assert!(matches!(f.integrate(0.0, 1.0), Err(Error::NonIntegrableSingularity { .. })));
        // away from the pole it is fine
        assert!(f.integrate(0.0, 0.9).is_ok());
        // weighted by the distance it converges for beta < 2
        assert!(f.weighted_integral(Weight::LinearTent { apex: 1.0 }, 0.5, 1.0).is_ok());
    }

    #[test]
    fn left_pole_mirrors_right_pole() {
        let right = ForcingPiece::power_singularity(0.5, 1.0, 0.7, 0.5, 1.0).unwrap();
        let left = ForcingPiece::power_singularity(-1.0, -0.5, 0.7, 0.5, -1.0).unwrap();
        for k in 0..3 {
            let r = right.moment(0.5, 1.0, 0.0, k).unwrap();
            let l = left.moment(-1.0, -0.5, 0.0, k).unwrap();
            let expect = if k % 2 == 0 { r } else { -r };
            assert!((l - expect).abs() < 1e-13, "k={k}: {l} vs {expect}");
        }
    }

    #[test]
    fn affine_sine_weight_matches_formula() {
        for a in [1.0, 2.0, 2.5, 3.0, 4.0] {
            let f = PiecewiseForcing::new(
                (0.0, 1.0),
                vec![ForcingPiece::polynomial(0.0, 1.0, vec![-1.0, a]).unwrap()],
            )
            .unwrap();
            let w = f.weighted_integral(Weight::FirstEigenfunction, 0.0, 1.0).unwrap();
            assert!((w - (a - 2.0) / PI).abs() < 1e-14, "a={a}: {w}");
        }
    }

    #[test]
    fn tent_weight_of_unit_forcing() {
        let f = PiecewiseForcing::piecewise_constant(&[0.0, 3.0], &[1.0]).unwrap();
        let w = f.weighted_integral(Weight::LinearTent { apex: 3.0 }, 0.0, 3.0).unwrap();
        assert!((w - 4.5).abs() < 1e-14);
    }

    #[test]
    fn distance_weight_of_unit_forcing() {
        let f = PiecewiseForcing::piecewise_constant(&[-1.0, 1.0], &[1.0]).unwrap();
        let w = f.weighted_integral(Weight::DistanceToBoundary, -1.0, 1.0).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_tail_constant_case() {
        let fm = PiecewiseForcing::piecewise_constant(&[1.0, 2.2], &[1.0]).unwrap();
        let v = double_tail_integral(&fm, 1.0, 2.1, 2.2).unwrap();
        assert!((v - 0.115).abs() < 1e-14, "{v}");
        let zero = PiecewiseForcing::zero((1.0, 2.2)).unwrap();
        assert_eq!(double_tail_integral(&zero, 1.0, 1.5, 2.2).unwrap(), 0.0);
        assert_eq!(double_tail_integral(&fm, 1.0, 2.2, 2.2).unwrap(), 0.0);
    }

    #[test]
    fn double_tail_power_law_closed_form() {
        // f⁻(s) = C (R - s)^(-α); closed form of the iterated integral
        let (c, alpha, r0, big_r) = (0.3, 0.5, 0.4, 1.0);
        let piece = ForcingPiece::power_singularity(r0, big_r, -c, alpha, big_r).unwrap();
        let fm = PiecewiseForcing::new((r0, big_r), vec![piece]).unwrap();
        for r in [0.4, 0.55, 0.8, 0.99, 0.999999] {
            let got = double_tail_integral(&fm, r0, r, big_r).unwrap();
            let expect = c * (big_r - r0).powf(1.0 - alpha) * (big_r - r) / (1.0 - alpha)
                - c * (big_r - r).powf(2.0 - alpha) / ((1.0 - alpha) * (2.0 - alpha));
            assert!((got - expect).abs() < 1e-14, "r={r}: {got} vs {expect}");
        }
    }

    #[test]
    fn sign_refinement_splits_polynomials() {
        let f = PiecewiseForcing::new(
            (0.0, 1.0),
            vec![ForcingPiece::polynomial(0.0, 1.0, vec![-1.0, 3.0]).unwrap()],
        )
        .unwrap();
        let r = f.refined_by_sign();
        assert_eq!(r.pieces().len(), 2);
        assert!((r.pieces()[0].hi() - 1.0 / 3.0).abs() < 1e-14);
        let plus = f.positive_part();
        let minus = f.negative_part();
        for x in [0.1, 0.2, 0.5, 0.9] {
            let diff = plus.eval(x).unwrap() - minus.eval(x).unwrap() - f.eval(x).unwrap();
            assert!(diff.abs() < 1e-15);
            assert!(minus.eval(x).unwrap() >= 0.0);
        }
    }

    #[test]
    fn mapping_rescales_singularities() {
        let p = ForcingPiece::power_singularity(0.0, 1.0, 2.0, 0.5, 1.0).unwrap();
        let f = PiecewiseForcing::new((0.0, 1.0), vec![p]).unwrap();
        let g = f.mapped(0.0, 2.0).unwrap();
        for x in [0.3, 1.0, 1.7] {
            assert!((g.eval(x).unwrap() - f.eval(x / 2.0).unwrap()).abs() < 1e-13);
        }
        let m = f.mapped(1.0, -1.0).unwrap();
        assert!((m.eval(0.25).unwrap() - f.eval(0.75).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn rejects_gaps() {
        let pieces = vec![
            ForcingPiece::constant(0.0, 1.0, 1.0).unwrap(),
            ForcingPiece::constant(1.1, 2.0, 1.0).unwrap(),
        ];
        assert!(PiecewiseForcing::new((0.0, 2.0), pieces).is_err());
    }

    #[test]
    fn symmetry_detection() {
        assert!(example1(2.2).is_symmetric());
        let skew = PiecewiseForcing::piecewise_constant(&[-1.0, 0.2, 1.0], &[1.0, -1.0]).unwrap();
        assert!(!skew.is_symmetric());
    }
}

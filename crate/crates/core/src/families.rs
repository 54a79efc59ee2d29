//! Model forcing families used throughout the tests, presets and figures.

use alloc::vec;

use crate::error::Result;
use crate::forcing::{ForcingPiece, PiecewiseForcing};

/// `1` on `(-1, 1)`, `-1` on `(-a, -1) ∪ (1, a)`; domain `(-a, a)`, `a >= 1`.
///
/// With `a = 1` this is `f ≡ 1` on `(-1, 1)`.
pub fn plateau(a: f64) -> Result<PiecewiseForcing> {
    if a == 1.0 {
        return PiecewiseForcing::piecewise_constant(&[-1.0, 1.0], &[1.0]);
    }
    PiecewiseForcing::piecewise_constant(&[-a, -1.0, 1.0, a], &[-1.0, 1.0, -1.0])
}

/// Sign-reversed plateau: negative core, positive shoulders.
pub fn reversed_plateau(a: f64) -> Result<PiecewiseForcing> {
    Ok(plateau(a)?.scaled(-1.0))
}

/// Reversed plateau pulled apart by a zero band `(-b, b)`; domain `(-a-b, a+b)`.
pub fn dead_band(a: f64, b: f64) -> Result<PiecewiseForcing> {
    if b == 0.0 {
        return reversed_plateau(a);
    }
    let (o, m) = (a + b, 1.0 + b);
    PiecewiseForcing::piecewise_constant(
        &[-o, -m, -b, b, m, o],
        &[1.0, -1.0, 0.0, -1.0, 1.0],
    )
}

/// `3(|x| - b) - 1` on `b < |x| < 1 + b`, zero on `(-b, b)`; solution `(|x|-b)²(1+b-|x|)/2`.
pub fn cubic_dead_core(b: f64) -> Result<PiecewiseForcing> {
    let m = 1.0 + b;
    let mut pieces = vec![ForcingPiece::polynomial(-m, -b, vec![-3.0 * b - 1.0, -3.0])?];
    if b > 0.0 {
        pieces.push(ForcingPiece::constant(-b, b, 0.0)?);
    }
    pieces.push(ForcingPiece::polynomial(b, m, vec![-3.0 * b - 1.0, 3.0])?);
    PiecewiseForcing::new((-m, m), pieces)
}

/// `a x - 1` on `(0, 1)`.
pub fn affine(a: f64) -> Result<PiecewiseForcing> {
    PiecewiseForcing::new((0.0, 1.0), vec![ForcingPiece::polynomial(0.0, 1.0, vec![-1.0, a])?])
}

/// `f = F` on `|x| < r0`, `f = -C (R - |x|)^(-beta)` on `r0 < |x| < R`.
pub fn power_law(big_r: f64, r0: f64, f_plus: f64, c: f64, beta: f64) -> Result<PiecewiseForcing> {
    PiecewiseForcing::new(
        (-big_r, big_r),
        vec![
            ForcingPiece::power_singularity(-big_r, -r0, c, beta, -big_r)?,
            ForcingPiece::constant(-r0, r0, f_plus)?,
            ForcingPiece::power_singularity(r0, big_r, c, beta, big_r)?,
        ],
    )
}

/// The plateau forcing rescaled from `(-a, a)` onto `(-1, 1)`, keeping its values.
pub fn plateau_unit(a: f64) -> Result<PiecewiseForcing> {
    plateau(a)?.mapped(0.0, 1.0 / a)
}

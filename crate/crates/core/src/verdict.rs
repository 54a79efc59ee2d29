//! Three-valued outcomes for the integral inequalities.

use core::fmt;

/// Relative tolerance separating a decisive inequality from an equality case.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    /// Within [`REL_TOL`] of equality; neither side wins.
    Marginal,
}

impl Verdict {
    /// Verdict for the strict inequality `lhs > rhs`, judged relative to the larger side.
    pub fn strict(lhs: f64, rhs: f64) -> (Verdict, f64) {
        let margin = relative_margin(lhs - rhs, lhs.abs().max(rhs.abs()));
        (Verdict::from_margin(margin), margin)
    }

    /// Holds above `REL_TOL`, fails below `-REL_TOL`, marginal in between.
    pub fn from_margin(margin: f64) -> Verdict {
        if margin.is_nan() {
            Verdict::Fails
        } else if margin > REL_TOL {
            Verdict::Holds
        } else if margin < -REL_TOL {
            Verdict::Fails
        } else {
            Verdict::Marginal
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn relative_margin(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        // both sides vanish: exact equality
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_inequality_bands() {
        assert_eq!(Verdict::strict(0.8, 0.32).0, Verdict::Holds);
        assert_eq!(Verdict::strict(0.32, 0.8).0, Verdict::Fails);
        assert_eq!(Verdict::strict(1.0, 1.0 + 1e-12).0, Verdict::Marginal);
        assert_eq!(Verdict::strict(0.0, 0.0).0, Verdict::Marginal);
    }
}

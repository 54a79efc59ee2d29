//! Positivity, flatness and dead cores for `-Δu = f` with sign-changing `f`.
//!
//! The crate is `no_std` (it needs `alloc`). Exact one-dimensional machinery
//! lives in [`forcing`] and [`solver1d`]; finite-difference meshes, fields and
//! eigenpairs in [`grid`]; the N-dimensional balance and decay hypotheses in
//! [`maxprinciple`]; and the semilinear and heat-equation drivers in
//! [`semilinear`] and [`parabolic`].
#![no_std]

extern crate alloc;

pub mod error;
pub mod families;
pub mod forcing;
pub mod grid;
pub mod linalg;
pub mod maxprinciple;
pub mod parabolic;
pub mod semilinear;
pub mod solver1d;
pub mod verdict;

pub use error::{Error, Result};
pub use forcing::{ForcingPiece, PieceKind, PiecewiseForcing, Weight};
pub use grid::{EigenPair, Mesh, ScalarField};
pub use verdict::{Verdict, REL_TOL};

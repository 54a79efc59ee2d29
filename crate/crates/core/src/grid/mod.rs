//! Uniform finite-difference meshes and fields on them.
//!
//! Three geometries: an interval, a rectangle `(0, lx) × (0, ly)` and a ball
//! of radius `R` in dimension `N ∈ {1, 2, 3}` reduced to its radial profile.
//! Dirichlet nodes are the interval ends, the rectangle's edge and `r = R`.

mod eigen;
mod operator;

pub use eigen::{first_eigenpair, second_eigenpair, EigenPair};
pub use operator::{
    laplacian_apply, operator_diagonal, shifted_apply, solve_dirichlet, solve_shifted, solve_with_diagonal,
};

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forcing::PiecewiseForcing;

/// Smallest admissible number of cells per axis.
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mesh {
    /// `n` cells on `(lo, hi)`.
    Interval { lo: f64, hi: f64, n: usize },
    /// `nx × ny` cells on `(0, lx) × (0, ly)`.
    Rectangle { nx: usize, ny: usize, lx: f64, ly: f64 },
    /// `n` radial cells on `[0, R]`; nodes `r_i = i R / n`.
    RadialDisk { n: usize, radius: f64, dim: u32 },
}

impl Mesh {
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Mesh> {
        let m = Mesh::Interval { lo, hi, n };
        m.validate()?;
        Ok(m)
    }

    pub fn rectangle(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Mesh> {
        let m = Mesh::Rectangle { nx, ny, lx, ly };
        m.validate()?;
        Ok(m)
    }

    pub fn radial_disk(n: usize, radius: f64, dim: u32) -> Result<Mesh> {
        let m = Mesh::RadialDisk { n, radius, dim };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Mesh::Interval { lo, hi, n } => {
                if n < MIN_CELLS {
                    return Err(Error::InvalidMesh("need at least 16 cells"));
                }
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidMesh("interval needs finite lo < hi"));
                }
            }
            Mesh::Rectangle { nx, ny, lx, ly } => {
                if nx < MIN_CELLS || ny < MIN_CELLS {
                    return Err(Error::InvalidMesh("need at least 16 cells per axis"));
                }
                if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
                    return Err(Error::InvalidMesh("rectangle sides must be positive"));
                }
            }
            Mesh::RadialDisk { n, radius, dim } => {
                if n < MIN_CELLS {
                    return Err(Error::InvalidMesh("need at least 16 radial cells"));
                }
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::InvalidMesh("radius must be positive"));
                }
                if !(1..=3).contains(&dim) {
                    return Err(Error::InvalidMesh("radial dimension must be 1, 2 or 3"));
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Mesh::Interval { n, .. } | Mesh::RadialDisk { n, .. } => n + 1,
            Mesh::Rectangle { nx, ny, .. } => (nx + 1) * (ny + 1),
        }
    }

    /// Grid spacing per axis; the radial and interval meshes repeat `h`.
    pub fn spacing(&self) -> (f64, f64) {
        match *self {
            Mesh::Interval { lo, hi, n } => {
                let h = (hi - lo) / n as f64;
                (h, h)
            }
            Mesh::Rectangle { nx, ny, lx, ly } => (lx / nx as f64, ly / ny as f64),
            Mesh::RadialDisk { n, radius, .. } => {
                let h = radius / n as f64;
                (h, h)
            }
        }
    }

    /// Largest spacing.
    pub fn h(&self) -> f64 {
        let (a, b) = self.spacing();
        a.max(b)
    }

    /// Node position; radial meshes report `(r, 0)`.
    pub fn coord(&self, i: usize) -> [f64; 2] {
        match *self {
            Mesh::Interval { lo, hi, n } => {
                let x = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
                [x, 0.0]
            }
            Mesh::Rectangle { nx, ny, lx, ly } => {
                let (ix, iy) = (i % (nx + 1), i / (nx + 1));
                let x = if ix == nx { lx } else { lx * ix as f64 / nx as f64 };
                let y = if iy == ny { ly } else { ly * iy as f64 / ny as f64 };
                [x, y]
            }
            Mesh::RadialDisk { n, radius, .. } => {
                let r = if i == n { radius } else { radius * i as f64 / n as f64 };
                [r, 0.0]
            }
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        match *self {
            Mesh::Interval { n, .. } => i == 0 || i == n,
            Mesh::Rectangle { nx, ny, .. } => {
                let (ix, iy) = (i % (nx + 1), i / (nx + 1));
                ix == 0 || iy == 0 || ix == nx || iy == ny
            }
            Mesh::RadialDisk { n, .. } => i == n,
        }
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |i| !self.is_boundary(*i))
    }

    pub fn boundary(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|i| self.is_boundary(*i)).collect()
    }

    /// Rectangle node index from axis indices.
    pub fn index2(&self, ix: usize, iy: usize) -> usize {
        match *self {
            Mesh::Rectangle { nx, .. } => iy * (nx + 1) + ix,
            _ => ix,
        }
    }

    /// Spatial dimension of the underlying domain.
    pub fn dim(&self) -> u32 {
        match *self {
            Mesh::Interval { .. } => 1,
            Mesh::Rectangle { .. } => 2,
            Mesh::RadialDisk { dim, .. } => dim,
        }
    }

    /// Measure of the dual cell around node `i`; the cells tile the domain.
    pub fn cell_volume(&self, i: usize) -> f64 {
        match *self {
            Mesh::Interval { n, .. } => {
                let (h, _) = self.spacing();
                if i == 0 || i == n {
                    0.5 * h
                } else {
                    h
                }
            }
            Mesh::Rectangle { nx, ny, .. } => {
                let (hx, hy) = self.spacing();
                let (ix, iy) = (i % (nx + 1), i / (nx + 1));
                let wx = if ix == 0 || ix == nx { 0.5 } else { 1.0 };
                let wy = if iy == 0 || iy == ny { 0.5 } else { 1.0 };
                wx * wy * hx * hy
            }
            Mesh::RadialDisk { dim, .. } => {
                let (a, b) = self.radial_cell(i);
                sphere_area(dim) * (b.powi(dim as i32) - a.powi(dim as i32)) / dim as f64
            }
        }
    }

    /// Radial extent `[r - h/2, r + h/2] ∩ [0, R]` of the cell at node `i`.
    pub(crate) fn radial_cell(&self, i: usize) -> (f64, f64) {
        let r = self.coord(i)[0];
        let (h, _) = self.spacing();
        let radius = match *self {
            Mesh::RadialDisk { radius, .. } => radius,
            _ => f64::INFINITY,
        };
        ((r - 0.5 * h).max(0.0), (r + 0.5 * h).min(radius))
    }

    /// Measure of the domain.
    pub fn volume(&self) -> f64 {
        match *self {
            Mesh::Interval { lo, hi, .. } => hi - lo,
            Mesh::Rectangle { lx, ly, .. } => lx * ly,
            Mesh::RadialDisk { radius, dim, .. } => sphere_area(dim) * radius.powi(dim as i32) / dim as f64,
        }
    }

    /// Distance from node `i` to the boundary.
    pub fn distance(&self, i: usize) -> f64 {
        let p = self.coord(i);
        match *self {
            Mesh::Interval { lo, hi, .. } => (p[0] - lo).min(hi - p[0]),
            Mesh::Rectangle { lx, ly, .. } => p[0].min(lx - p[0]).min(p[1]).min(ly - p[1]),
            Mesh::RadialDisk { radius, .. } => radius - p[0],
        }
    }

    /// Same domain with twice as many cells per axis.
    pub fn refined(&self) -> Mesh {
        match *self {
            Mesh::Interval { lo, hi, n } => Mesh::Interval { lo, hi, n: 2 * n },
            Mesh::Rectangle { nx, ny, lx, ly } => Mesh::Rectangle { nx: 2 * nx, ny: 2 * ny, lx, ly },
            Mesh::RadialDisk { n, radius, dim } => Mesh::RadialDisk { n: 2 * n, radius, dim },
        }
    }

    /// Index of the node of `self` sitting at node `i` of the coarser `coarse`
    /// mesh, if the two are nested by an integer ratio.
    pub fn aligned_index(&self, coarse: &Mesh, i: usize) -> Option<usize> {
        match (*self, *coarse) {
            (Mesh::Interval { lo, hi, n }, Mesh::Interval { lo: l2, hi: h2, n: n2 })
                if lo == l2 && hi == h2 && n % n2 == 0 =>
            {
                Some(i * (n / n2))
            }
            (Mesh::RadialDisk { n, radius, dim }, Mesh::RadialDisk { n: n2, radius: r2, dim: d2 })
                if radius == r2 && dim == d2 && n % n2 == 0 =>
            {
                Some(i * (n / n2))
            }
            (Mesh::Rectangle { nx, ny, lx, ly }, Mesh::Rectangle { nx: nx2, ny: ny2, lx: lx2, ly: ly2 })
                if lx == lx2 && ly == ly2 && nx % nx2 == 0 && ny % ny2 == 0 =>
            {
                let (ix, iy) = (i % (nx2 + 1), i / (nx2 + 1));
                Some(iy * (ny / ny2) * (nx + 1) + ix * (nx / nx2))
            }
            _ => None,
        }
    }
}

/// Surface area of the unit sphere in `R^N` (2 for `N = 1`).
pub fn sphere_area(dim: u32) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Values at the nodes of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    mesh: Mesh,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::InvalidMesh("field length does not match the mesh"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("field values must be finite"));
        }
        Ok(ScalarField { mesh, values })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        ScalarField { mesh, values: vec![0.0; mesh.node_count()] }
    }

    /// Pointwise evaluation at every node, boundary included.
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(mesh: Mesh, f: F) -> Self {
        let values = (0..mesh.node_count()).map(|i| f(mesh.coord(i))).collect();
        ScalarField { mesh, values }
    }

    pub(crate) fn from_raw(mesh: Mesh, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mesh.node_count());
        ScalarField { mesh, values }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Copy with boundary nodes set to zero.
    pub fn with_dirichlet(mut self) -> Self {
        for i in 0..self.values.len() {
            if self.mesh.is_boundary(i) {
                self.values[i] = 0.0;
            }
        }
        self
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        ScalarField { mesh: self.mesh, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &ScalarField, f: F) -> Result<Self> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMisaligned);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(ScalarField { mesh: self.mesh, values })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(min, argmin)` over interior nodes.
    pub fn min_interior(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for i in self.mesh.interior() {
            if self.values[i] < best.0 {
                best = (self.values[i], i);
            }
        }
        best
    }

    /// Cell-volume weighted inner product.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a * b * self.mesh.cell_volume(i))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Cell-volume quadrature of the field over the domain.
    pub fn integral(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| v * self.mesh.cell_volume(i)).sum()
    }
}

/// `δ(x)` at every node.
pub fn distance_field(mesh: &Mesh) -> ScalarField {
    ScalarField::from_raw(*mesh, (0..mesh.node_count()).map(|i| mesh.distance(i)).collect())
}

/// Cell averages of a symbolic forcing; zero on Dirichlet nodes.
///
/// On a radial mesh `f` is the radial profile, given on `(0, R)` or on the
/// symmetric `(-R, R)`; averages carry the weight `r^(N-1)`.
pub fn sample_forcing(mesh: &Mesh, f: &PiecewiseForcing) -> Result<ScalarField> {
    let mut values = vec![0.0; mesh.node_count()];
    let tol = 1e-12;
    match *mesh {
        Mesh::Interval { lo, hi, .. } => {
            let (a, b) = f.domain();
            if (a - lo).abs() > tol * (hi - lo) || (b - hi).abs() > tol * (hi - lo) {
                return Err(Error::InvalidMesh("forcing domain does not match the mesh"));
            }
            let (h, _) = mesh.spacing();
            for i in mesh.interior() {
                let x = mesh.coord(i)[0];
                values[i] = f.integrate(x - 0.5 * h, x + 0.5 * h)? / h;
            }
        }
        Mesh::RadialDisk { radius, dim, .. } => {
            let (a, b) = f.domain();
            let symmetric = (a + radius).abs() <= tol * radius && f.is_symmetric();
            if (b - radius).abs() > tol * radius || !(a.abs() <= tol * radius || symmetric) {
                return Err(Error::InvalidMesh("radial forcing must live on (0, R) or (-R, R)"));
            }
            let k = dim - 1;
            for i in mesh.interior() {
                let (ra, rb) = mesh.radial_cell(i);
                let weight = (rb.powi(dim as i32) - ra.powi(dim as i32)) / dim as f64;
                values[i] = f.moment(ra, rb, 0.0, k)? / weight;
            }
        }
        Mesh::Rectangle { .. } => {
            return Err(Error::InvalidMesh("symbolic forcings are one-dimensional profiles"));
        }
    }
    Ok(ScalarField::from_raw(*mesh, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_meshes() {
        assert!(Mesh::interval(-1.0, 1.0, 8).is_err());
        assert!(Mesh::radial_disk(32, 1.0, 4).is_err());
    }

    #[test]
    fn cells_tile_the_domain() {
        for mesh in [
            Mesh::interval(-1.0, 1.0, 32).unwrap(),
            Mesh::rectangle(16, 20, 1.0, 2.0).unwrap(),
            Mesh::radial_disk(32, 1.0, 2).unwrap(),
            Mesh::radial_disk(32, 1.5, 3).unwrap(),
        ] {
            let total: f64 = (0..mesh.node_count()).map(|i| mesh.cell_volume(i)).sum();
            assert!((total - mesh.volume()).abs() < 1e-12 * mesh.volume());
        }
    }

    #[test]
    fn distances() {
        let m = Mesh::interval(-1.0, 1.0, 16).unwrap();
        assert_eq!(distance_field(&m).get(8), 1.0);
        let sq = Mesh::rectangle(16, 16, 1.0, 1.0).unwrap();
        assert_eq!(sq.distance(sq.index2(8, 8)), 0.5);
        let d = Mesh::radial_disk(16, 1.0, 2).unwrap();
        assert_eq!(d.distance(4), 0.75);
    }

    #[test]
    fn aligned_indices() {
        let c = Mesh::rectangle(16, 16, 1.0, 1.0).unwrap();
        let f = c.refined();
        let i = c.index2(3, 5);
        assert_eq!(f.coord(f.aligned_index(&c, i).unwrap()), c.coord(i));
    }

    #[test]
    fn radial_sampling_preserves_mass() {
        let f = PiecewiseForcing::piecewise_constant(&[0.0, 0.37, 1.0], &[2.0, -1.0]).unwrap();
        let mesh = Mesh::radial_disk(64, 1.0, 2).unwrap();
        let field = sample_forcing(&mesh, &f).unwrap();
        // the Dirichlet cell is dropped, so compare on r < R - h/2
        let h = mesh.h();
        let exact = 2.0 * PI * f.moment(0.0, 1.0 - 0.5 * h, 0.0, 1).unwrap();
        assert!((field.integral() - exact).abs() < 1e-12);
    }
}

//! Truncated 2D Fourier representation on `T_{2π} × T_{L_y}` and the
//! transforms between coefficient and physical space.
//!
//! A field is `f(X, Y) = Σ f̂(k, j) exp(i (k X + ξ_j Y))` with `ξ_j = j 2π / L_y`,
//! `|k| <= K`, `|j| <= J`. Coefficients carry no measure factor, so all norms
//! are plain ℓ² sums over the retained modes. Physical grids are at least
//! `3K + 1` by `3J + 1` points, which makes quadratic products alias-free
//! after truncation back to the retained band (the 2/3 rule).

use crate::error::{Error, Result};
use crate::{Complex, Real};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid<T> {
    k_max: usize,
    j_max: usize,
    ly: T,
    nx: usize,
    ny: usize,
}

fn padded_len(max_mode: usize) -> usize {
    let n = 3 * max_mode + 1;
    n + (n % 2)
}

impl<T: Real> SpectralGrid<T> {
    /// Grid retaining `|k| <= k_max`, `|j| <= j_max` on a box of height `ly`,
    /// with the smallest even dealiasing transform sizes.
    pub fn new(k_max: usize, j_max: usize, ly: T) -> Result<Self> {
        Self::with_transform(k_max, j_max, ly, padded_len(k_max), padded_len(j_max))
    }

    /// Grid matching a physical transform of `nx × ny` points: retains `|k| <= (nx - 1) / 3`.
    pub fn from_transform_size(nx: usize, ny: usize, ly: T) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::Config(format!("transform size {nx}x{ny} too small")));
        }
        Self::with_transform((nx - 1) / 3, (ny - 1) / 3, ly, nx, ny)
    }

    pub fn with_transform(k_max: usize, j_max: usize, ly: T, nx: usize, ny: usize) -> Result<Self> {
        if !(ly > T::zero()) || !ly.is_finite() {
            return Err(Error::Config(format!("box height must be positive, got {ly}")));
        }
        if nx < 3 * k_max + 1 || ny < 3 * j_max + 1 {
            return Err(Error::Config(format!(
                "transform {nx}x{ny} cannot dealias modes |k|<={k_max}, |j|<={j_max}"
            )));
        }
        Ok(Self { k_max, j_max, ly, nx, ny })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn ly(&self) -> T {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_k(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn n_j(&self) -> usize {
        2 * self.j_max + 1
    }

    pub fn len(&self) -> usize {
        self.n_k() * self.n_j()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency spacing `2π / L_y`.
    pub fn dxi(&self) -> T {
        T::lit(2.0) * T::PI() / self.ly
    }

    pub fn xi(&self, j: i64) -> T {
        T::lit(j as f64) * self.dxi()
    }

    pub fn xi_max(&self) -> T {
        self.xi(self.j_max as i64)
    }

    pub fn contains(&self, k: i64, j: i64) -> bool {
        k.unsigned_abs() as usize <= self.k_max && j.unsigned_abs() as usize <= self.j_max
    }

    /// Row-major index over `(k, j)`.
    #[inline]
    pub fn index(&self, k: i64, j: i64) -> usize {
        debug_assert!(self.contains(k, j));
        (k + self.k_max as i64) as usize * self.n_j() + (j + self.j_max as i64) as usize
    }

    #[inline]
    pub fn mode_at(&self, idx: usize) -> (i64, i64) {
        let nj = self.n_j();
        ((idx / nj) as i64 - self.k_max as i64, (idx % nj) as i64 - self.j_max as i64)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k_max == other.k_max
            && self.j_max == other.j_max
            && self.nx == other.nx
            && self.ny == other.ny
            && self.ly == other.ly
    }
}

/// Coefficients of one scalar field on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    grid: SpectralGrid<T>,
    data: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: SpectralGrid<T>) -> Self {
        Self { grid, data: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_vec(grid: SpectralGrid<T>, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} coefficients for a grid of {}", data.len(), grid.len())));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        &self.grid
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn get(&self, k: i64, j: i64) -> Complex<T> {
        if self.grid.contains(k, j) {
            self.data[self.grid.index(k, j)]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    pub fn set(&mut self, k: i64, j: i64, v: Complex<T>) {
        let i = self.grid.index(k, j);
        self.data[i] = v;
    }

    /// Sets `f̂(k, j) = v` and `f̂(-k, -j) = conj(v)`, keeping the field real.
    pub fn set_real_pair(&mut self, k: i64, j: i64, v: Complex<T>) {
        if k == 0 && j == 0 {
            self.set(0, 0, Complex::new(v.re, T::zero()));
        } else {
            self.set(k, j, v);
            self.set(-k, -j, v.conj());
        }
    }

    /// Iterates `(k, j, coefficient)`.
    pub fn iter_modes(&self) -> impl Iterator<Item = (i64, i64, Complex<T>)> + '_ {
        self.data.iter().enumerate().map(move |(i, c)| {
            let (k, j) = self.grid.mode_at(i);
            (k, j, *c)
        })
    }

    pub fn l2_norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `f̂(-k, -j) = conj(f̂(k, j))`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for (k, j, c) in self.iter_modes() {
            worst = worst.max((c - self.get(-k, -j).conj()).norm());
        }
        worst
    }

    /// Projects onto real fields: `f̂(k, j) <- (f̂(k, j) + conj f̂(-k, -j)) / 2`.
    pub fn symmetrize(&mut self) {
        let half = T::lit(0.5);
        let n = self.data.len();
        // index of (-k, -j) is n - 1 - idx for the centred row-major layout
        for i in 0..n / 2 + 1 {
            let mirror = n - 1 - i;
            let avg = (self.data[i] + self.data[mirror].conj()) * half;
            self.data[i] = avg;
            self.data[mirror] = avg.conj();
        }
    }

    pub fn scale(&mut self, s: T) {
        for c in &mut self.data {
            *c = *c * s;
        }
    }

    pub fn axpy(&mut self, a: T, other: &Self) -> Result<()> {
        self.require_same_grid(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x = *x + *y * a;
        }
        Ok(())
    }

    pub fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_shape(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// Maps every coefficient through `f(k, xi, value)`.
    pub fn map_modes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(i64, T, Complex<T>) -> Complex<T>,
    {
        let mut out = self.clone();
        for (i, c) in out.data.iter_mut().enumerate() {
            let (k, j) = self.grid.mode_at(i);
            *c = f(k, self.grid.xi(j), *c);
        }
        out
    }
}

/// Planned 2D FFTs for one grid. Physical arrays are row-major `nx × ny`
/// (X fastest varying along rows of length `ny`).
pub struct Transform2d<T: Real> {
    grid: SpectralGrid<T>,
    fwd_x: Arc<dyn Fft<T>>,
    inv_x: Arc<dyn Fft<T>>,
    fwd_y: Arc<dyn Fft<T>>,
    inv_y: Arc<dyn Fft<T>>,
    column: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> Transform2d<T> {
    pub fn new(grid: SpectralGrid<T>) -> Self {
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(grid.nx());
        let inv_x = planner.plan_fft_inverse(grid.nx());
        let fwd_y = planner.plan_fft_forward(grid.ny());
        let inv_y = planner.plan_fft_inverse(grid.ny());
        let scratch_len = [&fwd_x, &inv_x, &fwd_y, &inv_y]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            grid,
            fwd_x,
            inv_x,
            fwd_y,
            inv_y,
            column: vec![Complex::new(T::zero(), T::zero()); grid.nx()],
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
        }
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        &self.grid
    }

    pub fn physical_len(&self) -> usize {
        self.grid.nx() * self.grid.ny()
    }

    /// Evaluates the field on the physical grid, writing the real part into `out`.
    pub fn to_physical(&mut self, field: &SpectralField<T>, out: &mut Vec<Complex<T>>) {
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        out.clear();
        out.resize(nx * ny, Complex::new(T::zero(), T::zero()));
        for (i, c) in field.as_slice().iter().enumerate() {
            let (k, j) = g.mode_at(i);
            let r = k.rem_euclid(nx as i64) as usize;
            let s = j.rem_euclid(ny as i64) as usize;
            out[r * ny + s] = *c;
        }
        // along y for each retained k row only; other rows are zero
        for k in -(g.k_max() as i64)..=g.k_max() as i64 {
            let r = k.rem_euclid(nx as i64) as usize;
            self.inv_y.process_with_scratch(&mut out[r * ny..(r + 1) * ny], &mut self.scratch);
        }
        self.columns(out, false);
    }

    /// Forward transform of physical data (real part used), truncated to the retained band.
    pub fn to_spectral(&mut self, data: &mut [Complex<T>], out: &mut SpectralField<T>) {
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        assert_eq!(data.len(), nx * ny);
        for v in data.iter_mut() {
            v.im = T::zero();
        }
        self.columns(data, true);
        let norm = T::one() / T::lit((nx * ny) as f64);
        for k in -(g.k_max() as i64)..=g.k_max() as i64 {
            let r = k.rem_euclid(nx as i64) as usize;
            let row = &mut data[r * ny..(r + 1) * ny];
            self.fwd_y.process_with_scratch(row, &mut self.scratch);
            for j in -(g.j_max() as i64)..=g.j_max() as i64 {
                let s = j.rem_euclid(ny as i64) as usize;
                out.set(k, j, row[s] * norm);
            }
        }
    }

    fn columns(&mut self, data: &mut [Complex<T>], forward: bool) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let plan = if forward { &self.fwd_x } else { &self.inv_x };
        for s in 0..ny {
            for r in 0..nx {
                self.column[r] = data[r * ny + s];
            }
            plan.process_with_scratch(&mut self.column, &mut self.scratch);
            for r in 0..nx {
                data[r * ny + s] = self.column[r];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_sizes_dealias() {
        let g = SpectralGrid::<f64>::from_transform_size(128, 128, 16.0 * std::f64::consts::PI).unwrap();
        assert_eq!((g.k_max(), g.j_max()), (42, 42));
        assert_relative_eq!(g.dxi(), 0.125, max_relative = 1e-15);
        let g2 = SpectralGrid::<f64>::new(42, 42, 1.0).unwrap();
        assert_eq!((g2.nx(), g2.ny()), (128, 128));
        assert!(SpectralGrid::<f64>::with_transform(10, 10, 1.0, 30, 31).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = SpectralGrid::<f64>::new(3, 5, 2.0).unwrap();
        for i in 0..g.len() {
            let (k, j) = g.mode_at(i);
            assert_eq!(g.index(k, j), i);
            // mirror of (k, j) sits at len - 1 - i
            assert_eq!(g.index(-k, -j), g.len() - 1 - i);
        }
    }

    #[test]
    fn single_mode_physical_values() {
        let g = SpectralGrid::<f64>::new(2, 2, 2.0 * std::f64::consts::PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_pair(1, 2, Complex::new(0.5, 0.0));
        let mut tr = Transform2d::new(g);
        let mut phys = Vec::new();
        tr.to_physical(&f, &mut phys);
        // f = cos(X + 2Y)
        for r in 0..g.nx() {
            for s in 0..g.ny() {
                let x = 2.0 * std::f64::consts::PI * r as f64 / g.nx() as f64;
                let y = 2.0 * std::f64::consts::PI * s as f64 / g.ny() as f64;
                assert!((phys[r * g.ny() + s].re - (x + 2.0 * y).cos()).abs() < 1e-13);
            }
        }
        let mut back = SpectralField::zeros(g);
        tr.to_spectral(&mut phys, &mut back);
        for (a, b) in back.as_slice().iter().zip(f.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn symmetrize_projects_onto_real_fields() {
        let g = SpectralGrid::<f64>::new(2, 3, 1.0).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, -2, Complex::new(1.0, 2.0));
        f.set(0, 0, Complex::new(1.0, 1.0));
        assert!(f.hermitian_defect() > 0.5);
        f.symmetrize();
        assert!(f.hermitian_defect() < 1e-15);
        assert_eq!(f.get(-1, 2), Complex::new(0.5, -1.0));
        assert_eq!(f.get(0, 0), Complex::new(1.0, 0.0));
    }
}

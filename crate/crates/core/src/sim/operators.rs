use crate::error::{Error, Result};
use crate::profile::ProfileSpectrum;
use crate::spectral::{SpectralField, SpectralGrid, Transform2d};
use crate::{Complex, Real};

/// Effective vertical wavenumber `xi - s k t` in the moving frame.
#[inline]
pub(crate) fn eta<T: Real>(xi: T, k: i64, t: T, shear: T) -> T {
    xi - shear * T::lit(k as f64) * t
}

/// Splits a field into its `k = 0` column and the remainder.
pub fn shear_split<T: Real>(field: &SpectralField<T>) -> (SpectralField<T>, SpectralField<T>) {
    let mut avg = SpectralField::zeros(*field.grid());
    let mut fluct = SpectralField::zeros(*field.grid());
    for (k, j, c) in field.iter_modes() {
        if k == 0 {
            avg.set(k, j, c);
        } else {
            fluct.set(k, j, c);
        }
    }
    (avg, fluct)
}

/// `v = ∇_t^⊥ Δ_t^{-1} ω` with unit shear:
/// `v̂₁ = -i(xi - kt) ω̂ / (k² + (xi - kt)²)`, `v̂₂ = i k ω̂ / (k² + (xi - kt)²)`.
pub fn biot_savart<T: Real>(omega: &SpectralField<T>, t: T) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let mean = omega.get(0, 0);
    if mean.re != T::zero() || mean.im != T::zero() {
        return Err(Error::Domain("vorticity has a nonzero mean".into()));
    }
    Ok(velocity(omega, t, T::one()))
}

/// Biot–Savart law with shear rate `shear`; the mean mode is ignored.
pub(crate) fn velocity<T: Real>(omega: &SpectralField<T>, t: T, shear: T) -> (SpectralField<T>, SpectralField<T>) {
    let grid = *omega.grid();
    let mut v1 = SpectralField::zeros(grid);
    let mut v2 = SpectralField::zeros(grid);
    velocity_into(omega, t, shear, &mut v1, &mut v2);
    (v1, v2)
}

pub(crate) fn velocity_into<T: Real>(
    omega: &SpectralField<T>,
    t: T,
    shear: T,
    v1: &mut SpectralField<T>,
    v2: &mut SpectralField<T>,
) {
    let grid = *omega.grid();
    let src = omega.as_slice();
    let (o1, o2) = (v1.as_mut_slice(), v2.as_mut_slice());
    for (idx, c) in src.iter().enumerate() {
        let (k, j) = grid.mode_at(idx);
        let kr = T::lit(k as f64);
        let e = eta(grid.xi(j), k, t, shear);
        let q = kr * kr + e * e;
        if q == T::zero() {
            o1[idx] = Complex::new(T::zero(), T::zero());
            o2[idx] = Complex::new(T::zero(), T::zero());
            continue;
        }
        // -i e c / q and i k c / q
        o1[idx] = Complex::new(c.im * e / q, -c.re * e / q);
        o2[idx] = Complex::new(-c.im * kr / q, c.re * kr / q);
    }
}

/// Buffers and FFT plans for repeated pseudospectral products on one grid.
pub(crate) struct Workspace<T: Real> {
    tr: Transform2d<T>,
    v1p: Vec<Complex<T>>,
    v2p: Vec<Complex<T>>,
    fxp: Vec<Complex<T>>,
    fyp: Vec<Complex<T>>,
    tmp: SpectralField<T>,
}

impl<T: Real> Workspace<T> {
    pub(crate) fn new(grid: SpectralGrid<T>) -> Self {
        Self {
            tr: Transform2d::new(grid),
            v1p: Vec::new(),
            v2p: Vec::new(),
            fxp: Vec::new(),
            fyp: Vec::new(),
            tmp: SpectralField::zeros(grid),
        }
    }

    /// Loads a velocity field into physical space for subsequent [`Self::transport`] calls.
    pub(crate) fn load_velocity(&mut self, v1: &SpectralField<T>, v2: &SpectralField<T>) {
        self.tr.to_physical(v1, &mut self.v1p);
        self.tr.to_physical(v2, &mut self.v2p);
    }

    /// Writes the dealiased `v · ∇_t f` into `out` using the loaded velocity.
    pub(crate) fn transport(&mut self, f: &SpectralField<T>, t: T, shear: T, out: &mut SpectralField<T>) {
        let grid = *f.grid();
        {
            let src = f.as_slice();
            let dst = self.tmp.as_mut_slice();
            for (idx, c) in src.iter().enumerate() {
                let (k, _) = grid.mode_at(idx);
                let kr = T::lit(k as f64);
                dst[idx] = Complex::new(-c.im * kr, c.re * kr);
            }
        }
        self.tr.to_physical(&self.tmp, &mut self.fxp);
        {
            let src = f.as_slice();
            let dst = self.tmp.as_mut_slice();
            for (idx, c) in src.iter().enumerate() {
                let (k, j) = grid.mode_at(idx);
                let e = eta(grid.xi(j), k, t, shear);
                dst[idx] = Complex::new(-c.im * e, c.re * e);
            }
        }
        self.tr.to_physical(&self.tmp, &mut self.fyp);
        for i in 0..self.fxp.len() {
            let p = self.v1p[i].re * self.fxp[i].re + self.v2p[i].re * self.fyp[i].re;
            self.fxp[i] = Complex::new(p, T::zero());
        }
        self.tr.to_spectral(&mut self.fxp, out);
        out.symmetrize();
    }
}

/// Dealiased `v · ∇_t f` at time `t` with unit shear.
pub fn nonlinear_transport<T: Real>(
    f: &SpectralField<T>,
    v: &(SpectralField<T>, SpectralField<T>),
    t: T,
) -> Result<SpectralField<T>> {
    f.require_same_grid(&v.0)?;
    f.require_same_grid(&v.1)?;
    let mut ws = Workspace::new(*f.grid());
    ws.load_velocity(&v.0, &v.1);
    let mut out = SpectralField::zeros(*f.grid());
    ws.transport(f, t, T::one(), &mut out);
    Ok(out)
}

/// Atoms of `T'` as shifts on the `xi` lattice of `grid`.
pub(crate) fn lattice_atoms<T: Real>(
    spec: &ProfileSpectrum<T>,
    grid: &SpectralGrid<T>,
) -> Result<Vec<(i64, Complex<T>)>> {
    if spec.density.is_some() {
        return Err(Error::Config("continuous profile spectra are not supported by the solver".into()));
    }
    let mut out = Vec::new();
    for atom in &spec.atoms {
        let r = atom.frequency / grid.dxi();
        let m = r.round();
        if (r - m).abs() > T::lit(1e-9) * T::one().max(r.abs()) {
            return Err(Error::Truncation(format!(
                "profile frequency {} is not a multiple of 2π/Ly = {}",
                atom.frequency,
                grid.dxi()
            )));
        }
        let m = m.to_f64_lossy() as i64;
        if m.unsigned_abs() as usize > grid.j_max() {
            return Err(Error::Truncation(format!("profile frequency {} exceeds the grid band", atom.frequency)));
        }
        out.push((m, atom.mass));
    }
    Ok(out)
}

/// `out(k, j) = Σ_m a_m v₂(k, j - m)`, the spectrum of `T'(y) v₂`; out-of-band sources are zero.
pub(crate) fn profile_product<T: Real>(atoms: &[(i64, Complex<T>)], v2: &SpectralField<T>, out: &mut SpectralField<T>) {
    let grid = *v2.grid();
    let jm = grid.j_max() as i64;
    let src = v2.as_slice();
    let dst = out.as_mut_slice();
    for (idx, d) in dst.iter_mut().enumerate() {
        let (k, j) = grid.mode_at(idx);
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(m, a) in atoms {
            let js = j - m;
            if js.abs() <= jm {
                acc = acc + a * src[grid.index(k, js)];
            }
        }
        *d = acc;
    }
}

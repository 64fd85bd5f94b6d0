use crate::error::{Error, Result};
use crate::multiplier::{a_from_ratio, b_from_ratio, sobolev_weight, DissipationConfig};
use crate::ode::{integrate, IntegrationOptions, LawsonSystem};
use crate::profile::ProfileSpectrum;
use crate::{Complex, Real};
use rayon::prelude::*;

/// Retained modes of the coupled problem: the listed `k != 0` columns and
/// `xi_j = j Δξ` for `|j| <= j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledGrid<T> {
    pub ks: Vec<i64>,
    pub j_max: usize,
    pub dxi: T,
}

impl<T: Real> CoupledGrid<T> {
    pub fn new(ks: Vec<i64>, j_max: usize, dxi: T) -> Result<Self> {
        if ks.iter().any(|&k| k == 0) {
            return Err(Error::Config("the k = 0 column decouples and is excluded".into()));
        }
        if !(dxi > T::zero()) {
            return Err(Error::Config(format!("dxi must be positive, got {dxi}")));
        }
        Ok(Self { ks, j_max, dxi })
    }

    pub fn xi(&self, j: i64) -> T {
        T::lit(j as f64) * self.dxi
    }
}

/// One `k` column: `ω̂(k, xi_j)` and `p̂ = ∂x θ̂ = i k θ̂` for `|j| <= j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledColumn<T> {
    pub k: i64,
    pub j_max: usize,
    pub omega: Vec<Complex<T>>,
    pub p: Vec<Complex<T>>,
}

impl<T: Real> CoupledColumn<T> {
    pub fn zeros(k: i64, j_max: usize) -> Self {
        let n = 2 * j_max + 1;
        let z = Complex::new(T::zero(), T::zero());
        Self { k, j_max, omega: vec![z; n], p: vec![z; n] }
    }

    pub fn index(&self, j: i64) -> Option<usize> {
        let i = j + self.j_max as i64;
        if i >= 0 && (i as usize) < self.omega.len() {
            Some(i as usize)
        } else {
            None
        }
    }

    /// `θ̂ = p̂ / (i k)`.
    pub fn theta(&self, j: i64) -> Option<Complex<T>> {
        let i = self.index(j)?;
        Some(self.p[i] / Complex::new(T::zero(), T::lit(self.k as f64)))
    }

    fn padded(&self, j_store: usize) -> Self {
        let mut out = Self::zeros(self.k, j_store);
        let off = j_store - self.j_max;
        out.omega[off..off + self.omega.len()].copy_from_slice(&self.omega);
        out.p[off..off + self.p.len()].copy_from_slice(&self.p);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSample<T> {
    pub t: T,
    pub columns: Vec<CoupledColumn<T>>,
}

/// States on the padded grid `|j| <= j_store`, where `j_store = j_max + padding`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectory<T> {
    pub grid: CoupledGrid<T>,
    pub padding: usize,
    pub samples: Vec<CoupledSample<T>>,
}

struct Column<'a, T> {
    k: i64,
    j_store: usize,
    dxi: T,
    diss: DissipationConfig<T>,
    shifts: &'a [(i64, Complex<T>)],
}

impl<T: Real> LawsonSystem<T> for Column<'_, T> {
    fn dim(&self) -> usize {
        2 * (2 * self.j_store + 1)
    }

    fn decay(&self, a: T, b: T, out: &mut [T]) {
        let n = 2 * self.j_store + 1;
        for i in 0..n {
            let xi = T::lit(i as f64 - self.j_store as f64) * self.dxi;
            out[i] = self.diss.omega_decay(self.k, xi, a, b);
            out[n + i] = self.diss.theta_decay(self.k, xi, a, b);
        }
    }

    fn nonstiff(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let n = 2 * self.j_store + 1;
        let kr = T::lit(self.k as f64);
        let kk = kr * kr;
        // g(ζ) = k² / (k² + (ζ - kt)²) ω̂(ζ)
        let g: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let eta = T::lit(i as f64 - self.j_store as f64) * self.dxi - kr * t;
                y[i] * (kk / (kk + eta * eta))
            })
            .collect();
        dy[..n].copy_from_slice(&y[n..]);
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(shift, mass) in self.shifts {
                let src = i as i64 - shift;
                if src >= 0 && (src as usize) < n {
                    acc = acc + mass * g[src as usize];
                }
            }
            dy[n + i] = -acc;
        }
    }
}

/// Lattice shifts of the profile atoms, or a truncation error if an atom is off the lattice
/// or wider than the retained band.
fn lattice_shifts<T: Real>(spec: &ProfileSpectrum<T>, grid: &CoupledGrid<T>) -> Result<Vec<(i64, Complex<T>)>> {
    let mut out = Vec::new();
    for atom in &spec.atoms {
        let r = atom.frequency / grid.dxi;
        let m = r.round();
        if (r - m).abs() > T::lit(1e-9) * T::one().max(r.abs()) {
            return Err(Error::Truncation(format!(
                "profile frequency {} is not a multiple of the grid spacing {}",
                atom.frequency, grid.dxi
            )));
        }
        let m = m.to_f64_lossy() as i64;
        if m.unsigned_abs() as usize > grid.j_max {
            return Err(Error::Truncation(format!(
                "profile frequency {} exceeds the retained band {}",
                atom.frequency,
                grid.xi(grid.j_max as i64)
            )));
        }
        out.push((m, atom.mass));
    }
    Ok(out)
}

/// Evolves `(ω̂, ∂x θ̂)` under the linearization around a general profile:
///
/// ```text
/// ∂t ω̂(k, xi)   = -dissipation + p̂(k, xi)
/// ∂t p̂(k, xi)   = -Σ_m a_m k² / (k² + (xi - ω_m - kt)²) ω̂(k, xi - ω_m)
/// ```
///
/// where `T'(y) = Σ_m a_m exp(i ω_m y)`. Columns are independent and run in
/// parallel. The ξ grid is padded by the widest atom shift; modes beyond
/// the padded band are dropped.
pub fn integrate_coupled_linear<T: Real>(
    spec: &ProfileSpectrum<T>,
    grid: &CoupledGrid<T>,
    diss: DissipationConfig<T>,
    init: &[CoupledColumn<T>],
    times: &[T],
    opts: &IntegrationOptions<T>,
) -> Result<CoupledTrajectory<T>> {
    let shifts = lattice_shifts(spec, grid)?;
    let padding = shifts.iter().map(|(m, _)| m.unsigned_abs() as usize).max().unwrap_or(0);
    let j_store = grid.j_max + padding;
    for k in &grid.ks {
        if !init.iter().any(|c| c.k == *k) {
            return Err(Error::Config(format!("missing initial column k = {k}")));
        }
    }
    for c in init {
        if c.j_max != grid.j_max || c.omega.len() != 2 * grid.j_max + 1 || c.p.len() != c.omega.len() {
            return Err(Error::GridMismatch(format!("initial column k = {} does not match the grid", c.k)));
        }
    }

    let per_column: Vec<Result<Vec<CoupledColumn<T>>>> = grid
        .ks
        .par_iter()
        .map(|&k| {
            let c0 = init.iter().find(|c| c.k == k).expect("checked above").padded(j_store);
            let sys = Column { k, j_store, dxi: grid.dxi, diss, shifts: &shifts };
            let n = 2 * j_store + 1;
            let mut y0 = c0.omega.clone();
            y0.extend_from_slice(&c0.p);
            let mut out = Vec::with_capacity(times.len());
            integrate(
                &sys,
                T::zero(),
                &y0,
                times,
                opts,
                |_, _, y| {
                    out.push(CoupledColumn { k, j_max: j_store, omega: y[..n].to_vec(), p: y[n..].to_vec() });
                },
                |_, _| {},
            )?;
            Ok(out)
        })
        .collect();

    let mut samples: Vec<CoupledSample<T>> =
        times.iter().map(|&t| CoupledSample { t, columns: Vec::with_capacity(grid.ks.len()) }).collect();
    for col in per_column {
        for (s, c) in samples.iter_mut().zip(col?) {
            s.columns.push(c);
        }
    }
    Ok(CoupledTrajectory { grid: grid.clone(), padding, samples })
}

/// Parameters of the weighted energy
/// `Σ (1 + k² + xi²)^N (AB)² [α̂ |ω̂|² + H² |θ̂|²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostEnergyConfig<T> {
    pub n: u32,
    pub nu: T,
    pub alpha_hat: T,
    /// Cutoff of `B`; `ν^{-1/3}` by default.
    pub cutoff: T,
}

impl<T: Real> GhostEnergyConfig<T> {
    pub fn new(n: u32, nu: T, alpha_hat: T) -> Self {
        Self { n, nu, alpha_hat, cutoff: nu.cbrt().recip() }
    }
}

pub fn ghost_energy<T: Real>(sample: &CoupledSample<T>, dxi: T, cfg: &GhostEnergyConfig<T>) -> T {
    let t = sample.t;
    let cap2 = cfg.nu.powf(-T::lit(2.0) / T::lit(3.0));
    let mut total = T::zero();
    for col in &sample.columns {
        let kr = T::lit(col.k as f64);
        let kk = kr * kr;
        for (i, (w, p)) in col.omega.iter().zip(&col.p).enumerate() {
            let xi = T::lit(i as f64 - col.j_max as f64) * dxi;
            let s = xi / kr;
            let ab = a_from_ratio(t, s) * b_from_ratio(t, s, cfg.cutoff);
            let eta = xi - kr * t;
            let h2 = kk + (eta * eta).min(cap2);
            let theta2 = p.norm_sqr() / kk;
            total = total + sobolev_weight(cfg.n, col.k, xi) * ab * ab * (cfg.alpha_hat * w.norm_sqr() + h2 * theta2);
        }
    }
    total
}

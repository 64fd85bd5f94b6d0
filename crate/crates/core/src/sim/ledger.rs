use super::operators::eta;
use super::SimState;
use crate::multiplier::{a_from_ratio, b_from_ratio, sobolev_weight};
use crate::Real;
use serde::{Deserialize, Serialize};

/// Column names of the twelve ledger entries, in [`LedgerSnapshot::values`] order.
pub const LEDGER_COLUMNS: [&str; 12] = [
    "omega_neq_max",
    "omega_neq_diss",
    "omega_neq_ind",
    "omega_neq_bs",
    "theta_neq_max",
    "theta_neq_diss",
    "theta_neq_ind",
    "theta_neq_bs",
    "omega_eq_max",
    "omega_eq_diss",
    "theta_eq_max",
    "theta_eq_diss",
];

/// Instantaneous integrands of the bootstrap quantities at one time.
///
/// With `w = (1 + k² + xi²)^N`, `M = A B` (cutoff `ν^{-1/3}`), `η = xi - kt`,
/// `H = sqrt(k² + min(η², ν^{-2/3}))` and `H₀ = min(|xi|, ν^{-1/3})` on `k = 0`:
///
/// * `omega_neq_max  = Σ w |M ω̂|²`, `omega_neq_diss = ν Σ w η² |M ω̂|²`,
///   `omega_neq_ind = ν Σ_{|η| <= |k|} w |M ω̂|²`, `omega_neq_bs = Σ w |M ω̂|² / (k² + η²)`,
///   all over `k != 0`;
/// * the `theta_neq_*` entries are the same with `H M θ̂`;
/// * `omega_eq_max = Σ w |ω̂|²`, `omega_eq_diss = ν Σ w xi² |ω̂|²` over `k = 0`;
/// * `theta_eq_max = Σ w H₀² |θ̂|²`, `theta_eq_diss = ν Σ w H₀² xi² |θ̂|²` over `k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LedgerSnapshot<T> {
    pub t: T,
    pub values: [T; 12],
}

/// Evaluates every bootstrap integrand of `state` with Sobolev order `n` and viscosity `nu`.
/// Time enters the multipliers through `shear · t`.
pub fn bootstrap_norms<T: Real>(state: &SimState<T>, n: u32, nu: T, shear: T) -> LedgerSnapshot<T> {
    let grid = state.grid();
    let t = state.t;
    let ts = shear * t;
    let cutoff = nu.cbrt().recip();
    let cap2 = nu.powf(-T::lit(2.0 / 3.0));
    let mut v = [T::zero(); 12];
    let wo = state.omega.as_slice();
    let wt = state.theta.as_slice();
    for idx in 0..grid.len() {
        let (k, j) = grid.mode_at(idx);
        let xi = grid.xi(j);
        let w = sobolev_weight(n, k, xi);
        let o2 = wo[idx].norm_sqr();
        let q2 = wt[idx].norm_sqr();
        if k == 0 {
            let h0 = xi.abs().min(cutoff);
            v[8] = v[8] + w * o2;
            v[9] = v[9] + nu * w * xi * xi * o2;
            v[10] = v[10] + w * h0 * h0 * q2;
            v[11] = v[11] + nu * w * h0 * h0 * xi * xi * q2;
            continue;
        }
        let kr = T::lit(k as f64);
        let s = xi / kr;
        let m = a_from_ratio(ts, s) * b_from_ratio(ts, s, cutoff);
        let e = eta(xi, k, t, shear);
        let q = kr * kr + e * e;
        let h2 = kr * kr + (e * e).min(cap2);
        let ind = if e.abs() <= kr.abs() { T::one() } else { T::zero() };
        for (base, amp) in [(0usize, m * m * o2), (4usize, h2 * m * m * q2)] {
            v[base] = v[base] + w * amp;
            v[base + 1] = v[base + 1] + nu * w * e * e * amp;
            v[base + 2] = v[base + 2] + nu * w * ind * amp;
            v[base + 3] = v[base + 3] + w * amp / q;
        }
    }
    LedgerSnapshot { t, values: v }
}

/// Running maxima (entries 0, 4, 8, 10) and trapezoid time integrals (all others)
/// of the bootstrap integrands.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BootstrapLedger<T> {
    pub t: T,
    pub values: [T; 12],
    last: Option<LedgerSnapshot<T>>,
}

const MAX_ENTRIES: [usize; 4] = [0, 4, 8, 10];

impl<T: Real> BootstrapLedger<T> {
    pub fn new() -> Self {
        Self { t: T::zero(), values: [T::zero(); 12], last: None }
    }

    pub fn update(&mut self, snap: LedgerSnapshot<T>) {
        match self.last {
            None => {
                for i in MAX_ENTRIES {
                    self.values[i] = snap.values[i];
                }
            }
            Some(prev) => {
                let dt = snap.t - prev.t;
                for i in 0..12 {
                    if MAX_ENTRIES.contains(&i) {
                        self.values[i] = self.values[i].max(snap.values[i]);
                    } else {
                        self.values[i] = self.values[i] + T::lit(0.5) * dt * (prev.values[i] + snap.values[i]);
                    }
                }
            }
        }
        self.t = snap.t;
        self.last = Some(snap);
    }

    pub fn get(&self, name: &str) -> Option<T> {
        LEDGER_COLUMNS.iter().position(|c| *c == name).map(|i| self.values[i])
    }

    /// Block sums `(ω≠, θ≠, ω=, θ=)` as they enter the bootstrap inequalities.
    pub fn blocks(&self) -> [T; 4] {
        let v = &self.values;
        [v[0] + v[1] + v[2] + v[3], v[4] + v[5] + v[6] + v[7], v[8] + v[9], v[10] + v[11]]
    }

    /// `(16 ε², 16 ν ε², 16 ε², 16 ν ε²)`
    pub fn thresholds(epsilon: T, nu: T) -> [T; 4] {
        let e2 = T::lit(16.0) * epsilon * epsilon;
        [e2, e2 * nu, e2, e2 * nu]
    }

    pub fn within(&self, epsilon: T, nu: T) -> [bool; 4] {
        let b = self.blocks();
        let th = Self::thresholds(epsilon, nu);
        [b[0] <= th[0], b[1] <= th[1], b[2] <= th[2], b[3] <= th[3]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralField, SpectralGrid};
    use crate::Complex;

    #[test]
    fn zero_state_gives_zero() {
        let g = SpectralGrid::new(3, 3, 1.0).unwrap();
        let s = SimState::zeros(g, 0.0);
        let snap = bootstrap_norms(&s, 2, 0.1, 1.0);
        assert!(snap.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_mode_indicator_entry() {
        let g = SpectralGrid::new(2, 2, 2.0 * std::f64::consts::PI).unwrap();
        let mut w = SpectralField::zeros(g);
        w.set(1, 0, Complex::new(1.0, 0.0));
        let s = SimState::new(w, SpectralField::zeros(g), 0.0).unwrap();
        let nu = 0.01;
        let snap = bootstrap_norms(&s, 3, nu, 1.0);
        // M(0) = 1, weight (1 + 1)^3
        assert!((snap.values[2] - nu * 8.0).abs() < 1e-15);
        assert!((snap.values[0] - 8.0).abs() < 1e-15);
        assert_eq!(snap.values[1], 0.0);
    }

    #[test]
    fn ledger_accumulates() {
        let mut l = BootstrapLedger::<f64>::new();
        let mut a = LedgerSnapshot { t: 0.0, values: [1.0; 12] };
        l.update(a);
        a.t = 2.0;
        a.values = [3.0; 12];
        l.update(a);
        assert_eq!(l.values[0], 3.0);
        assert_eq!(l.values[1], 4.0);
        assert_eq!(l.get("theta_eq_diss"), Some(4.0));
        assert_eq!(l.blocks()[2], 7.0);
    }
}

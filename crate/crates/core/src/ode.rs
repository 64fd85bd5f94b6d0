//! Adaptive Dormand–Prince 5(4) with a diagonal integrating factor.
//!
//! Systems have the form `y' = -d(t) ∘ y + N(t, y)` where `d(t) >= 0` is a
//! per-component rate with a known antiderivative. The linear part is
//! integrated exactly (Lawson's method): every stage and the update propagate
//! through `exp(-∫ d)`, so only the nonstiff part `N` is approximated.
//! All exponentials are decay factors, hence bounded by one.

use crate::error::{Error, Result};
use crate::{Complex, Real};

/// A system `y' = -d(t) ∘ y + N(t, y)` with complex state.
pub trait LawsonSystem<T: Real> {
    fn dim(&self) -> usize;

    /// Writes `∫_a^b d_i(τ) dτ` into `out[i]` for `a <= b`.
    fn decay(&self, a: T, b: T, out: &mut [T]);

    /// Writes `N(t, y)` into `dy`.
    fn nonstiff(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; chosen from the first derivative when `None`.
    pub h0: Option<T>,
    pub h_max: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegrationOptions<T> {
    fn default() -> Self {
        Self { rtol: T::lit(1e-9), atol: T::lit(1e-12), h0: None, h_max: None, max_steps: 5_000_000 }
    }
}

impl<T: Real> IntegrationOptions<T> {
    pub fn with_tolerances(rtol: T, atol: T) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// b - b̂
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates from `t0` through every time in `times` (nondecreasing, all `>= t0`),
/// calling `on_sample(i, t_i, y(t_i))` at each, and `on_step(t, y)` after every
/// accepted step.
pub fn integrate<T, S, FS, FP>(
    sys: &S,
    t0: T,
    y0: &[Complex<T>],
    times: &[T],
    opts: &IntegrationOptions<T>,
    mut on_sample: FS,
    mut on_step: FP,
) -> Result<IntegrationStats>
where
    T: Real,
    S: LawsonSystem<T> + ?Sized,
    FS: FnMut(usize, T, &[Complex<T>]),
    FP: FnMut(T, &[Complex<T>]),
{
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::Config(format!("initial state has {} entries, system has {n}", y0.len())));
    }
    if !(opts.rtol > T::zero()) || !(opts.atol >= T::zero()) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    let mut prev = t0;
    for &t in times {
        if !(t >= prev) || !t.is_finite() {
            return Err(Error::Config("sample times must be finite, nondecreasing and >= t0".into()));
        }
        prev = t;
    }

    let zero_c = Complex::new(T::zero(), T::zero());
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut stats = IntegrationStats::default();
    let mut k: Vec<Vec<Complex<T>>> = vec![vec![zero_c; n]; 7];
    let mut ytmp = vec![zero_c; n];
    let mut ynew = vec![zero_c; n];
    let mut err = vec![zero_c; n];
    let mut dec = vec![T::zero(); n];
    // dstage[i] = ∫_{t}^{τ_i} d
    let mut dstage: Vec<Vec<T>> = vec![vec![T::zero(); n]; 7];

    sys.nonstiff(t, &y, &mut k[0]);
    stats.evaluations += 1;

    let t_final = times.last().copied().unwrap_or(t0);
    let mut h = match opts.h0 {
        Some(h) => h,
        None => initial_step(&y, &k[0], t_final - t0, opts),
    };
    if let Some(hm) = opts.h_max {
        h = h.min(hm);
    }

    let coef = |x: f64| T::lit(x);
    let mut next = 0;
    let mut last_rejected = false;
    while next < times.len() {
        if times[next] <= t {
            on_sample(next, t, &y);
            next += 1;
            continue;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration { t: t.to_f64_lossy(), reason: "maximum number of steps exceeded".into() });
        }
        let target = times[next];
        let mut step = h;
        let mut hits_target = false;
        if t + step >= target {
            step = target - t;
            hits_target = true;
        } else if t + T::lit(1.1) * step >= target {
            step = (target - t) * T::lit(0.5);
        }
        let h_min = T::lit(64.0) * T::epsilon() * t.abs().max(T::one());
        if step < h_min && !hits_target {
            return Err(Error::Integration { t: t.to_f64_lossy(), reason: format!("step size underflow (h = {step})") });
        }

        let tau: Vec<T> = C.iter().map(|&c| if c == 1.0 { t + step } else { t + coef(c) * step }).collect();
        for i in 1..7 {
            sys.decay(t, tau[i], &mut dstage[i]);
        }
        for i in 1..7 {
            for (m, yt) in ytmp.iter_mut().enumerate() {
                *yt = y[m] * (-dstage[i][m]).exp();
            }
            for j in 0..i {
                let a = A[i][j];
                if a == 0.0 {
                    continue;
                }
                sys.decay(tau[j], tau[i], &mut dec);
                let ha = step * coef(a);
                for m in 0..n {
                    ytmp[m] = ytmp[m] + k[j][m] * (ha * (-dec[m]).exp());
                }
            }
            sys.nonstiff(tau[i], &ytmp, &mut k[i]);
            stats.evaluations += 1;
            if i == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }

        for e in err.iter_mut() {
            *e = zero_c;
        }
        for j in 0..7 {
            if E[j] == 0.0 {
                continue;
            }
            sys.decay(tau[j], tau[6], &mut dec);
            let he = step * coef(E[j]);
            for m in 0..n {
                err[m] = err[m] + k[j][m] * (he * (-dec[m]).exp());
            }
        }
        let mut acc = T::zero();
        for m in 0..n {
            let scale = opts.atol + opts.rtol * y[m].norm().max(ynew[m].norm());
            let r = if scale > T::zero() { err[m].norm() / scale } else { T::zero() };
            acc = acc + r * r;
        }
        let en = (acc / T::lit(n.max(1) as f64)).sqrt();
        if !en.is_finite() || ynew.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            stats.rejected += 1;
            h = step * T::lit(0.2);
            last_rejected = true;
            continue;
        }
        let fac = if en == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * en.powf(-T::lit(0.2))).max(T::lit(0.2)).min(T::lit(5.0))
        };
        if en <= T::one() {
            stats.accepted += 1;
            t = if hits_target { target } else { tau[6] };
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            on_step(t, &y);
            let grow = if last_rejected { fac.min(T::one()) } else { fac };
            // a clipped step says nothing about the natural step size
            h = if hits_target { h.max(step * grow) } else { step * grow };
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h = step * fac.min(T::one());
            last_rejected = true;
        }
        if let Some(hm) = opts.h_max {
            h = h.min(hm);
        }
    }
    Ok(stats)
}

fn initial_step<T: Real>(y: &[Complex<T>], f: &[Complex<T>], span: T, opts: &IntegrationOptions<T>) -> T {
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for (yi, fi) in y.iter().zip(f) {
        let sc = opts.atol + opts.rtol * yi.norm();
        if sc > T::zero() {
            d0 = d0 + (yi.norm() / sc).powi(2);
            d1 = d1 + (fi.norm() / sc).powi(2);
        }
    }
    let h = if d0 < T::lit(1e-10) || d1 < T::lit(1e-10) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * (d0 / d1).sqrt()
    };
    let span = span.abs();
    if span > T::zero() {
        h.min(span)
    } else {
        h
    }
}

/// `n` points log-spaced on `[a, b]`, `0 < a <= b`.
pub fn log_spaced<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![b];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                (la + (lb - la) * T::lit(i as f64) / T::lit((n - 1) as f64)).exp()
            }
        })
        .collect()
}

/// `n` points evenly spaced on `[a, b]`.
pub fn lin_spaced<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![b];
    }
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + (b - a) * T::lit(i as f64) / T::lit((n - 1) as f64) })
        .collect()
}

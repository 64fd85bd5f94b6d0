//! Reference computations written independently of `bsl-core`, for tests only.
//!
//! Everything here is deliberately naive: adaptive quadrature instead of closed
//! forms, dense eigen-solves instead of formulas, and direct sums instead of FFTs.

use nalgebra::{Complex as NaComplex, Matrix2};
use num_complex::Complex64;

const G7_WEIGHTS: [f64; 4] = [0.417_959_183_673_469_4, 0.381_830_050_505_118_9, 0.279_705_391_489_276_7, 0.129_484_966_168_869_7];
const K15_NODES: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_5,
    0.405_845_151_377_397_2,
    0.586_087_235_467_691_1,
    0.741_531_185_599_394_4,
    0.864_864_423_359_769_1,
    0.949_107_912_342_758_5,
    0.991_455_371_120_813,
];
const K15_WEIGHTS: [f64; 8] = [
    0.209_482_141_084_727_8,
    0.204_432_940_075_298_9,
    0.190_350_578_064_785_4,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_9,
    0.104_790_010_322_250_2,
    0.063_092_092_629_979_55,
    0.022_935_322_010_529_22,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let f0 = f(c);
    let mut k = K15_WEIGHTS[0] * f0;
    let mut g = G7_WEIGHTS[0] * f0;
    for i in 1..8 {
        let x = h * K15_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 0 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, err) = gk15(f, a, b);
    if err <= tol.max(1e-15 * v.abs()) || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` by adaptive Gauss–Kronrod 7/15, splitting first at every breakpoint inside `(a, b)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|p| *p > lo && *p < hi).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(inner);
    pts.push(hi);
    let n = (pts.len() - 1) as f64;
    sign * pts.windows(2).map(|w| adapt(&f, w[0], w[1], tol / n, 40)).sum::<f64>()
}

/// `A(t, ξ, k) = exp(-∫_0^t 2k² / (k² + (ξ - kτ)²) dτ)` by quadrature.
pub fn multiplier_a(t: f64, xi: f64, k: f64) -> f64 {
    let s = xi / k;
    let integral = integrate(|tau| 2.0 / (1.0 + (s - tau) * (s - tau)), 0.0, t, &[s], 1e-13);
    (-integral).exp()
}

/// `B(t, ξ, k) = exp(-∫_0^t 2 1_{|ξ/k - τ| <= C} / sqrt(1 + (ξ/k - τ)²) dτ)` by quadrature.
pub fn multiplier_b(t: f64, xi: f64, k: f64, cutoff: f64) -> f64 {
    let s = xi / k;
    let g = |tau: f64| {
        let d = s - tau;
        if d.abs() <= cutoff {
            2.0 / (1.0 + d * d).sqrt()
        } else {
            0.0
        }
    };
    let integral = integrate(g, 0.0, t, &[s - cutoff, s, s + cutoff], 1e-13);
    (-integral).exp()
}

/// Eigenvalues of a complex 2×2 matrix through nalgebra's Schur decomposition.
pub fn eigenvalues_2x2(m: [[Complex64; 2]; 2]) -> [Complex64; 2] {
    let c = |z: Complex64| NaComplex::new(z.re, z.im);
    let a = Matrix2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1]));
    // complex Schur form is upper triangular
    let ev = a.schur().eigenvalues().expect("triangular Schur form");
    [Complex64::new(ev[0].re, ev[0].im), Complex64::new(ev[1].re, ev[1].im)]
}

/// Real roots of `x² + b x + c` sorted ascending, or `None` for complex roots.
pub fn real_quadratic_roots(b: f64, c: f64) -> Option<(f64, f64)> {
    let m = nalgebra::Matrix2::new(0.0, -c, 1.0, -b);
    let ev = m.complex_eigenvalues();
    if ev[0].im.abs() > 1e-12 || ev[1].im.abs() > 1e-12 {
        return None;
    }
    let (x, y) = (ev[0].re, ev[1].re);
    Some(if x <= y { (x, y) } else { (y, x) })
}

/// Direct evaluation of `Σ_{k,j} c_{k,j} e^{i(kx + ξ_j y)}` for coefficients
/// given as `(k, ξ, c)`.
pub fn eval_series(coeffs: &[(i64, f64, Complex64)], x: f64, y: f64) -> Complex64 {
    coeffs.iter().map(|(k, xi, c)| c * Complex64::from_polar(1.0, *k as f64 * x + xi * y)).sum()
}

/// Coefficient of `e^{i(kx + ξy)}` in a function sampled on a uniform
/// `nx × ny` grid over `[0, 2π) × [0, ly)`, by a direct sum.
pub fn naive_coefficient<F: Fn(f64, f64) -> f64>(f: F, nx: usize, ny: usize, ly: f64, k: i64, xi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..nx {
        let x = 2.0 * std::f64::consts::PI * a as f64 / nx as f64;
        for b in 0..ny {
            let y = ly * b as f64 / ny as f64;
            acc += f(x, y) * Complex64::from_polar(1.0, -(k as f64 * x + xi * y));
        }
    }
    acc / (nx * ny) as f64
}

/// Composite trapezoid rule on samples `(t_i, f_i)`.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

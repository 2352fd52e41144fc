#![allow(dead_code)]

use critjac::recurrence::poly_eval;
use critjac::CoefficientModel;
use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_a^b f` by composite Gauss–Legendre.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(16);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        for &(x, w) in &rule {
            s += w * f(c + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// Largest entry of `|∫ P_j P_k weight - δ_jk|` for `j, k ≤ deg`.
pub fn orthonormality_defect(model: &CoefficientModel, weight: impl Fn(f64) -> f64, a: f64, b: f64, deg: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..=deg {
        for k in j..=deg {
            let g = integrate(
                |x| {
                    let p = poly_eval(model, Complex64::new(x, 0.0), deg);
                    p.value(j as i64).re * p.value(k as i64).re * weight(x)
                },
                a,
                b,
                400,
            );
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `count` integers spread logarithmically over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<usize> {
    (0..count)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

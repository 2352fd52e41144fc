//! Direct evaluation of the orthonormal polynomials, eigenvalues of truncated
//! matrices, and the closed-form large-`n` behaviour of `P_n`.

use crate::ansatz::{PhaseAccumulator, SpectralPoint};
use crate::coeffs::{CoefficientModel, CriticalParams};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::solutions::{step_up, varkappa, wronskian_weight};
use num_complex::Complex64;
use std::io::Write;

/// `P_n(z)` for `n ∈ [-1, N]`.
#[derive(Debug, Clone)]
pub struct PolynomialSequence {
    pub z: Complex64,
    values: Vec<LogComplex>,
}

impl PolynomialSequence {
    pub fn n_max(&self) -> usize {
        self.values.len() - 2
    }

    pub fn get(&self, n: i64) -> LogComplex {
        self.values[(n + 1) as usize]
    }

    pub fn value(&self, n: i64) -> Complex64 {
        self.get(n).to_complex()
    }

    pub fn values(&self) -> &[LogComplex] {
        &self.values
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,log_abs,phase")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{:.16e},{:.16e}", i as i64 - 1, v.ln_abs(), v.arg())?;
        }
        Ok(())
    }
}

/// Forward recurrence from `P_{-1} = 0`, `P_0 = 1`.
pub fn poly_eval(model: &CoefficientModel, z: Complex64, n_max: usize) -> PolynomialSequence {
    let mut values = Vec::with_capacity(n_max + 2);
    values.push(LogComplex::ZERO);
    values.push(LogComplex::ONE);
    for n in 0..n_max {
        let next = step_up(values[n], values[n + 1], n, z, model);
        values.push(next);
    }
    PolynomialSequence { z, values }
}

fn tridiagonal(model: &CoefficientModel, n: usize) -> (Vec<f64>, Vec<f64>) {
    let d = (0..n).map(|i| model.b(i)).collect();
    let e = (0..n.saturating_sub(1)).map(|i| model.a(i)).collect();
    (d, e)
}

fn matrix_norm(d: &[f64], e: &[f64]) -> f64 {
    (0..d.len())
        .map(|i| {
            let l = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let r = if i < e.len() { e[i].abs() } else { 0.0 };
            d[i].abs() + l + r
        })
        .fold(0.0, f64::max)
}

/// All eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    d
}

/// Number of eigenvalues below `x` (Sturm sequence).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
        q = diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of the `N×N` truncation, sorted.
pub fn truncated_matrix_eigs(model: &CoefficientModel, n: usize, k: usize) -> Vec<f64> {
    let (d, e) = tridiagonal(model, n);
    let mut all = tridiagonal_eigenvalues(&d, &e);
    all.truncate(k);
    all
}

/// Eigenvalues of the `N×N` truncation inside `[lo, hi]`, by bisection.
pub fn truncated_matrix_window(model: &CoefficientModel, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (d, e) = tridiagonal(model, n);
    // Sturm counts are backward stable, so resolve down to rounding of the matrix scale
    let tol = 16.0 * f64::EPSILON * matrix_norm(&d, &e).max(lo.abs()).max(hi.abs()).max(1.0);
    let c_lo = sturm_count(&d, &e, lo);
    let c_hi = sturm_count(&d, &e, hi);
    (c_lo..c_hi)
        .map(|k| {
            // k-th eigenvalue (0-based) lies where the count passes k+1
            let (mut a, mut b) = (lo, hi);
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(&d, &e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Oscillatory prediction for `P_n(λ)` on the absolutely continuous set.
pub struct AcPredictor {
    acc: PhaseAccumulator,
    kappa: f64,
    eta: f64,
    w: f64,
    gamma: f64,
    rho: f64,
}

impl AcPredictor {
    /// `n_start` must be the one used to compute `κ`, `η`.
    pub fn new(lambda: f64, kappa: f64, eta: f64, params: &CriticalParams, n_start: usize) -> Result<Self> {
        if !params.ac_set.contains(lambda) {
            return Err(Error::OutsideAC(lambda));
        }
        let w = wronskian_weight(lambda, params).map_err(|_| Error::OutsideAC(lambda))?;
        let acc = PhaseAccumulator::new(&SpectralPoint::plus(lambda), params, Some(n_start))?;
        Ok(AcPredictor { acc, kappa, eta, w, gamma: params.gamma, rho: params.rho })
    }

    /// `κ/w`, the envelope constant.
    pub fn envelope(&self) -> f64 {
        self.kappa / self.w
    }

    /// `κ w⁻¹ (-γ)^n n^{-ρ} sin(Φ_n - η)`.
    pub fn at(&mut self, n: usize) -> Result<f64> {
        let phi = self.acc.phi(n)?.re;
        let sign = if self.gamma > 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        Ok(sign * self.envelope() * (n as f64).powf(-self.rho) * (phi - self.eta).sin())
    }
}

pub fn poly_asymptotic_ac(
    n: usize,
    lambda: f64,
    kappa: f64,
    eta: f64,
    params: &CriticalParams,
    n_start: usize,
) -> Result<f64> {
    AcPredictor::new(lambda, kappa, eta, params, n_start)?.at(n)
}

/// `-iΩ (2ϰ(γz))^{-1} (-γ)^{n+1} n^{-ρ} e^{-iφ_n(γz)}` off the spectrum.
pub fn poly_asymptotic_regular(
    n: usize,
    zp: &SpectralPoint,
    omega: Complex64,
    params: &CriticalParams,
    n_start: usize,
) -> Result<LogComplex> {
    let zi = SpectralPoint::interior(zp.z);
    if zp.z.im == 0.0 && params.ac_set.closure_contains(zp.z.re) {
        return Err(Error::OnSpectrum(format!("{}", zp.z.re)));
    }
    let k = varkappa(&zi, params)?;
    let mut acc = PhaseAccumulator::new(&zi, params, Some(n_start))?;
    let phi = acc.phi(n)?;
    let x = n as f64;
    let mut v = LogComplex::exp(-Complex64::i() * phi) * LogComplex::from_real(x.powf(-params.rho));
    v = v * LogComplex::from(-Complex64::i() * omega / (2.0 * k));
    if params.gamma > 0.0 && (n + 1) % 2 == 1 {
        v = -v;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{classify, laguerre_model, power_model, reflect};
    use crate::solutions::{jost, JostOptions};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn low_degree_values() {
        let m = laguerre_model(0.0).unwrap();
        let p = poly_eval(&m, c(0.3, 0.2), 3);
        assert!(p.get(-1).is_zero());
        assert_eq!(p.value(0), c(1.0, 0.0));
        assert!((p.value(1) - c(-0.7, 0.2)).norm() < 1e-15);
        // leading coefficient: P_3(z)/z^3 -> 1/(a_0 a_1 a_2)
        let big = c(1e7, 0.0);
        let p3 = poly_eval(&m, big, 3).value(3) / (big * big * big);
        let lead = 1.0 / (m.a(0) * m.a(1) * m.a(2));
        assert!((p3.re - lead).abs() < 1e-6 * lead);
    }

    #[test]
    fn small_matrices() {
        let m = laguerre_model(0.0).unwrap();
        assert_eq!(truncated_matrix_eigs(&m, 1, 1), vec![1.0]);
        let e = truncated_matrix_eigs(&m, 2, 2);
        let s = 2f64.sqrt();
        assert!((e[0] - (2.0 - s)).abs() < 1e-14 && (e[1] - (2.0 + s)).abs() < 1e-14);
    }

    #[test]
    fn roots_match_eigenvalues() {
        let m = laguerre_model(0.5).unwrap();
        for n in [5usize, 20, 50] {
            let eig = truncated_matrix_eigs(&m, n, n);
            for w in eig.windows(2) {
                assert!(w[1] > w[0]);
            }
            let win = truncated_matrix_window(&m, n, -1.0, eig[n - 1] + 1.0);
            assert_eq!(win.len(), n);
            for (a, b) in eig.iter().zip(&win) {
                assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
            }
            // a root of P_N changes its sign
            for &x in &eig[..3] {
                let h = 1e-6 * x.abs().max(1.0);
                let lo = poly_eval(&m, c(x - h, 0.0), n).value(n as i64).re;
                let hi = poly_eval(&m, c(x + h, 0.0), n).value(n as i64).re;
                assert!(lo * hi < 0.0, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn interlacing() {
        let m = power_model(1.25, 0.0, -0.5, 1.0).unwrap();
        let a = truncated_matrix_eigs(&m, 30, 30);
        let b = truncated_matrix_eigs(&m, 31, 31);
        for i in 0..30 {
            assert!(b[i] <= a[i] && a[i] <= b[i + 1]);
        }
    }

    #[test]
    fn real_argument_gives_real_values() {
        let m = power_model(0.8, 0.2, 0.0, -1.0).unwrap();
        let p = poly_eval(&m, c(-0.4, 0.0), 2000);
        assert!(p.values().iter().all(|v| v.u.im == 0.0));
    }

    #[test]
    fn regular_prediction_matches() {
        let m = laguerre_model(0.0).unwrap();
        let params = classify(&m).unwrap();
        let zp = SpectralPoint::interior(c(-1.0, 0.0));
        let f = jost(&zp, &params, &m, &JostOptions { short: true, ..Default::default() }).unwrap();
        let om = -f.value(-1);
        let n = 10_000;
        let pred = poly_asymptotic_regular(n, &zp, om, &params, f.meta.n0).unwrap();
        let pred2 = poly_asymptotic_regular(2 * n, &zp, om, &params, f.meta.n0).unwrap();
        assert!(pred2.m > pred.m);
        let actual = poly_eval(&m, zp.z, n).get(n as i64);
        let ratio = (actual / pred).to_complex();
        assert!((ratio - 1.0).norm() < 0.02, "{ratio}");
        assert!(matches!(
            poly_asymptotic_regular(n, &SpectralPoint::plus(1.0), om, &params, 10),
            Err(Error::OnSpectrum(_))
        ));
    }

    #[test]
    fn ac_prediction_rejects_outside() {
        let m = laguerre_model(0.0).unwrap();
        let params = classify(&m).unwrap();
        assert!(matches!(
            poly_asymptotic_ac(100, -1.0, 1.0, 0.0, &params, 10),
            Err(Error::OutsideAC(_))
        ));
    }

    fn reflection_check(m: &CoefficientModel, z: Complex64) {
        let r = reflect(m);
        let p = poly_eval(m, -z, 1000);
        let q = poly_eval(&r, z, 1000);
        for n in 0..=1000i64 {
            let s = if n % 2 == 1 { -1.0 } else { 1.0 };
            let a = p.get(n);
            let b = q.get(n);
            assert!((a.m - b.m).abs() <= 1e-12 * a.m.abs().max(1.0), "n={n}");
            assert!((a.u * s - b.u).norm() <= 1e-12, "n={n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reflection_identity(re in -3.0f64..3.0, im in -2.0f64..2.0, pick in 0usize..3) {
            let m = match pick {
                0 => laguerre_model(0.0).unwrap(),
                1 => power_model(1.25, 0.0, -0.5, 1.0).unwrap(),
                _ => power_model(0.6, 0.3, 0.1, -1.0).unwrap(),
            };
            reflection_check(&m, c(re, im));
        }

        #[test]
        fn envelope_bound(n in 20usize..2000) {
            let m = laguerre_model(0.0).unwrap();
            let params = classify(&m).unwrap();
            let mut pr = AcPredictor::new(1.0, 1.3, 0.4, &params, 10).unwrap();
            let v = pr.at(n).unwrap();
            prop_assert!(v.abs() * (n as f64).powf(params.rho) <= pr.envelope() * (1.0 + 1e-12));
        }
    }
}

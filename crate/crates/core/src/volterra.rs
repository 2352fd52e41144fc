//! Discrete Volterra equation for the Jost correction `u_n`.
//!
//! With `f_n = 𝒜_n u_n` the recurrence becomes
//! `Λ_n(u_{n+1} - u_n) - (u_n - u_{n-1}) = ℛ_n u_n`, solved by one backward
//! sweep from `u_N = u_{N+1} = 1`.

use crate::ansatz::{b_ratio, remainder_from, PhaseAccumulator, SpectralPoint};
use crate::coeffs::{CoefficientModel, CriticalParams};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::io::Write;

/// `Λ_n = (a_n/a_{n-1}) ℬ_n ℬ_{n-1}` and `ℛ_n = -√(a_n/a_{n-1}) ℬ_{n-1} r_n`.
fn factors(
    n: usize,
    z: Complex64,
    th_prev: Complex64,
    th: Complex64,
    params: &CriticalParams,
    model: &CoefficientModel,
) -> (Complex64, Complex64) {
    let a0 = model.a(n - 1);
    let a1 = model.a(n);
    let bm = b_ratio(n - 1, th_prev, params);
    let bn = b_ratio(n, th, params);
    let r = remainder_from(n, z, th_prev, th, params, model);
    ((a1 / a0) * bn * bm, -(a1 / a0).sqrt() * bm * r)
}

pub fn kernel_factors(
    n: usize,
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
) -> Result<(Complex64, Complex64)> {
    if n < 2 {
        return Err(Error::InvalidParameter("kernel factors need n >= 2".into()));
    }
    let zeta = crate::ansatz::Zeta::of(zp, params)?;
    let tp = crate::ansatz::theta_at(n - 1, &zeta, params)?;
    let tn = crate::ansatz::theta_at(n, &zeta, params)?;
    Ok(factors(n, zp.z, tp, tn, params, model))
}

/// `Λ_n`, `ℛ_n` for `n ∈ [n0+1, N]`.
#[derive(Debug, Clone)]
pub struct Kernel {
    n0: usize,
    lambda: Vec<Complex64>,
    rcal: Vec<Complex64>,
    nu: f64,
    delta: f64,
}

impl Kernel {
    pub fn build(
        acc: &mut PhaseAccumulator,
        z: Complex64,
        model: &CoefficientModel,
        n_max: usize,
    ) -> Result<Kernel> {
        let n0 = acc.n_start();
        if n_max <= n0 {
            return Err(Error::InvalidParameter(format!("N = {n_max} must exceed n0 = {n0}")));
        }
        acc.extend_to(n_max + 1)?;
        let params = acc.params().clone();
        let len = n_max - n0;
        let mut lambda = Vec::with_capacity(len);
        let mut rcal = Vec::with_capacity(len);
        let mut th_prev = acc.theta(n0)?;
        for n in n0 + 1..=n_max {
            let th = acc.theta(n)?;
            let (l, r) = factors(n, z, th_prev, th, &params, model);
            lambda.push(l);
            rcal.push(r);
            th_prev = th;
        }
        Ok(Kernel { n0, lambda, rcal, nu: params.nu, delta: params.delta })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n_max(&self) -> usize {
        self.n0 + self.lambda.len()
    }

    pub fn lambda(&self, n: usize) -> Complex64 {
        self.lambda[n - self.n0 - 1]
    }

    pub fn rcal(&self, n: usize) -> Complex64 {
        self.rcal[n - self.n0 - 1]
    }

    /// `X_n = Λ_{n0+1}···Λ_n`.
    pub fn x_prod(&self, n: usize) -> LogComplex {
        let mut x = LogComplex::ONE;
        for k in self.n0 + 1..=n {
            x = x * LogComplex::from(self.lambda(k));
        }
        x
    }

    /// `G_{n,m} = X_{m-1} Σ_{p=n}^{m-1} X_p^{-1}`, from `G_{n,m+1} = Λ_m G_{n,m} + 1`.
    pub fn kernel_g(&self, n: usize, m: usize) -> LogComplex {
        assert!(m > n && n >= self.n0, "kernel_g needs n0 <= n < m");
        let mut g = LogComplex::ONE;
        for k in n + 1..m {
            g = (g * LogComplex::from(self.lambda(k))).add(&LogComplex::ONE);
        }
        g
    }

    /// `sup_{n0 <= n < m} |G_{n,m}|`.
    pub fn g_sup(&self, m: usize) -> f64 {
        let mut g = Complex64::one();
        let mut p = Complex64::one();
        let mut best = 1.0f64;
        for n in (self.n0..m - 1).rev() {
            p *= self.lambda(n + 1);
            g += p;
            best = best.max(g.norm());
        }
        best
    }

    /// Fits `ĥ_m = Ĉ m^{ν-δ}` over log-spaced samples of the window and
    /// returns the resulting tail majorant.
    pub fn tail(&self) -> TailBound {
        let exponent = self.nu - self.delta;
        let lo = self.n0 + 1;
        let hi = self.n_max();
        let mut samples: Vec<usize> = Vec::new();
        let count = 40usize;
        let ratio = (hi as f64 / lo as f64).max(1.0);
        for k in 0..=count {
            let m = (lo as f64 * ratio.powf(k as f64 / count as f64)).round() as usize;
            samples.push(m.clamp(lo, hi));
        }
        // the probe decade near the top is sampled densely
        let probe_lo = (hi / 10).max(lo);
        for k in 0..=20 {
            samples.push(probe_lo + (hi - probe_lo) * k / 20);
        }
        samples.sort_unstable();
        samples.dedup();
        let mut c: f64 = 0.0;
        for &m in &samples {
            let h = self.g_sup(m) * self.rcal(m).norm();
            c = c.max(h * (m as f64).powf(-exponent));
        }
        TailBound { c_hat: 2.0 * c, exponent }
    }
}

/// Majorant `ĥ_m = Ĉ m^{ν-δ}` and its tail sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub c_hat: f64,
    /// `ν - δ < -1`.
    pub exponent: f64,
}

impl TailBound {
    /// `H_n = Σ_{m>n} ĥ_m ≤ Ĉ n^{1+ν-δ}/(δ-ν-1)`.
    pub fn h(&self, n: usize) -> f64 {
        let s = -self.exponent - 1.0;
        self.c_hat * (n as f64).powf(-s) / s
    }

    /// Smallest `N` with `H_N <= tol`.
    pub fn required_n(&self, tol: f64) -> f64 {
        let s = -self.exponent - 1.0;
        if self.c_hat == 0.0 {
            return 1.0;
        }
        (self.c_hat / (tol * s)).powf(1.0 / s)
    }
}

pub fn tail_bound(
    n_max: usize,
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    n0: Option<usize>,
) -> Result<f64> {
    let mut acc = PhaseAccumulator::new(zp, params, n0)?;
    let k = Kernel::build(&mut acc, zp.z, model, n_max)?;
    Ok(k.tail().h(n_max))
}

#[derive(Debug, Clone)]
pub struct VolterraSolution {
    /// `u[k] = u_{n0+k}` for `n0 + k ∈ [n0, N]`.
    pub u: Vec<Complex64>,
    pub n0: usize,
    pub n_max: usize,
    pub tail: TailBound,
    /// `H_N`.
    pub tail_bound: f64,
    /// Largest relative difference-equation residual.
    pub residual: f64,
}

impl VolterraSolution {
    pub fn u(&self, n: usize) -> Complex64 {
        if n > self.n_max {
            Complex64::one()
        } else {
            self.u[n - self.n0]
        }
    }

    /// `|u_n - 1| <= e^{H_n} - 1`.
    pub fn bound(&self, n: usize) -> f64 {
        self.tail.h(n).exp_m1()
    }

    /// Certified distance to the untruncated solution at `n`: `H_N e^{H_n}`.
    pub fn truncation_error(&self, n: usize) -> f64 {
        self.tail_bound * self.tail.h(n).exp()
    }

    pub fn write_csv<W: Write>(&self, kernel: &Kernel, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,abs_u_minus_1,residual")?;
        for n in self.n0 + 1..=self.n_max {
            let res = de_residual(kernel, self, n);
            writeln!(w, "{},{:.16e},{:.16e}", n, (self.u(n) - 1.0).norm(), res)?;
        }
        Ok(())
    }
}

fn de_residual(k: &Kernel, s: &VolterraSolution, n: usize) -> f64 {
    let (um, u0, up) = (s.u(n - 1), s.u(n), s.u(n + 1));
    let r = k.lambda(n) * (up - u0) - (u0 - um) - k.rcal(n) * u0;
    r.norm() / u0.norm().max(1.0)
}

/// Backward sweep on a prepared kernel.
pub fn sweep(kernel: &Kernel) -> VolterraSolution {
    let n0 = kernel.n0;
    let n_max = kernel.n_max();
    let mut u = vec![Complex64::zero(); n_max - n0 + 1];
    u[n_max - n0] = Complex64::one();
    // β_n = X_n^{-1} Σ_{m>n} X_{m-1} ℛ_m u_m
    let mut beta = Complex64::zero();
    for n in (n0..n_max).rev() {
        let up = u[n + 1 - n0];
        beta = kernel.lambda(n + 1) * beta + kernel.rcal(n + 1) * up;
        u[n - n0] = up + beta;
    }
    let tail = kernel.tail();
    let mut sol = VolterraSolution {
        u,
        n0,
        n_max,
        tail,
        tail_bound: tail.h(n_max),
        residual: 0.0,
    };
    let mut res: f64 = 0.0;
    for n in n0 + 1..=n_max {
        res = res.max(de_residual(kernel, &sol, n));
    }
    sol.residual = res;
    sol
}

/// Chooses `N` so that the fitted `H_N` meets `tol`, within `[n_min, cap]`.
pub fn choose_truncation(
    acc: &mut PhaseAccumulator,
    z: Complex64,
    model: &CoefficientModel,
    tol: f64,
    cap: usize,
) -> Result<usize> {
    let n0 = acc.n_start();
    let trial = (64 * n0).max(4096).min(cap.max(n0 + 2));
    let k = Kernel::build(acc, z, model, trial)?;
    let need = k.tail().required_n(tol);
    let n = if need.is_finite() { need.ceil() as usize } else { cap };
    Ok(n.clamp(trial, cap.max(trial)))
}

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_CAP: usize = 1_000_000;

/// Solves on `[n0, N]` with the ansatz phases started at `n0`.
pub fn solve(
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    n0: usize,
    n_max: usize,
) -> Result<VolterraSolution> {
    let mut acc = PhaseAccumulator::new(zp, params, Some(n0))?;
    solve_with(&mut acc, zp.z, model, n_max)
}

pub fn solve_with(
    acc: &mut PhaseAccumulator,
    z: Complex64,
    model: &CoefficientModel,
    n_max: usize,
) -> Result<VolterraSolution> {
    let kernel = Kernel::build(acc, z, model, n_max)?;
    let sol = sweep(&kernel);
    if !(sol.tail_bound < 1.0) {
        return Err(Error::TruncationTooShort { n_max, bound: sol.tail_bound });
    }
    Ok(sol)
}

//! Jost solutions `f_n = 𝒜_n u_n`, the growing partner `g_n`, Wronskians and
//! the Jost function `Ω(z) = -a_{-1} f_{-1}(z)`.

use crate::ansatz::{sqrt_cut, PhaseAccumulator, Side, SpectralPoint, Zeta};
use crate::coeffs::{CoefficientModel, CriticalParams, Regime};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::volterra::{self, DEFAULT_CAP, DEFAULT_TOL};
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Jost,
    Growing,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WindowMeta {
    /// Start of the ansatz region (jost) or of the Σ-sum (growing).
    pub n0: usize,
    pub n_max: usize,
    /// Fitted `H_N` of the Volterra solve.
    pub tail_bound: f64,
    /// Certified truncation error of `u_{n0}`.
    pub truncation_error: f64,
    /// Difference-equation residual of the Volterra solve.
    pub residual: f64,
    /// Partial sums that lost more than 8 digits (growing solution).
    pub cancellations: usize,
    /// `|W[f,g] - 1|` re-checked at `n = 0` (growing solution).
    pub wronskian_check: f64,
}

/// Values at `n ∈ [-1, hi]` in LogComplex form.
#[derive(Debug, Clone)]
pub struct SolutionWindow {
    pub kind: WindowKind,
    pub zp: SpectralPoint,
    values: Vec<LogComplex>,
    pub meta: WindowMeta,
}

impl SolutionWindow {
    pub fn new(kind: WindowKind, zp: SpectralPoint, values: Vec<LogComplex>, meta: WindowMeta) -> Self {
        SolutionWindow { kind, zp, values, meta }
    }

    pub fn lo(&self) -> i64 {
        -1
    }

    pub fn hi(&self) -> i64 {
        self.values.len() as i64 - 2
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

    pub fn conj(&self) -> SolutionWindow {
        SolutionWindow {
            kind: self.kind,
            zp: self.zp.conj(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            meta: self.meta,
        }
    }

    /// Largest relative residual of `a_{n-1}F_{n-1} + (b_n - z)F_n + a_nF_{n+1}`.
    pub fn recurrence_residual(&self, model: &CoefficientModel, from: i64, to: i64) -> f64 {
        let z = self.zp.z;
        let mut worst: f64 = 0.0;
        for n in from.max(0)..to.min(self.hi()) {
            let t0 = self.get(n - 1).scale(Complex64::new(model.a_ext(n - 1), 0.0));
            let t1 = self.get(n).scale(model.b(n as usize) - z);
            let t2 = self.get(n + 1).scale(Complex64::new(model.a(n as usize), 0.0));
            let scale = t0.m.max(t1.m).max(t2.m);
            if scale == f64::NEG_INFINITY {
                continue;
            }
            let r = t0.scaled(scale) + t1.scaled(scale) + t2.scaled(scale);
            worst = worst.max(r.norm());
        }
        worst
    }

    pub fn write_csv<W: Write>(&self, mut w: W, from: i64, to: i64, step: usize) -> std::io::Result<()> {
        writeln!(w, "n,re,im,log_abs")?;
        let mut n = from.max(self.lo());
        while n <= to.min(self.hi()) {
            let v = self.get(n);
            let c = v.to_complex();
            writeln!(w, "{},{:.16e},{:.16e},{:.16e}", n, c.re, c.im, v.ln_abs())?;
            n += step.max(1) as i64;
        }
        Ok(())
    }
}

/// `F_{n-1}` from `F_n`, `F_{n+1}` with `a_{-1} = 1`.
pub fn step_down(fn0: LogComplex, fn1: LogComplex, n: usize, z: Complex64, model: &CoefficientModel) -> LogComplex {
    let s = fn0.m.max(fn1.m);
    if s == f64::NEG_INFINITY {
        return LogComplex::ZERO;
    }
    let v = ((z - model.b(n)) * fn0.scaled(s) - model.a(n) * fn1.scaled(s)) / model.a_ext(n as i64 - 1);
    let mut r = LogComplex::from_complex(v);
    if !r.is_zero() {
        r.m += s;
    }
    r
}

/// `F_{n+1}` from `F_{n-1}`, `F_n`.
pub fn step_up(fm1: LogComplex, fn0: LogComplex, n: usize, z: Complex64, model: &CoefficientModel) -> LogComplex {
    let s = fm1.m.max(fn0.m);
    if s == f64::NEG_INFINITY {
        return LogComplex::ZERO;
    }
    let v = ((z - model.b(n)) * fn0.scaled(s) - model.a_ext(n as i64 - 1) * fm1.scaled(s)) / model.a(n);
    let mut r = LogComplex::from_complex(v);
    if !r.is_zero() {
        r.m += s;
    }
    r
}

/// Truncation controls for the Jost construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JostOptions {
    pub n0: Option<usize>,
    pub n_max: Option<usize>,
    pub tol: f64,
    pub cap: usize,
    /// Keep only `n ∈ [-1, n0+1]`.
    pub short: bool,
}

impl Default for JostOptions {
    fn default() -> Self {
        JostOptions { n0: None, n_max: None, tol: DEFAULT_TOL, cap: DEFAULT_CAP, short: false }
    }
}

fn check_threshold(zp: &SpectralPoint, params: &CriticalParams) -> Result<()> {
    let zeta = zp.z * params.gamma;
    let hit = match params.regime {
        Regime::Unit => zeta == Complex64::new(params.tau, 0.0),
        Regime::Below => zeta == Complex64::new(0.0, 0.0),
        Regime::Above => false,
    };
    if hit {
        return Err(Error::BranchPoint { n: 0 });
    }
    Ok(())
}

pub fn jost(
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<SolutionWindow> {
    zp.validate(params)?;
    check_threshold(zp, params)?;
    if zp.needs_conjugation(params) {
        let mut w = jost(&zp.conj(), params, model, opts)?.conj();
        w.zp = *zp;
        return Ok(w);
    }
    let mut acc = PhaseAccumulator::new(zp, params, opts.n0)?;
    let n0 = acc.n_start();
    let n_max = match opts.n_max {
        Some(n) => n,
        None => volterra::choose_truncation(&mut acc, zp.z, model, opts.tol, opts.cap)?,
    };
    let sol = volterra::solve_with(&mut acc, zp.z, model, n_max)?;
    let keep_hi = if opts.short { n0 + 1 } else { n_max };
    let mut values = vec![LogComplex::ZERO; keep_hi + 2];
    for n in n0..=keep_hi {
        values[n + 1] = acc.ansatz(n)? * LogComplex::from(sol.u(n));
    }
    let mut f1 = values[n0 + 2];
    let mut f0 = values[n0 + 1];
    for n in (0..=n0).rev() {
        let fm = step_down(f0, f1, n, zp.z, model);
        values[n] = fm;
        f1 = f0;
        f0 = fm;
    }
    let meta = WindowMeta {
        n0,
        n_max,
        tail_bound: sol.tail_bound,
        truncation_error: sol.truncation_error(n0),
        residual: sol.residual,
        ..Default::default()
    };
    Ok(SolutionWindow::new(WindowKind::Jost, *zp, values, meta))
}

/// Running sum in LogComplex form with a compensation term in the sum's frame.
#[derive(Debug, Clone, Copy)]
struct CompensatedSum {
    sum: LogComplex,
    comp: Complex64,
}

impl CompensatedSum {
    fn new() -> Self {
        CompensatedSum { sum: LogComplex::ZERO, comp: Complex64::new(0.0, 0.0) }
    }

    /// Adds `t`; returns true when more than 8 digits cancelled.
    fn add(&mut self, t: LogComplex) -> bool {
        if self.sum.is_zero() {
            self.sum = t;
            self.comp = Complex64::new(0.0, 0.0);
            return false;
        }
        let frame = self.sum.m.max(t.m);
        let s = self.sum.scaled(frame);
        let c = self.comp * (self.sum.m - frame).exp();
        let y = t.scaled(frame) - c;
        let total = s + y;
        let comp = (total - s) - y;
        let before = s.norm().max(y.norm());
        let mut next = LogComplex::from_complex(total);
        if next.is_zero() {
            self.sum = LogComplex::ZERO;
            self.comp = Complex64::new(0.0, 0.0);
            return true;
        }
        let r = total.norm();
        next.m += frame;
        self.sum = next;
        self.comp = comp / r;
        r < 1e-8 * before
    }
}

/// Growing solution with `W[f, g] = 1`.
pub fn growing(
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    n0g: Option<usize>,
    opts: &JostOptions,
) -> Result<SolutionWindow> {
    if zp.z.im == 0.0 && params.ac_set.closure_contains(zp.z.re) {
        return Err(Error::OnSpectrum(format!("{}", zp.z.re)));
    }
    let zp = &SpectralPoint::interior(zp.z);
    let f = jost(zp, params, model, &JostOptions { short: false, ..*opts })?;
    let hi = f.hi();
    let mut start = n0g.unwrap_or(0) as i64;
    // f_m must not (nearly) vanish for m >= start - 1
    let near_zero = |m: i64| {
        let v = f.get(m).m;
        let left = if m > -1 { f.get(m - 1).m } else { v };
        let right = if m < hi { f.get(m + 1).m } else { v };
        f.get(m).is_zero() || v < left.max(right) - 8.0 * std::f64::consts::LN_10
    };
    let mut m = start - 1;
    while m < hi {
        if near_zero(m) {
            start = m + 2;
        }
        m += 1;
        if m > start + 64 {
            break;
        }
    }
    if start >= hi {
        return Err(Error::ZeroCrossing(start as usize));
    }
    let mut values = vec![LogComplex::ZERO; f.values.len()];
    let mut sum = CompensatedSum::new();
    let mut cancellations = 0usize;
    for m in start..=hi {
        let den = f.get(m - 1) * f.get(m) * LogComplex::from_real(model.a_ext(m - 1));
        if sum.add(den.inv()) {
            cancellations += 1;
        }
        values[(m + 1) as usize] = f.get(m) * sum.sum;
    }
    // below the sum start: g_n = -f_n Σ_{m=n+1}^{start-1} (a_{m-1} f_{m-1} f_m)^{-1},
    // which keeps W[f,g] = 1 exactly; the backward recurrence would amplify
    // the error of the subdominant g along f
    let f_ok = (-1..start).all(|m| !near_zero(m));
    if f_ok {
        let mut sum = CompensatedSum::new();
        values[start as usize] = LogComplex::ZERO;
        for n in (-1..start - 1).rev() {
            let m = n + 1;
            let den = f.get(m - 1) * f.get(m) * LogComplex::from_real(model.a_ext(m - 1));
            if sum.add(den.inv()) {
                cancellations += 1;
            }
            values[(n + 1) as usize] = -(f.get(n) * sum.sum);
        }
    } else {
        let mut g1 = values[(start + 1) as usize];
        let mut g0 = LogComplex::ZERO;
        for n in (0..start).rev() {
            let gm = step_down(g0, g1, n as usize, zp.z, model);
            values[n as usize] = gm;
            g1 = g0;
            g0 = gm;
        }
    }
    let w0 = {
        let a = f.get(0) * values[2];
        let b = f.get(1) * values[1];
        a.sub(&b).scale(Complex64::new(model.a(0), 0.0)).to_complex()
    };
    let meta = WindowMeta {
        n0: start as usize,
        cancellations,
        wronskian_check: (w0 - 1.0).norm(),
        ..f.meta
    };
    Ok(SolutionWindow::new(WindowKind::Growing, *zp, values, meta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WronskianReport {
    pub value: Complex64,
    /// `max_n |W_n - value|`.
    pub max_deviation: f64,
}

/// `a_n(F_n G_{n+1} - F_{n+1} G_n)` over the common window; median and spread.
pub fn wronskian(f: &SolutionWindow, g: &SolutionWindow, model: &CoefficientModel) -> Result<WronskianReport> {
    if f.zp.z != g.zp.z {
        return Err(Error::WindowMismatch(format!(
            "spectral parameters differ: {} vs {}",
            f.zp.z, g.zp.z
        )));
    }
    let hi = f.hi().min(g.hi());
    if hi < 0 {
        return Err(Error::WindowMismatch("windows do not overlap".into()));
    }
    let mut ws = Vec::with_capacity((hi + 1) as usize);
    for n in -1..hi {
        let a = LogComplex::from_real(model.a_ext(n));
        let w = (f.get(n) * g.get(n + 1)).sub(&(f.get(n + 1) * g.get(n))) * a;
        ws.push(w.to_complex());
    }
    let mut re: Vec<f64> = ws.iter().map(|w| w.re).collect();
    let mut im: Vec<f64> = ws.iter().map(|w| w.im).collect();
    re.sort_by(|a, b| a.total_cmp(b));
    im.sort_by(|a, b| a.total_cmp(b));
    let value = Complex64::new(re[re.len() / 2], im[im.len() / 2]);
    let max_deviation = ws.iter().map(|w| (w - value).norm()).fold(0.0, f64::max);
    Ok(WronskianReport { value, max_deviation })
}

/// `Ω(z)` in LogComplex form.
pub fn omega_log(
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<LogComplex> {
    let f = jost(zp, params, model, &JostOptions { short: true, ..*opts })?;
    Ok(-f.get(-1))
}

/// `Ω(z) = -a_{-1} f_{-1}(z) = W[P(z), f(z)]`.
pub fn omega(
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<Complex64> {
    Ok(omega_log(zp, params, model, opts)?.to_complex())
}

/// `ϰ(γz)`, the coefficient in `θ_n ≈ ϰ n^{-ν}`.
pub fn varkappa(zp: &SpectralPoint, params: &CriticalParams) -> Result<Complex64> {
    zp.validate(params)?;
    if zp.is_boundary() && !params.ac_set.contains(zp.z.re) {
        return Err(Error::OutsideDomain(format!(
            "boundary value at {} requested outside the absolutely continuous set",
            zp.z.re
        )));
    }
    let zeta = Zeta::of(zp, params)?;
    let side = if zeta.boundary { Side::Plus } else { Side::Interior };
    let tau = params.tau;
    let root = match params.regime {
        Regime::Above => {
            let r = tau.abs().sqrt();
            if tau > 0.0 {
                return Ok(Complex64::new(0.0, r));
            }
            let up = if zeta.boundary { !zeta.lower } else { zeta.value.im >= 0.0 };
            return Ok(Complex64::new(if up { r } else { -r }, 0.0));
        }
        Regime::Unit => sqrt_cut(zeta.value - tau, side),
        Regime::Below => sqrt_cut(zeta.value, side),
    }
    .map_err(|_| Error::OutsideDomain(format!("threshold point {}", zp.z)))?;
    Ok(if zeta.lower { -root.conj() } else { root })
}

/// `w(λ) = γ ϰ(γ(λ + i0)) > 0` on the absolutely continuous set.
pub fn wronskian_weight(lambda: f64, params: &CriticalParams) -> Result<f64> {
    let k = varkappa(&SpectralPoint::plus(lambda), params)?;
    let w = params.gamma * k.re;
    if !(w > 0.0) {
        return Err(Error::OutsideDomain(format!("w({lambda}) = {w} is not positive")));
    }
    Ok(w)
}

//! Spectral data: classification, absolutely continuous density, resolvent
//! matrix elements and isolated eigenvalues.

use crate::ansatz::{default_n_start, SpectralPoint};
use crate::coeffs::{AcSet, CoefficientModel, CriticalParams, Regime};
use crate::error::{Error, Result};
use crate::recurrence::{poly_eval, truncated_matrix_window};
use crate::solutions::{jost, omega_log, wronskian_weight, JostOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumClass {
    pub ac: AcSet,
    pub ac_interval: String,
    pub discrete_region: String,
    pub whole_line_ac: bool,
    pub all_discrete: bool,
    /// Which growth/balance case decided the picture.
    pub case: String,
}

pub fn classify_spectrum(params: &CriticalParams) -> SpectrumClass {
    let ac = params.ac_set;
    let (discrete_region, case) = match (params.regime, ac) {
        (Regime::Above, AcSet::WholeLine) => (
            "none".to_string(),
            "sigma in (1,3/2], tau < 0: absolutely continuous on the whole line".to_string(),
        ),
        (Regime::Above, _) => (
            "(-inf,inf)".to_string(),
            "sigma in (1,3/2], tau > 0: purely discrete".to_string(),
        ),
        (Regime::Unit, _) => (
            complement(&ac),
            "sigma = 1: absolutely continuous on gamma*(tau,inf), discrete below the threshold".to_string(),
        ),
        (Regime::Below, _) => (
            complement(&ac),
            "sigma in (0,1): absolutely continuous on gamma*(0,inf), discrete on the other side".to_string(),
        ),
    };
    SpectrumClass {
        ac,
        ac_interval: ac.describe(),
        discrete_region,
        whole_line_ac: ac == AcSet::WholeLine,
        all_discrete: ac == AcSet::Empty,
        case,
    }
}

fn complement(ac: &AcSet) -> String {
    match *ac {
        AcSet::HalfLine { threshold, upward: true } => format!("(-inf,{threshold})"),
        AcSet::HalfLine { threshold, upward: false } => format!("({threshold},inf)"),
        AcSet::WholeLine => "none".into(),
        AcSet::Empty => "(-inf,inf)".into(),
    }
}

/// Half-width of the excluded band around a threshold.
pub fn guard_band(threshold: f64) -> f64 {
    1e-3 * threshold.abs().max(1.0)
}

/// `λ` must lie in the open a.c. set and outside the threshold guard band.
pub fn check_ac_point(lambda: f64, params: &CriticalParams) -> Result<()> {
    if let Some(t) = params.ac_set.threshold() {
        if (lambda - t).abs() < guard_band(t) {
            return Err(Error::ThresholdPoint(lambda));
        }
    }
    if !lambda.is_finite() || !params.ac_set.contains(lambda) {
        return Err(Error::OutsideAC(lambda));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudePhase {
    /// `|Ω(λ+i0)|`.
    pub kappa: f64,
    /// `arg Ω(λ+i0)`, principal branch until unwrapped.
    pub eta: f64,
    /// Phase origin of the Jost solution used for `Ω`.
    pub n_start: usize,
    /// `|c|` where the truncated solution is `c` times the normalised one.
    pub norm_correction: f64,
}

/// `Ω(λ+i0)` for the Jost solution rescaled so that its boundary Wronskian
/// `W[f(λ+i0), f(λ-i0)]` equals `2iw(λ)`.
///
/// Truncating the Volterra sum at `N` mostly rescales `f` (the solution is
/// pinned to `u_N = 1` instead of `u_∞(N)`); the Wronskian sees the same
/// factor, so dividing it out removes the slowly decaying part of the error.
pub fn amplitude_phase(
    lambda: f64,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<AmplitudePhase> {
    check_ac_point(lambda, params)?;
    let f = jost(&SpectralPoint::plus(lambda), params, model, &JostOptions { short: true, ..*opts })?;
    let w = wronskian_weight(lambda, params)?;
    // W_{-1}[f, conj f] = 2i Im(f_{-1} conj(f_0)) with a_{-1} = 1
    let (fm, f0) = (f.get(-1), f.get(0));
    let scale = fm.m.max(f0.m);
    let im = (fm.scaled(scale) * f0.scaled(scale).conj()).im;
    let c2 = im / w;
    if !(c2 > 0.0) {
        return Err(Error::OutsideDomain(format!("boundary Wronskian at {lambda} is not positive")));
    }
    // |c|² in absolute terms is c2·e^{2·scale}
    let log_c = 0.5 * c2.ln() + scale;
    let om = -fm;
    Ok(AmplitudePhase {
        kappa: (om.m - log_c).exp(),
        eta: om.arg(),
        n_start: f.meta.n0,
        norm_correction: log_c.exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensitySample {
    pub lambda: f64,
    pub xi: f64,
    pub kappa: f64,
    pub eta: f64,
    pub w: f64,
}

impl DensitySample {
    /// `(π w ξ)^{-1/2}`, which equals `κ`.
    pub fn amplitude_from_density(&self) -> f64 {
        (PI * self.w * self.xi).sqrt().recip()
    }
}

/// `ξ(λ) = w(λ) / (π |Ω(λ+i0)|²)` with `W[f(λ+i0), f(λ-i0)] = 2i w(λ)`.
pub fn density(
    lambda: f64,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<DensitySample> {
    check_ac_point(lambda, params)?;
    let w = wronskian_weight(lambda, params)?;
    let ap = amplitude_phase(lambda, params, model, opts)?;
    let xi = w / (PI * ap.kappa * ap.kappa);
    Ok(DensitySample { lambda, xi, kappa: ap.kappa, eta: ap.eta, w })
}

/// Densities on a grid, in grid order, with `η` continued along the sweep.
pub fn density_sweep(
    lambdas: &[f64],
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Vec<Result<DensitySample>> {
    let mut out: Vec<Result<DensitySample>> =
        lambdas.par_iter().map(|&l| density(l, params, model, opts)).collect();
    unwrap_phases(&mut out);
    out
}

/// Nearest-branch continuation of `η` across consecutive successful samples.
pub fn unwrap_phases(samples: &mut [Result<DensitySample>]) {
    let mut prev: Option<f64> = None;
    for s in samples.iter_mut() {
        match s {
            Ok(d) => {
                if let Some(p) = prev {
                    d.eta += 2.0 * PI * ((p - d.eta) / (2.0 * PI)).round();
                }
                prev = Some(d.eta);
            }
            Err(_) => prev = None,
        }
    }
}

/// `⟨R(z)e_n, e_m⟩ = Ω(z)^{-1} P_{min}(z) f_{max}(z)`.
pub fn resolvent_element(
    n: usize,
    m: usize,
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<Complex64> {
    let (lo, hi) = (n.min(m), n.max(m));
    if zp.is_boundary() {
        check_ac_point(zp.z.re, params)?;
    }
    let mut f = jost(zp, params, model, &JostOptions { short: true, ..*opts })?;
    if hi as i64 > f.hi() {
        f = jost(zp, params, model, &JostOptions { short: false, ..*opts })?;
        if hi as i64 > f.hi() {
            return Err(Error::InvalidParameter(format!(
                "index {hi} beyond the solution window ({})",
                f.hi()
            )));
        }
    }
    let om = -f.get(-1);
    let scale = f.get(0).m.max(f.get(1).m);
    if om.is_zero() || (zp.z.im == 0.0 && om.m < scale - 30.0 * std::f64::consts::LN_10) {
        return Err(Error::EigenvalueHit(format!("{}", zp.z)));
    }
    let p = poly_eval(model, zp.z, lo).get(lo as i64);
    Ok((p * f.get(hi as i64) / om).to_complex())
}

/// `d⟨E(λ)e_n, e_m⟩/dλ = ξ(λ) P_n(λ) P_m(λ)`.
pub fn projector_density(
    n: usize,
    m: usize,
    lambda: f64,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<f64> {
    let d = density(lambda, params, model, opts)?;
    let p = poly_eval(model, Complex64::new(lambda, 0.0), n.max(m));
    Ok(d.xi * p.value(n as i64).re * p.value(m as i64).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Scan step; `None` uses 1/200 of the interval.
    pub grid_step: Option<f64>,
    /// How many times a cell may be split when the matrix count disagrees.
    pub max_refine: usize,
    pub jost: JostOptions,
    /// Starting size of the truncated-matrix oracle.
    pub matrix_n: usize,
    pub matrix_cap: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            grid_step: None,
            max_refine: 6,
            jost: JostOptions::default(),
            matrix_n: 256,
            matrix_cap: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenMatch {
    pub omega_zero: f64,
    pub matrix: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenReport {
    pub lo: f64,
    pub hi: f64,
    pub eigenvalues: Vec<EigenMatch>,
    pub matrix_n: usize,
    pub max_deviation: f64,
}

/// Sign of the (real) Jost function at real `λ`.
fn omega_sign(lambda: f64, params: &CriticalParams, model: &CoefficientModel, opts: &JostOptions) -> Result<f64> {
    let zp = SpectralPoint::interior(Complex64::new(lambda, 0.0));
    // the power-law tail majorant ignores the exponential decay off the
    // spectrum; a moderate window already fixes the sign
    let n0 = match opts.n0 {
        Some(n) => n,
        None => default_n_start(&zp, params)?,
    };
    let n_max = opts.n_max.unwrap_or((64 * n0).max(8192));
    let opts = JostOptions { n0: Some(n0), n_max: Some(n_max), ..*opts };
    let om = omega_log(&zp, params, model, &opts)?;
    if om.is_zero() {
        return Ok(0.0);
    }
    Ok(om.u.re.signum())
}

/// Truncated-matrix eigenvalues in `[lo, hi]`, doubling `N` until they settle.
pub fn matrix_oracle(model: &CoefficientModel, lo: f64, hi: f64, start: usize, cap: usize) -> (Vec<f64>, usize) {
    let mut n = start.max(8);
    let mut prev = truncated_matrix_window(model, n, lo, hi);
    while n < cap {
        n *= 2;
        let next = truncated_matrix_window(model, n, lo, hi);
        let settled = next.len() == prev.len()
            && next.iter().zip(&prev).all(|(a, b)| (a - b).abs() < 1e-8);
        prev = next;
        if settled {
            break;
        }
    }
    (prev, n)
}

fn bisect(
    mut a: f64,
    mut b: f64,
    mut sa: f64,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &JostOptions,
) -> Result<f64> {
    while b - a > 1e-10 {
        let mid = 0.5 * (a + b);
        let sm = omega_sign(mid, params, model, opts)?;
        if sm == 0.0 {
            return Ok(mid);
        }
        if sm == sa {
            a = mid;
            sa = sm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Zeros of `Ω` in `[lo, hi]`, each paired with a truncated-matrix eigenvalue.
pub fn discrete_eigenvalues(
    lo: f64,
    hi: f64,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &EigenOptions,
) -> Result<EigenReport> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}]")));
    }
    if params.ac_set.meets(lo, hi) {
        return Err(Error::OverlapsAC(lo, hi));
    }
    let (matrix, matrix_n) = matrix_oracle(model, lo, hi, opts.matrix_n, opts.matrix_cap);
    let step = opts.grid_step.unwrap_or((hi - lo) / 200.0);
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=cells).map(|i| if i == cells { hi } else { lo + i as f64 * step }).collect();
    let signs: Vec<f64> = grid
        .par_iter()
        .map(|&l| omega_sign(l, params, model, &opts.jost))
        .collect::<Result<_>>()?;
    let mut zeros = Vec::new();
    for i in 0..cells {
        scan_cell(grid[i], grid[i + 1], signs[i], signs[i + 1], &matrix, opts.max_refine, params, model, opts, &mut zeros)?;
    }
    if zeros.len() != matrix.len() {
        return Err(Error::RefineGrid { lo, hi, expected: matrix.len(), found: zeros.len() });
    }
    let eigenvalues: Vec<EigenMatch> = zeros
        .iter()
        .zip(&matrix)
        .map(|(&z, &m)| EigenMatch { omega_zero: z, matrix: m, deviation: (z - m).abs() })
        .collect();
    let max_deviation = eigenvalues.iter().map(|e| e.deviation).fold(0.0, f64::max);
    Ok(EigenReport { lo, hi, eigenvalues, matrix_n, max_deviation })
}

#[allow(clippy::too_many_arguments)]
fn scan_cell(
    a: f64,
    b: f64,
    sa: f64,
    sb: f64,
    matrix: &[f64],
    depth: usize,
    params: &CriticalParams,
    model: &CoefficientModel,
    opts: &EigenOptions,
    zeros: &mut Vec<f64>,
) -> Result<()> {
    // half-open cells, so a value on a grid node is counted once
    let expected = matrix.iter().filter(|&&x| x >= a && x < b).count();
    if sa == 0.0 {
        zeros.push(a);
    }
    let change = sa != 0.0 && sb != 0.0 && sa != sb;
    let found = usize::from(change) + usize::from(sa == 0.0);
    let near_edge = matrix.iter().any(|&x| (x - a).abs() < 1e-6 || (x - b).abs() < 1e-6);
    if expected == found || (near_edge && expected.abs_diff(found) <= 1) {
        if change {
            zeros.push(bisect(a, b, sa, params, model, &opts.jost)?);
        }
        return Ok(());
    }
    if depth == 0 {
        return Err(Error::RefineGrid { lo: a, hi: b, expected, found });
    }
    if sa == 0.0 {
        zeros.pop();
    }
    let parts = 8;
    let h = (b - a) / parts as f64;
    let pts: Vec<f64> = (0..=parts).map(|i| if i == parts { b } else { a + i as f64 * h }).collect();
    let mut ss = vec![sa];
    for &p in &pts[1..parts] {
        ss.push(omega_sign(p, params, model, &opts.jost)?);
    }
    ss.push(sb);
    for i in 0..parts {
        scan_cell(pts[i], pts[i + 1], ss[i], ss[i + 1], matrix, depth - 1, params, model, opts, zeros)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{classify, laguerre_model, power_model};
    use crate::recurrence::AcPredictor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classification_cases() {
        let p = classify(&power_model(1.25, 0.0, -0.875, 1.0).unwrap()).unwrap();
        assert_eq!(p.tau, -0.5);
        assert!(classify_spectrum(&p).whole_line_ac);
        let p = classify(&power_model(1.25, 0.0, -0.375, 1.0).unwrap()).unwrap();
        assert!(classify_spectrum(&p).all_discrete);
        let p = classify(&power_model(1.0, 0.0, -0.35, -1.0).unwrap()).unwrap();
        assert!((p.tau - 0.3).abs() < 1e-15);
        let s = classify_spectrum(&p);
        assert!(s.ac_interval.starts_with("(-inf,-0.3"));
    }

    #[test]
    fn guard_band_and_domain() {
        let m = laguerre_model(0.0).unwrap();
        let p = classify(&m).unwrap();
        let o = JostOptions::default();
        assert!(matches!(density(0.0005, &p, &m, &o), Err(Error::ThresholdPoint(_))));
        assert!(matches!(density(-1.0, &p, &m, &o), Err(Error::OutsideAC(_))));
    }

    #[test]
    fn laguerre_density_at_one() {
        let m = laguerre_model(0.0).unwrap();
        let p = classify(&m).unwrap();
        let d = density(1.0, &p, &m, &JostOptions::default()).unwrap();
        assert!((d.xi - (-1f64).exp()).abs() < 1e-2 * d.xi, "{d:?}");
        assert!((d.amplitude_from_density() - d.kappa).abs() < 1e-12 * d.kappa);
        let pd = projector_density(0, 0, 1.0, &p, &m, &JostOptions::default()).unwrap();
        assert_eq!(pd, d.xi);
        let a = projector_density(2, 5, 1.0, &p, &m, &JostOptions::default()).unwrap();
        let b = projector_density(5, 2, 1.0, &p, &m, &JostOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oscillation_law_matches_recurrence() {
        let m = laguerre_model(0.0).unwrap();
        let p = classify(&m).unwrap();
        let ap = amplitude_phase(1.0, &p, &m, &JostOptions::default()).unwrap();
        let mut pred = AcPredictor::new(1.0, ap.kappa, ap.eta, &p, ap.n_start).unwrap();
        let poly = poly_eval(&m, c(1.0, 0.0), 5050);
        for n in 5000..5050 {
            let env = pred.envelope() * (n as f64).powf(-p.rho);
            let diff = (poly.value(n as i64).re - pred.at(n).unwrap()).abs();
            assert!(diff < 0.05 * env, "n={n}");
        }
    }

    #[test]
    fn resolvent_symmetry_and_sign() {
        let m = laguerre_model(0.0).unwrap();
        let p = classify(&m).unwrap();
        let o = JostOptions { n_max: Some(50_000), ..Default::default() };
        for z in [c(1.0, 0.5), c(-2.0, 1.0), c(3.0, -0.2)] {
            let zp = SpectralPoint::interior(z);
            let r00 = resolvent_element(0, 0, &zp, &p, &m, &o).unwrap();
            assert!(r00.im * z.im > 0.0);
            let a = resolvent_element(2, 7, &zp, &p, &m, &o).unwrap();
            let b = resolvent_element(7, 2, &zp, &p, &m, &o).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn eta_unwrapping_is_continuous() {
        let mut v: Vec<Result<DensitySample>> = [3.0, -3.0, 3.1, -2.9]
            .iter()
            .map(|&e| Ok(DensitySample { lambda: 0.0, xi: 1.0, kappa: 1.0, eta: e, w: 1.0 }))
            .collect();
        unwrap_phases(&mut v);
        let etas: Vec<f64> = v.iter().map(|d| d.as_ref().unwrap().eta).collect();
        for w in etas.windows(2) {
            assert!((w[1] - w[0]).abs() < PI);
        }
    }

    #[test]
    fn no_negative_laguerre_eigenvalues() {
        let m = laguerre_model(0.0).unwrap();
        let p = classify(&m).unwrap();
        let r = discrete_eigenvalues(-10.0, -0.1, &p, &m, &EigenOptions::default()).unwrap();
        assert!(r.eigenvalues.is_empty());
        assert!(matches!(
            discrete_eigenvalues(-1.0, 1.0, &p, &m, &EigenOptions::default()),
            Err(Error::OverlapsAC(..))
        ));
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let m = power_model(1.25, 0.0, -0.375, 1.0).unwrap();
        let p = classify(&m).unwrap();
        let eig = crate::recurrence::truncated_matrix_eigs(&m, 400, 3);
        let (lo, hi) = (eig[0] - 0.01, eig[1] + 0.01);
        let opts = EigenOptions { grid_step: Some(hi - lo), max_refine: 0, ..Default::default() };
        assert!(matches!(
            discrete_eigenvalues(lo, hi, &p, &m, &opts),
            Err(Error::RefineGrid { expected: 2, .. })
        ));
        let opts = EigenOptions { grid_step: Some(hi - lo), ..Default::default() };
        let r = discrete_eigenvalues(lo, hi, &p, &m, &opts).unwrap();
        assert_eq!(r.eigenvalues.len(), 2);
        assert!(r.max_deviation < 1e-6, "{r:?}");
    }
}

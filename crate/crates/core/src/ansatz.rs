//! The approximate solution `𝒜_n(z) = (-γ)^n n^{-ρ} e^{iφ_n(γz)}`.
//!
//! Square roots live on the branch `Im √t > 0` of `ℂ \ [0, ∞)`. Boundary
//! values on the cut are the limits from above; limits from below come from
//! conjugation.

use crate::coeffs::{CoefficientModel, CriticalParams, Regime};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `λ + i0`.
    Plus,
    /// `λ - i0`.
    Minus,
    Interior,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
            Side::Interior => Side::Interior,
        }
    }
}

/// A spectral parameter together with the side from which the real axis is approached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub side: Side,
}

impl SpectralPoint {
    pub fn interior(z: Complex64) -> Self {
        SpectralPoint { z, side: Side::Interior }
    }

    pub fn plus(lambda: f64) -> Self {
        SpectralPoint { z: Complex64::new(lambda, 0.0), side: Side::Plus }
    }

    pub fn minus(lambda: f64) -> Self {
        SpectralPoint { z: Complex64::new(lambda, 0.0), side: Side::Minus }
    }

    pub fn conj(&self) -> Self {
        SpectralPoint { z: self.z.conj(), side: self.side.flipped() }
    }

    pub fn is_boundary(&self) -> bool {
        self.side != Side::Interior
    }

    pub fn validate(&self, params: &CriticalParams) -> Result<()> {
        if !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite z".into()));
        }
        match self.side {
            Side::Plus | Side::Minus if self.z.im != 0.0 => Err(Error::InvalidParameter(
                "boundary side requires a real spectral parameter".into(),
            )),
            Side::Interior if self.z.im == 0.0 && params.ac_set.closure_contains(self.z.re) => {
                Err(Error::OnSpectrum(format!("{}", self.z.re)))
            }
            _ => Ok(()),
        }
    }

    /// Whether the phase variable `γz` sits on the lower rim of the cut, in
    /// which case values are conjugates of the upper-rim computation.
    pub fn needs_conjugation(&self, params: &CriticalParams) -> bool {
        match self.side {
            Side::Interior => false,
            Side::Plus => params.gamma < 0.0,
            Side::Minus => params.gamma > 0.0,
        }
    }
}

/// The phase variable `ζ = γz` and whether it lies on the lower rim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta {
    pub value: Complex64,
    pub lower: bool,
    pub boundary: bool,
}

impl Zeta {
    pub fn of(zp: &SpectralPoint, params: &CriticalParams) -> Result<Zeta> {
        zp.validate(params)?;
        Ok(Zeta {
            value: zp.z * params.gamma,
            lower: zp.needs_conjugation(params),
            boundary: zp.is_boundary(),
        })
    }
}

/// Root with `Im ≥ 0`. On the cut `t > 0` the boundary value from above is
/// returned; an interior point cannot sit on the cut.
pub fn sqrt_cut(t: Complex64, side: Side) -> Result<Complex64> {
    if t.re == 0.0 && t.im == 0.0 {
        return Err(Error::BranchPoint { n: 0 });
    }
    if t.im == 0.0 && t.re > 0.0 {
        if side == Side::Interior {
            return Err(Error::OutsideDomain(format!("interior point {t} lies on the cut")));
        }
        return Ok(Complex64::new(t.re.sqrt(), 0.0));
    }
    if t.im == 0.0 {
        return Ok(Complex64::new(0.0, (-t.re).sqrt()));
    }
    let s = t.sqrt();
    Ok(if s.im < 0.0 { -s } else { s })
}

/// `a_k = 2(-1)^{k+1}/(2k)!`, the coefficients of `2(1 - cos θ)` in `θ^{2k}`.
pub fn eikonal_a(k: usize) -> BigRational {
    let mut f = BigInt::one();
    for j in 1..=(2 * k) {
        f *= BigInt::from(j);
    }
    let num = if k % 2 == 1 { BigInt::from(2) } else { BigInt::from(-2) };
    BigRational::new(num, f)
}

type Poly = Vec<BigRational>;

fn poly_mul(a: &Poly, b: &Poly, deg: usize) -> Poly {
    let mut out = vec![BigRational::zero(); deg + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j > deg {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact `p_2..p_L` such that `θ² = t + Σ p_l t^l` solves the eikonal
/// equation `2(1 - cos θ) = t` up to `O(t^{L+1})`.
pub fn eikonal_coefficients(l: usize) -> Vec<BigRational> {
    let deg = l.max(1);
    let mut p: Poly = vec![BigRational::zero(); deg + 1];
    for k in 2..=l {
        // Q = P + Σ_{j<k} a_j (P + t)^j, truncated at t^k
        let mut s = p.clone();
        s[1] += BigRational::one();
        let mut q = p.clone();
        let mut pow = s.clone();
        for j in 2..k {
            pow = poly_mul(&pow, &s, k);
            let a = eikonal_a(j);
            for (c, v) in q.iter_mut().zip(pow.iter()) {
                *c += &a * v;
            }
        }
        p[k] = -eikonal_a(k) - &q[k];
    }
    p.into_iter().skip(2).take(l.saturating_sub(1)).collect()
}

/// Eikonal coefficients as a JSON array of fraction strings.
pub fn eikonal_json(l: usize) -> String {
    let v: Vec<String> = eikonal_coefficients(l).iter().map(|r| r.to_string()).collect();
    serde_json::to_string(&v).expect("strings serialise")
}

/// `t_n = -τ/n + γz n^{-σ}`.
pub fn t_seq(n: usize, zp: &SpectralPoint, params: &CriticalParams) -> Complex64 {
    t_at(n, zp.z * params.gamma, params)
}

fn t_at(n: usize, zeta: Complex64, params: &CriticalParams) -> Complex64 {
    let x = n as f64;
    -params.tau / x + zeta * x.powf(-params.sigma)
}

/// `θ_n` at the phase variable `ζ`.
pub fn theta_at(n: usize, zeta: &Zeta, params: &CriticalParams) -> Result<Complex64> {
    let side = if zeta.boundary { Side::Plus } else { Side::Interior };
    let root = if params.regime == Regime::Unit {
        sqrt_cut(zeta.value - params.tau, side).map_err(|e| relabel(e, n))? / (n as f64).sqrt()
    } else {
        let t = t_at(n, zeta.value, params);
        let mut big_t = Complex64::zero();
        for p in params.p.iter().rev() {
            big_t = (big_t + p) * t;
        }
        big_t = (big_t + 1.0) * t;
        sqrt_cut(big_t, side).map_err(|e| relabel(e, n))?
    };
    Ok(if zeta.lower { -root.conj() } else { root })
}

fn relabel(e: Error, n: usize) -> Error {
    match e {
        Error::BranchPoint { .. } => Error::BranchPoint { n },
        other => other,
    }
}

pub fn theta(n: usize, zp: &SpectralPoint, params: &CriticalParams) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter("theta needs n >= 1".into()));
    }
    theta_at(n, &Zeta::of(zp, params)?, params)
}

/// `ℬ_n = 𝒜_{n+1}/𝒜_n = -γ (n/(n+1))^ρ e^{iθ_n}`.
pub fn b_ratio(n: usize, theta_n: Complex64, params: &CriticalParams) -> Complex64 {
    let q = (-params.rho * (1.0 / n as f64).ln_1p()).exp();
    (Complex64::i() * theta_n).exp() * (-params.gamma * q)
}

/// Relative remainder from the ratio form, given `θ_{n-1}` and `θ_n`.
pub fn remainder_from(
    n: usize,
    z: Complex64,
    theta_prev: Complex64,
    theta_n: Complex64,
    params: &CriticalParams,
    model: &CoefficientModel,
) -> Complex64 {
    let a0 = model.a(n - 1);
    let a1 = model.a(n);
    let bm = b_ratio(n - 1, theta_prev, params);
    let bn = b_ratio(n, theta_n, params);
    (a0 / a1).sqrt() / bm + (a1 / a0).sqrt() * bn + (model.b(n) - z) / (a0 * a1).sqrt()
}

/// `r_n = (√(a_{n-1}a_n) 𝒜_n)^{-1} (a_{n-1}𝒜_{n-1} + (b_n - z)𝒜_n + a_n𝒜_{n+1})`.
pub fn remainder(
    n: usize,
    zp: &SpectralPoint,
    params: &CriticalParams,
    model: &CoefficientModel,
) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidParameter("remainder needs n >= 2".into()));
    }
    let zeta = Zeta::of(zp, params)?;
    let tp = theta_at(n - 1, &zeta, params)?;
    let tn = theta_at(n, &zeta, params)?;
    Ok(remainder_from(n, zp.z, tp, tn, params, model))
}

/// Index where `t_n(ζ)` changes sign for real `ζ`; beyond it the phase has
/// its asymptotic character (purely real or purely imaginary).
fn turning_index(zeta: f64, params: &CriticalParams) -> Option<f64> {
    let s = params.sigma;
    let tau = params.tau;
    // t_n = (ζ n^{1-σ} - τ)/n vanishes at n = (ζ/τ)^{1/(σ-1)}
    if s == 1.0 || zeta * tau <= 0.0 {
        return None;
    }
    Some((zeta / tau).powf(1.0 / (s - 1.0)))
}

/// Upper limit for an automatically chosen starting index.
pub const MAX_N_START: usize = 2_000_000;

/// `max(8, ⌈(4|z|)^{1/σ}⌉, ⌈4|τ|⌉ + 1)`, raised past the turning point of
/// `Re ζ`.
pub fn default_n_start(zp: &SpectralPoint, params: &CriticalParams) -> Result<usize> {
    let zabs = zp.z.norm();
    let mut n = 8f64
        .max((4.0 * zabs).powf(1.0 / params.sigma).ceil())
        .max((4.0 * params.tau.abs()).ceil() + 1.0);
    if let Some(tp) = turning_index(zp.z.re * params.gamma, params) {
        // off the axis the raise is optional: WKB breaks down near Re ζ's
        // turning point, but only when Im z is small
        let raised = 2.0 * tp.ceil() + 1.0;
        if zp.z.im == 0.0 || raised <= MAX_N_START as f64 {
            n = n.max(raised);
        }
    }
    if !(n <= MAX_N_START as f64) {
        return Err(Error::OutsideDomain(format!(
            "starting index {n:.3e} needed for z = {} exceeds {MAX_N_START}",
            zp.z
        )));
    }
    Ok(n as usize)
}

/// Memoised `θ_n` and prefix sums `φ_n = Σ_{m=n_start}^{n-1} θ_m`.
#[derive(Debug, Clone)]
pub struct PhaseAccumulator {
    params: CriticalParams,
    zeta: Zeta,
    n_start: usize,
    theta: Vec<Complex64>,
    phi: Vec<Complex64>,
    comp: Complex64,
}

impl PhaseAccumulator {
    pub fn new(zp: &SpectralPoint, params: &CriticalParams, n_start: Option<usize>) -> Result<Self> {
        let zeta = Zeta::of(zp, params)?;
        let n_start = match n_start {
            Some(n) if n >= 1 => n,
            Some(_) => return Err(Error::InvalidParameter("n_start must be >= 1".into())),
            None => default_n_start(zp, params)?,
        };
        Ok(PhaseAccumulator {
            params: params.clone(),
            zeta,
            n_start,
            theta: Vec::new(),
            phi: vec![Complex64::zero()],
            comp: Complex64::zero(),
        })
    }

    pub fn n_start(&self) -> usize {
        self.n_start
    }

    pub fn zeta(&self) -> &Zeta {
        &self.zeta
    }

    pub fn params(&self) -> &CriticalParams {
        &self.params
    }

    /// Makes `θ_m` available for `m < n` and `φ_m` for `m <= n`.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        if n < self.n_start {
            return Err(Error::InvalidParameter(format!(
                "index {n} below the phase start {}",
                self.n_start
            )));
        }
        let need = n - self.n_start;
        if self.theta.len() >= need {
            return Ok(());
        }
        self.theta.reserve(need - self.theta.len());
        self.phi.reserve(need + 1 - self.phi.len());
        while self.theta.len() < need {
            let m = self.n_start + self.theta.len();
            let th = theta_at(m, &self.zeta, &self.params)?;
            // compensated summation keeps large phases accurate
            let sum = *self.phi.last().expect("phi starts non-empty");
            let y = th - self.comp;
            let t = sum + y;
            self.comp = (t - sum) - y;
            self.theta.push(th);
            self.phi.push(t);
        }
        Ok(())
    }

    pub fn theta(&mut self, n: usize) -> Result<Complex64> {
        self.extend_to(n + 1)?;
        Ok(self.theta[n - self.n_start])
    }

    pub fn phi(&mut self, n: usize) -> Result<Complex64> {
        self.extend_to(n)?;
        Ok(self.phi[n - self.n_start])
    }

    /// `𝒜_n` as a LogComplex.
    pub fn ansatz(&mut self, n: usize) -> Result<LogComplex> {
        let phi = self.phi(n)?;
        Ok(ansatz_from_phi(n, phi, &self.params))
    }

    /// `ℬ_n = 𝒜_{n+1}/𝒜_n`.
    pub fn b_ratio(&mut self, n: usize) -> Result<Complex64> {
        let th = self.theta(n)?;
        Ok(b_ratio(n, th, &self.params))
    }

    /// `r_n`, requires `n >= n_start + 1`.
    pub fn remainder(&mut self, n: usize, z: Complex64, model: &CoefficientModel) -> Result<Complex64> {
        let tp = self.theta(n - 1)?;
        let tn = self.theta(n)?;
        Ok(remainder_from(n, z, tp, tn, &self.params, model))
    }
}

/// `(-γ)^n n^{-ρ} e^{iφ}`.
pub fn ansatz_from_phi(n: usize, phi: Complex64, params: &CriticalParams) -> LogComplex {
    let m = -params.rho * (n as f64).ln() - phi.im;
    let mut v = LogComplex::from_polar_log(m, phi.re);
    if params.gamma > 0.0 && n % 2 == 1 {
        v = -v;
    }
    v
}

pub fn phi(n: usize, zp: &SpectralPoint, params: &CriticalParams) -> Result<Complex64> {
    PhaseAccumulator::new(zp, params, None)?.phi(n)
}

pub fn ansatz_value(n: usize, zp: &SpectralPoint, params: &CriticalParams) -> Result<LogComplex> {
    PhaseAccumulator::new(zp, params, None)?.ansatz(n)
}

/// Leading terms of `φ_n(λ + i0)` without the additive constant.
pub fn asymptotic_phase(n: usize, lambda: f64, params: &CriticalParams) -> Complex64 {
    let x = n as f64;
    let s = params.sigma;
    let tau = params.tau;
    match params.regime {
        Regime::Unit => {
            let r = sqrt_cut(Complex64::new(lambda - tau, 0.0), Side::Plus).unwrap_or_default();
            r * (2.0 * x.sqrt())
        }
        Regime::Above => {
            let growth = if params.log_phase { x.ln() / 2.0 } else { x.powf(1.5 - s) / (3.0 - 2.0 * s) };
            let r = tau.abs().sqrt();
            if tau < 0.0 {
                Complex64::new(2.0 * r * x.sqrt() + lambda * growth / r, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * r * x.sqrt() - lambda * growth / r)
            }
        }
        Regime::Below => {
            let r = sqrt_cut(Complex64::new(lambda, 0.0), Side::Plus).unwrap_or_default();
            r * (2.0 / (2.0 - s) * x.powf(1.0 - s / 2.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{classify, laguerre_model, power_model};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(sigma: f64, alpha: f64, beta: f64, gamma: f64) -> CriticalParams {
        classify(&power_model(sigma, alpha, beta, gamma).unwrap()).unwrap()
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_cut(c(-1.0, 0.0), Side::Interior).unwrap(), c(0.0, 1.0));
        assert_eq!(sqrt_cut(c(-1.0, -0.0), Side::Plus).unwrap(), c(0.0, 1.0));
        assert_eq!(sqrt_cut(c(4.0, 0.0), Side::Plus).unwrap(), c(2.0, 0.0));
        let r = sqrt_cut(c(0.0, 2.0), Side::Interior).unwrap();
        assert!((r - c(1.0, 1.0)).norm() < 1e-15);
        assert!(matches!(sqrt_cut(c(0.0, 0.0), Side::Plus), Err(Error::BranchPoint { .. })));
        let r = sqrt_cut(c(0.0, -2.0), Side::Interior).unwrap();
        assert!((r - c(-1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn eikonal_examples() {
        assert!(eikonal_coefficients(1).is_empty());
        let p2 = eikonal_coefficients(2);
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[0].to_string(), "1/12");
        assert_eq!(eikonal_a(2).to_string(), "-1/12");
        assert_eq!(eikonal_a(3).to_string(), "1/360");
        let p3 = eikonal_coefficients(3);
        assert_eq!(p3[1].to_string(), "1/90");
        let a2 = eikonal_a(2);
        assert_eq!(p3[1], &a2 * &a2 * BigRational::from_integer(2.into()) - eikonal_a(3));
        assert_eq!(eikonal_json(3), r#"["1/12","1/90"]"#);
    }

    #[test]
    fn t_and_theta_examples() {
        let lag = classify(&laguerre_model(0.0).unwrap()).unwrap();
        assert_eq!(t_seq(4, &SpectralPoint::plus(1.0), &lag), c(0.25, 0.0));
        assert_eq!(theta(4, &SpectralPoint::plus(1.0), &lag).unwrap(), c(0.5, 0.0));

        let neg = params(1.25, 0.0, -1.125, 1.0);
        assert_eq!(neg.tau, -1.0);
        let t = t_seq(100, &SpectralPoint::plus(0.0), &neg);
        assert!((t - c(0.01, 0.0)).norm() < 1e-17);
        assert!((theta(100, &SpectralPoint::plus(0.0), &neg).unwrap() - c(0.1, 0.0)).norm() < 1e-15);

        let pos = params(1.25, 0.0, -0.125, 1.0);
        assert_eq!(pos.tau, 1.0);
        let th = theta(100, &SpectralPoint::interior(c(0.0, 0.0)), &pos).unwrap();
        assert!((th - c(0.0, 0.1)).norm() < 1e-15);

        let unit = params(1.0, 0.0, 0.0, 1.0);
        assert_eq!(t_seq(10, &SpectralPoint::interior(c(0.0, 0.0)), &unit), c(-0.1, 0.0));
        assert!(matches!(
            theta(5, &SpectralPoint::plus(1.0), &unit),
            Err(Error::BranchPoint { n: 5 })
        ));
    }

    #[test]
    fn phase_sums() {
        let lag = classify(&laguerre_model(0.0).unwrap()).unwrap();
        let zp = SpectralPoint::plus(1.0);
        let mut acc = PhaseAccumulator::new(&zp, &lag, None).unwrap();
        let n0 = acc.n_start();
        assert_eq!(n0, 8);
        assert_eq!(acc.phi(n0).unwrap(), Complex64::zero());
        let a = acc.ansatz(n0).unwrap();
        assert!((a.ln_abs() + 0.25 * (n0 as f64).ln()).abs() < 1e-14);
        // gap to 2√n settles to a constant
        let g1 = acc.phi(10_000).unwrap().re - 2.0 * 100.0;
        let g2 = acc.phi(40_000).unwrap().re - 2.0 * 200.0;
        let g3 = acc.phi(160_000).unwrap().re - 2.0 * 400.0;
        assert!((g2 - g1).abs() < 0.01 && (g3 - g2).abs() < 0.005, "{g1} {g2} {g3}");
        for n in n0..n0 + 200 {
            let d = acc.phi(n + 1).unwrap() - acc.phi(n).unwrap() - acc.theta(n).unwrap();
            assert!(d.norm() <= 1e-15 * (1.0 + acc.phi(n + 1).unwrap().norm()));
        }
    }

    #[test]
    fn asymptotic_phase_examples() {
        let lag = classify(&laguerre_model(0.0).unwrap()).unwrap();
        assert!((asymptotic_phase(10_000, 1.0, &lag) - c(200.0, 0.0)).norm() < 1e-12);
        let neg = params(1.25, 0.0, -1.125, 1.0);
        assert!((asymptotic_phase(10_000, 0.0, &neg) - c(200.0, 0.0)).norm() < 1e-12);
        let half = params(0.5, 0.0, 0.0, 1.0);
        assert!((asymptotic_phase(10_000, 1.0, &half) - c(4000.0 / 3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn phase_gap_growth_above_one() {
        // σ = 1.25: the gap grows no faster than n^{5/2-2σ} = n^0
        let neg = params(1.25, 0.0, -1.125, 1.0);
        let zp = SpectralPoint::plus(0.7);
        let mut acc = PhaseAccumulator::new(&zp, &neg, None).unwrap();
        let gaps: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| (acc.phi(n).unwrap() - asymptotic_phase(n, 0.7, &neg)).norm())
            .collect();
        assert!(gaps[2] < 2.0 * gaps[1] + 1.0 && gaps[1] < 2.0 * gaps[0] + 1.0, "{gaps:?}");
    }

    #[test]
    fn log_phase_gap_bounded() {
        let p = params(1.5, 0.0, -1.25, 1.0);
        let mut acc = PhaseAccumulator::new(&SpectralPoint::plus(0.8), &p, None).unwrap();
        let g: Vec<f64> = [10_000usize, 100_000, 1_000_000]
            .iter()
            .map(|&n| (acc.phi(n).unwrap() - asymptotic_phase(n, 0.8, &p)).re)
            .collect();
        assert!((g[2] - g[1]).abs() < 0.01 && (g[1] - g[0]).abs() < 0.03, "{g:?}");
    }

    #[test]
    fn decaying_ansatz_for_positive_tau() {
        let pos = params(1.25, 0.0, -0.125, 1.0);
        let mut acc = PhaseAccumulator::new(&SpectralPoint::interior(c(0.3, 0.2)), &pos, None).unwrap();
        let v: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| acc.ansatz(n).unwrap().ln_abs() + 2.0 * (n as f64).sqrt())
            .collect();
        assert!((v[2] - v[0]).abs() < 0.1 * 2.0 * 100_000f64.sqrt(), "{v:?}");
    }

    #[test]
    fn log_phase_envelope() {
        // σ = 3/2, τ = -1, z = λ + iε: |𝒜_n| ~ n^{-1/2 - ε/2}
        let p = params(1.5, 0.0, -1.25, 1.0);
        assert_eq!(p.tau, -1.0);
        let eps = 0.3;
        let mut acc = PhaseAccumulator::new(&SpectralPoint::interior(c(0.5, eps)), &p, None).unwrap();
        let (n1, n2) = (10_000usize, 1_000_000usize);
        let slope = (acc.ansatz(n2).unwrap().ln_abs() - acc.ansatz(n1).unwrap().ln_abs())
            / ((n2 as f64).ln() - (n1 as f64).ln());
        assert!((slope + 0.5 + eps / 2.0).abs() < 0.01, "{slope}");
    }

    #[test]
    fn lower_rim_is_conjugate_mirror() {
        let lag = classify(&laguerre_model(0.0).unwrap()).unwrap();
        for n in [10usize, 100, 1000] {
            let p = theta(n, &SpectralPoint::plus(2.0), &lag).unwrap();
            let m = theta(n, &SpectralPoint::minus(2.0), &lag).unwrap();
            assert_eq!(m, -p.conj());
        }
    }

    #[test]
    fn remainder_decays_like_n_minus_two_for_laguerre() {
        let lag = classify(&laguerre_model(0.0).unwrap()).unwrap();
        let m = laguerre_model(0.0).unwrap();
        let zp = SpectralPoint::interior(c(1.0, 1.0));
        let r1 = remainder(1_000, &zp, &lag, &m).unwrap().norm();
        let r2 = remainder(100_000, &zp, &lag, &m).unwrap().norm();
        let slope = (r2.ln() - r1.ln()) / (100f64).ln();
        assert!(slope <= -1.85, "{slope}");
    }

    proptest! {
        #[test]
        fn theta_upper_half(re in -5.0f64..5.0, im in -3.0f64..3.0, n in 20usize..5000, which in 0usize..4) {
            let p = match which {
                0 => classify(&laguerre_model(0.5).unwrap()).unwrap(),
                1 => params(1.25, 0.0, -0.875, 1.0),
                2 => params(0.5, 0.1, 0.0, -1.0),
                _ => params(0.8, 0.0, 0.2, 1.0),
            };
            prop_assume!(im.abs() > 1e-6);
            let zp = SpectralPoint::interior(c(re, im));
            let th = theta(n, &zp, &p).unwrap();
            prop_assert!(th.im >= 0.0);
            // conjugate point: θ(z̄) = -conj θ(z) on the Im > 0 branch
            let tc = theta(n, &zp.conj(), &p).unwrap();
            prop_assert!((tc + th.conj()).norm() <= 1e-14 * (1.0 + th.norm()));
        }

        #[test]
        fn boundary_theta_nonnegative_imaginary(lambda in -5.0f64..5.0, n in 20usize..5000) {
            let p = params(1.25, 0.0, -0.875, 1.0);
            let th = theta(n, &SpectralPoint::plus(lambda), &p).unwrap();
            prop_assert!(th.im >= 0.0);
        }

        #[test]
        fn imaginary_phase_monotone(re in -3.0f64..3.0, im in 0.01f64..2.0) {
            let p = classify(&laguerre_model(0.0).unwrap()).unwrap();
            let mut acc = PhaseAccumulator::new(&SpectralPoint::interior(c(re, im)), &p, None).unwrap();
            let n0 = acc.n_start();
            let mut last = acc.phi(n0).unwrap().im;
            for n in n0 + 1..n0 + 300 {
                let v = acc.phi(n).unwrap().im;
                prop_assert!(v >= last);
                last = v;
            }
        }
    }
}

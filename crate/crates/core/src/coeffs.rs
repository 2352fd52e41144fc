//! Coefficient models and their regime parameters.

use crate::ansatz::eikonal_coefficients;
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Declared asymptotics `a_n = n^σ(1 + α/n + ..)`, `b_n = 2γ n^σ(1 + β/n + ..)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDescriptor {
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Laguerre { p: f64 },
    Power { sigma: f64, alpha: f64, beta: f64, gamma: f64 },
    Table { a: Arc<Vec<f64>>, b: Arc<Vec<f64>>, tail: AsymptoticDescriptor },
}

/// Jacobi coefficients `a_n > 0`, `b_n` together with declared asymptotics.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientModel {
    kind: Kind,
    /// `-1` after reflection.
    b_sign: f64,
    descriptor: AsymptoticDescriptor,
}

/// Largest accepted `n^2 |a_n n^{-σ} - 1 - α/n|` (and the analogue for `b`)
/// on the upper half of a table.
pub const TABLE_DEVIATION_LIMIT: f64 = 1.0e3;

fn power_a(n: usize, sigma: f64, alpha: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let x = n as f64;
    x.powf(sigma) * (1.0 + alpha / x)
}

fn power_b(n: usize, sigma: f64, beta: f64, gamma: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = n as f64;
    2.0 * gamma * x.powf(sigma) * (1.0 + beta / x)
}

impl CoefficientModel {
    /// Off-diagonal entry `a_n`.
    pub fn a(&self, n: usize) -> f64 {
        match &self.kind {
            Kind::Laguerre { p } => {
                let x = n as f64 + 1.0;
                (x * (x + p)).sqrt()
            }
            Kind::Power { sigma, alpha, .. } => power_a(n, *sigma, *alpha),
            Kind::Table { a, tail, .. } => match a.get(n) {
                Some(v) => *v,
                None => power_a(n, tail.sigma, tail.alpha),
            },
        }
    }

    /// `a_n` for `n >= -1`, with `a_{-1} = 1`.
    pub fn a_ext(&self, n: i64) -> f64 {
        if n < 0 {
            1.0
        } else {
            self.a(n as usize)
        }
    }

    /// Diagonal entry `b_n`.
    pub fn b(&self, n: usize) -> f64 {
        let raw = match &self.kind {
            Kind::Laguerre { p } => 2.0 * n as f64 + p + 1.0,
            Kind::Power { sigma, beta, gamma, .. } => power_b(n, *sigma, *beta, *gamma),
            Kind::Table { b, tail, .. } => match b.get(n) {
                Some(v) => *v,
                None => power_b(n, tail.sigma, tail.beta, tail.gamma),
            },
        };
        self.b_sign * raw
    }

    pub fn descriptor(&self) -> AsymptoticDescriptor {
        self.descriptor
    }

    pub fn name(&self) -> String {
        let base = match &self.kind {
            Kind::Laguerre { p } => format!("laguerre(p={p})"),
            Kind::Power { sigma, alpha, beta, gamma } => {
                format!("power(sigma={sigma},alpha={alpha},beta={beta},gamma={gamma})")
            }
            Kind::Table { a, .. } => format!("table(len={})", a.len()),
        };
        if self.b_sign < 0.0 {
            format!("reflected {base}")
        } else {
            base
        }
    }

    /// Power model without the regime checks of [`power_model`]; the
    /// classifier reports what is wrong with it.
    pub fn power_unchecked(sigma: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        CoefficientModel {
            kind: Kind::Power { sigma, alpha, beta, gamma },
            b_sign: 1.0,
            descriptor: AsymptoticDescriptor { sigma, alpha, beta, gamma },
        }
    }

    /// Explicit leading coefficients; beyond the arrays the descriptor's
    /// first-order form is used.
    pub fn table(a: Vec<f64>, b: Vec<f64>, descriptor: AsymptoticDescriptor) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidParameter(
                "table arrays a and b must be non-empty and of equal length".into(),
            ));
        }
        if let Some(i) = a.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("a[{i}] must be positive and finite")));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("b entries must be finite".into()));
        }
        let d = descriptor;
        if d.sigma > 0.0 && d.gamma != 0.0 {
            let len = a.len();
            for n in (len / 2).max(10)..len {
                let x = n as f64;
                let s = x.powf(-d.sigma);
                let da = (a[n] * s - 1.0 - d.alpha / x).abs() * x * x;
                let db = (b[n] * s / (2.0 * d.gamma) - 1.0 - d.beta / x).abs() * x * x;
                if da > TABLE_DEVIATION_LIMIT || db > TABLE_DEVIATION_LIMIT {
                    return Err(Error::InvalidParameter(format!(
                        "table entry {n} deviates from the declared asymptotics (scaled deviation {:.3e})",
                        da.max(db)
                    )));
                }
            }
        }
        Ok(CoefficientModel {
            kind: Kind::Table { a: Arc::new(a), b: Arc::new(b), tail: descriptor },
            b_sign: 1.0,
            descriptor,
        })
    }

    /// Builds a model from its JSON description without regime checks.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        match spec {
            ModelSpec::Laguerre { p } => laguerre_model(*p),
            ModelSpec::Power { sigma, alpha, beta, gamma } => {
                if !(sigma.is_finite() && alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite power model parameter".into()));
                }
                Ok(Self::power_unchecked(*sigma, *alpha, *beta, *gamma))
            }
            ModelSpec::Table { a, b, sigma, alpha, beta, gamma } => Self::table(
                a.clone(),
                b.clone(),
                AsymptoticDescriptor { sigma: *sigma, alpha: *alpha, beta: *beta, gamma: *gamma },
            ),
        }
    }
}

/// JSON model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Laguerre {
        p: f64,
    },
    Power {
        sigma: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
    Table {
        a: Vec<f64>,
        b: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// Laguerre polynomials with parameter `p`, orthonormal for `λ^p e^{-λ}/Γ(p+1)`.
pub fn laguerre_model(p: f64) -> Result<CoefficientModel> {
    if !(p > -1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("Laguerre parameter p = {p} must exceed -1")));
    }
    Ok(CoefficientModel {
        kind: Kind::Laguerre { p },
        b_sign: 1.0,
        descriptor: AsymptoticDescriptor {
            sigma: 1.0,
            alpha: 1.0 + p / 2.0,
            beta: (1.0 + p) / 2.0,
            gamma: 1.0,
        },
    })
}

/// `a_n = n^σ(1 + α/n)`, `b_n = 2γ n^σ(1 + β/n)` for `n >= 1`; `a_0 = 1`, `b_0 = 0`.
pub fn power_model(sigma: f64, alpha: f64, beta: f64, gamma: f64) -> Result<CoefficientModel> {
    if !(sigma > 0.0 && sigma <= 1.5) {
        return Err(Error::UnsupportedRegime(format!("sigma = {sigma} outside (0, 3/2]")));
    }
    if gamma.abs() != 1.0 {
        return Err(Error::NotCritical(gamma.abs()));
    }
    if alpha <= -1.0 {
        return Err(Error::InvalidParameter("alpha <= -1 makes a_1 non-positive".into()));
    }
    Ok(CoefficientModel::power_unchecked(sigma, alpha, beta, gamma))
}

/// `(a, b) -> (a, -b)`; `γ` flips sign, `β` is unchanged.
pub fn reflect(model: &CoefficientModel) -> CoefficientModel {
    let mut m = model.clone();
    m.b_sign = -m.b_sign;
    m.descriptor.gamma = -m.descriptor.gamma;
    m
}

/// The absolutely continuous part of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AcSet {
    Empty,
    WholeLine,
    /// `(threshold, ∞)` if `upward`, else `(-∞, threshold)`.
    HalfLine { threshold: f64, upward: bool },
}

impl AcSet {
    /// Open-set membership.
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            AcSet::Empty => false,
            AcSet::WholeLine => true,
            AcSet::HalfLine { threshold, upward } => {
                if upward {
                    x > threshold
                } else {
                    x < threshold
                }
            }
        }
    }

    pub fn closure_contains(&self, x: f64) -> bool {
        match *self {
            AcSet::HalfLine { threshold, .. } => self.contains(x) || x == threshold,
            _ => self.contains(x),
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            AcSet::HalfLine { threshold, .. } => Some(threshold),
            _ => None,
        }
    }

    /// Whether `[lo, hi]` meets the closure.
    pub fn meets(&self, lo: f64, hi: f64) -> bool {
        match *self {
            AcSet::Empty => false,
            AcSet::WholeLine => true,
            AcSet::HalfLine { threshold, upward } => {
                if upward {
                    hi >= threshold
                } else {
                    lo <= threshold
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            AcSet::Empty => "empty".into(),
            AcSet::WholeLine => "(-inf,inf)".into(),
            AcSet::HalfLine { threshold, upward } => {
                if upward {
                    format!("({},inf)", fmt_num(threshold))
                } else {
                    format!("(-inf,{})", fmt_num(threshold))
                }
            }
        }
    }
}

fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `σ ∈ (1, 3/2]`.
    Above,
    /// `σ = 1`.
    Unit,
    /// `σ ∈ (0, 1)`.
    Below,
}

/// Everything derived from the declared asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalParams {
    pub gamma: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub rho: f64,
    pub nu: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: usize,
    /// `p_2..p_L` as floats.
    pub p: Vec<f64>,
    /// The same coefficients as exact fractions.
    pub p_exact: Vec<String>,
    pub varsigma: f64,
    pub ac_set: AcSet,
    pub regime: Regime,
    /// `σ = 3/2`: the phase grows like `ln n` in place of a power.
    pub log_phase: bool,
    /// `σ = 3/2, τ < 0`: uniqueness of the Jost solution needs `u_n = 1 + O(n^{-1/2})`.
    pub uniqueness_caveat: bool,
}

/// Minimal positive `L` with `(L + 1/2)σ > 1`.
pub fn eikonal_depth(sigma: f64) -> usize {
    let mut l = ((1.0 / sigma - 0.5).floor().max(0.0) as usize + 1).max(1);
    while (l as f64 + 0.5) * sigma <= 1.0 {
        l += 1;
    }
    while l > 1 && (l as f64 - 0.5) * sigma > 1.0 {
        l -= 1;
    }
    l
}

/// Decay exponent of the relative remainder `r_n`.
pub fn remainder_exponent(sigma: f64, l: usize) -> f64 {
    if sigma > 1.0 {
        sigma + 0.5
    } else if sigma == 1.0 {
        2.0
    } else if sigma > 2.0 / 3.0 {
        (2.0 * sigma).min(2.0 - sigma / 2.0)
    } else {
        // the difference t_{n-1} - t_n contributes n^{-1-σ}
        ((l as f64 + 1.0) * sigma).min(1.0 + sigma).min(2.0 - sigma / 2.0)
    }
}

pub fn classify(model: &CoefficientModel) -> Result<CriticalParams> {
    classify_descriptor(&model.descriptor())
}

pub fn classify_descriptor(d: &AsymptoticDescriptor) -> Result<CriticalParams> {
    let AsymptoticDescriptor { sigma, alpha, beta, gamma } = *d;
    if !(sigma.is_finite() && alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::InvalidParameter("non-finite descriptor".into()));
    }
    if gamma.abs() != 1.0 {
        return Err(Error::NotCritical(gamma.abs()));
    }
    if sigma <= 0.0 {
        return Err(Error::UnsupportedRegime(format!("sigma = {sigma} must be positive")));
    }
    if sigma > 1.5 {
        return Err(Error::LimitCircleRegime(sigma));
    }
    let tau = 2.0 * beta - 2.0 * alpha + sigma;
    let regime = if sigma > 1.0 {
        Regime::Above
    } else if sigma == 1.0 {
        Regime::Unit
    } else {
        Regime::Below
    };
    if regime == Regime::Above && tau == 0.0 {
        return Err(Error::UnsupportedTauZero(sigma));
    }
    let rho = if sigma >= 1.0 { sigma / 2.0 - 0.25 } else { sigma / 4.0 };
    let nu = sigma - 2.0 * rho;
    let log_phase = sigma == 1.5;
    let varsigma = 1.0 - 2.0 * rho;
    let l = eikonal_depth(sigma);
    let exact: Vec<BigRational> = eikonal_coefficients(l);
    let p = exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
    let p_exact = exact.iter().map(|r| r.to_string()).collect();
    let ac_set = match regime {
        Regime::Above => {
            if tau < 0.0 {
                AcSet::WholeLine
            } else {
                AcSet::Empty
            }
        }
        Regime::Unit => AcSet::HalfLine { threshold: gamma * tau, upward: gamma > 0.0 },
        Regime::Below => AcSet::HalfLine { threshold: 0.0, upward: gamma > 0.0 },
    };
    Ok(CriticalParams {
        gamma,
        sigma,
        alpha,
        beta,
        tau,
        rho,
        nu,
        delta: remainder_exponent(sigma, l),
        l,
        p,
        p_exact,
        varsigma,
        ac_set,
        regime,
        log_phase,
        uniqueness_caveat: log_phase && tau < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn laguerre_entries() {
        let m = laguerre_model(0.0).unwrap();
        assert_eq!(m.a(3), 4.0);
        assert_eq!(m.b(3), 7.0);
        let d = m.descriptor();
        assert_eq!((d.sigma, d.alpha, d.beta, d.gamma), (1.0, 1.0, 0.5, 1.0));
        let m1 = laguerre_model(1.0).unwrap();
        assert_eq!(m1.a(0), 2f64.sqrt());
        assert_eq!(m1.b(0), 2.0);
        assert!(matches!(laguerre_model(-1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn power_entries() {
        let m = power_model(1.0, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(m.a(4), 4.0);
        assert_eq!(m.b(4), 9.0);
        let m = power_model(0.5, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(m.a(100), 10.0);
        assert_eq!(m.b(100), 20.0);
        let m = power_model(1.25, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(m.a(16), 32.0);
        assert_eq!(m.b(16), -64.0);
        assert_eq!((m.a(0), m.b(0)), (1.0, 0.0));
        assert!(matches!(power_model(2.0, 0.0, 0.0, 1.0), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(power_model(0.0, 0.0, 0.0, 1.0), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn classify_examples() {
        let c = classify(&laguerre_model(0.0).unwrap()).unwrap();
        assert_eq!(c.tau, 0.0);
        assert_eq!(c.rho, 0.25);
        assert_eq!(c.nu, 0.5);
        assert_eq!(c.delta, 2.0);
        assert_eq!(c.l, 1);
        assert_eq!(c.ac_set, AcSet::HalfLine { threshold: 0.0, upward: true });
        assert_eq!(c.ac_set.describe(), "(0,inf)");

        let c = classify(&power_model(1.25, 0.0, 0.3, 1.0).unwrap()).unwrap();
        assert!((c.tau - 1.85).abs() < 1e-15);
        assert_eq!(c.rho, 0.375);
        assert_eq!(c.ac_set, AcSet::Empty);

        let c = classify(&power_model(0.5, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(c.rho, 0.125);
        assert_eq!(c.l, 2);
        assert_eq!(c.p_exact, vec!["1/12".to_string()]);
        assert_eq!(c.ac_set.describe(), "(0,inf)");
    }

    #[test]
    fn classify_rejections() {
        let m = CoefficientModel::power_unchecked(2.0, 0.0, 0.0, 1.0);
        assert_eq!(classify(&m).unwrap_err().kind(), "LimitCircleRegime");
        let m = CoefficientModel::power_unchecked(1.0, 0.0, 0.0, 0.5);
        assert_eq!(classify(&m).unwrap_err().kind(), "NotCritical");
        let m = power_model(1.25, 0.0, -0.625, 1.0).unwrap();
        assert_eq!(classify(&m).unwrap_err().kind(), "UnsupportedTauZero");
        let c = classify(&power_model(1.5, 0.0, -1.25, 1.0).unwrap()).unwrap();
        assert!(c.uniqueness_caveat && c.log_phase);
        assert_eq!(c.varsigma, 0.0);
    }

    #[test]
    fn reflection() {
        let m = laguerre_model(0.0).unwrap();
        let r = reflect(&m);
        assert_eq!(r.b(2), -5.0);
        let rr = reflect(&r);
        for n in 0..50 {
            assert_eq!(rr.a(n), m.a(n));
            assert_eq!(rr.b(n), m.b(n));
        }
        assert_eq!(rr, m);
        let c = classify(&reflect(&power_model(1.0, 0.0, 0.0, 1.0).unwrap())).unwrap();
        assert_eq!(c.gamma, -1.0);
        assert_eq!(c.ac_set, AcSet::HalfLine { threshold: -1.0, upward: false });
        assert_eq!(c.ac_set.describe(), "(-inf,-1)");
    }

    #[test]
    fn eikonal_depths() {
        assert_eq!(eikonal_depth(1.0), 1);
        assert_eq!(eikonal_depth(0.7), 1);
        assert_eq!(eikonal_depth(2.0 / 3.0), 2);
        assert_eq!(eikonal_depth(0.5), 2);
        assert_eq!(eikonal_depth(0.4), 3);
        assert_eq!(eikonal_depth(0.1), 10);
    }

    #[test]
    fn builtin_models_match_descriptor() {
        for m in [
            laguerre_model(0.0).unwrap(),
            laguerre_model(1.0).unwrap(),
            laguerre_model(2.5).unwrap(),
            power_model(1.25, 0.5, -0.3, 1.0).unwrap(),
            power_model(0.5, 0.2, 0.1, -1.0).unwrap(),
        ] {
            let d = m.descriptor();
            let mut cs = vec![];
            for k in 2..=6 {
                let n = 10usize.pow(k);
                let x = n as f64;
                let da = (m.a(n) * x.powf(-d.sigma) - 1.0 - d.alpha / x).abs() * x * x;
                let db = (m.b(n) * x.powf(-d.sigma) / (2.0 * d.gamma) - 1.0 - d.beta / x).abs() * x * x;
                cs.push(da.max(db));
            }
            assert!(cs.iter().all(|c| *c < 10.0), "{}: {:?}", m.name(), cs);
        }
    }

    #[test]
    fn table_model() {
        let d = AsymptoticDescriptor { sigma: 1.0, alpha: 0.0, beta: 0.0, gamma: 1.0 };
        let a: Vec<f64> = (0..40).map(|n| if n == 0 { 1.0 } else { n as f64 }).collect();
        let b: Vec<f64> = (0..40).map(|n| 2.0 * n as f64).collect();
        let t = CoefficientModel::table(a, b, d).unwrap();
        let p = power_model(1.0, 0.0, 0.0, 1.0).unwrap();
        for n in 0..100 {
            assert_eq!(t.a(n), p.a(n));
            assert_eq!(t.b(n), p.b(n));
        }
        let bad: Vec<f64> = (0..200).map(|n| 3.0 * n as f64 + 1.0).collect();
        let a: Vec<f64> = (0..200).map(|n| n as f64 + 1.0).collect();
        assert!(CoefficientModel::table(a, bad, d).is_err());
    }

    #[test]
    fn spec_json() {
        let s: ModelSpec = serde_json::from_str(r#"{"kind":"power","sigma":1.25,"beta":-0.875}"#).unwrap();
        assert_eq!(s, ModelSpec::Power { sigma: 1.25, alpha: 0.0, beta: -0.875, gamma: 1.0 });
        let m = CoefficientModel::from_spec(&s).unwrap();
        assert_eq!(classify(&m).unwrap().tau, -0.5);
    }

    proptest! {
        #[test]
        fn parameter_identities(k in 1u32..=24, alpha in -0.9f64..3.0, beta in -3.0f64..3.0, g in prop::bool::ANY) {
            // dyadic sigma values keep every identity exact
            let sigma = k as f64 / 16.0;
            let gamma = if g { 1.0 } else { -1.0 };
            let m = CoefficientModel::power_unchecked(sigma, alpha, beta, gamma);
            match classify(&m) {
                Ok(c) => {
                    prop_assert_eq!(c.tau, 2.0 * beta - 2.0 * alpha + sigma);
                    prop_assert_eq!(2.0 * c.rho + c.varsigma, 1.0);
                    prop_assert_eq!(c.nu, if sigma >= 1.0 { 0.5 } else { sigma / 2.0 });
                    prop_assert!((c.l as f64 + 0.5) * sigma > 1.0);
                    prop_assert!(c.l == 1 || (c.l as f64 - 0.5) * sigma <= 1.0);
                    prop_assert!(c.delta - c.nu > 1.0);
                    prop_assert!(c.delta > 1.0 + sigma / 2.0);
                    let cr = classify(&reflect(&m)).unwrap();
                    prop_assert_eq!(cr.tau, c.tau);
                    for x in [-3.0, -0.7, -0.1, 0.2, 1.1, 4.0] {
                        prop_assert_eq!(cr.ac_set.contains(-x), c.ac_set.contains(x));
                    }
                }
                Err(e) => prop_assert_eq!(e.kind(), "UnsupportedTauZero"),
            }
        }
    }
}

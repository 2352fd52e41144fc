//! Complex numbers stored as `exp(m) * u` with `|u| = 1`.
//!
//! Jost and polynomial sequences span hundreds of orders of magnitude off the
//! spectrum, so every long-range sequence is carried in this form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Div, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    /// `ln |v|`; `-inf` encodes zero.
    pub m: f64,
    /// Unit phase factor.
    pub u: Complex64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        m: f64::NEG_INFINITY,
        u: Complex64 { re: 1.0, im: 0.0 },
    };
    pub const ONE: LogComplex = LogComplex {
        m: 0.0,
        u: Complex64 { re: 1.0, im: 0.0 },
    };

    pub fn from_complex(v: Complex64) -> Self {
        let r = v.norm();
        if r == 0.0 || !r.is_finite() {
            if r == 0.0 {
                return Self::ZERO;
            }
            // fall back to a scaled norm for huge finite parts
            let s = v.re.abs().max(v.im.abs());
            let w = v / s;
            let rw = w.norm();
            return LogComplex { m: s.ln() + rw.ln(), u: w / rw };
        }
        LogComplex { m: r.ln(), u: v / r }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// `exp(m) * exp(i*arg)`.
    pub fn from_polar_log(m: f64, arg: f64) -> Self {
        LogComplex { m, u: Complex64::new(arg.cos(), arg.sin()) }
    }

    /// `exp(w)` for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        Self::from_polar_log(w.re, w.im)
    }

    pub fn is_zero(&self) -> bool {
        self.m == f64::NEG_INFINITY
    }

    pub fn ln_abs(&self) -> f64 {
        self.m
    }

    pub fn abs(&self) -> f64 {
        self.m.exp()
    }

    pub fn arg(&self) -> f64 {
        self.u.arg()
    }

    /// Converts back to an ordinary complex number (may over/underflow).
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.u * self.m.exp()
    }

    /// Value relative to the scale `exp(shift)`.
    pub fn scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.u * (self.m - shift).exp()
    }

    pub fn conj(&self) -> Self {
        LogComplex { m: self.m, u: self.u.conj() }
    }

    pub fn inv(&self) -> Self {
        LogComplex { m: -self.m, u: self.u.conj() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        *self * LogComplex::from_complex(c)
    }

    /// Sum, formed in the frame of the larger-magnitude operand.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let s = self.m.max(other.m);
        let v = self.scaled(s) + other.scaled(s);
        let mut r = LogComplex::from_complex(v);
        r.m += s;
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&(-*other))
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        let u = self.u * rhs.u;
        // renormalise to keep |u| = 1 against drift
        let r = u.norm();
        LogComplex { m: self.m + rhs.m + r.ln(), u: u / r }
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> Self {
        LogComplex { m: self.m, u: -self.u }
    }
}

impl From<Complex64> for LogComplex {
    fn from(v: Complex64) -> Self {
        Self::from_complex(v)
    }
}

impl From<f64> for LogComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

//! Third-order jets: a value together with its first three derivatives.
//!
//! A [`Jet3`] is a truncated Taylor expansion in a single active variable.
//! Arithmetic follows the Leibniz rule and composition with an elementary
//! function follows Faà di Bruno's formula, both truncated at order three:
//!
//! ```text
//! (f ∘ g)'   = f1 g1
//! (f ∘ g)''  = f2 g1² + f1 g2
//! (f ∘ g)''' = f3 g1³ + 3 f2 g1 g2 + f1 g3
//! ```
//!
//! where `fk` is the k-th derivative of `f` evaluated at `g.v0`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

/// Value and first three derivatives of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet3 {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl Jet3 {
    pub const fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        Self { v0, v1, v2, v3 }
    }

    /// A jet with vanishing derivatives.
    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0)
    }

    /// The identity function seeded at `point`.
    pub const fn variable(point: f64) -> Self {
        Self::new(point, 1.0, 0.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.v1 == 0.0 && self.v2 == 0.0 && self.v3 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.v0.is_finite() && self.v1.is_finite() && self.v2.is_finite() && self.v3.is_finite()
    }

    /// Derivatives as an array `[v0, v1, v2, v3]`.
    pub fn to_array(self) -> [f64; 4] {
        [self.v0, self.v1, self.v2, self.v3]
    }

    /// Compose with an outer function whose value and first three derivatives
    /// at `self.v0` are `f`.
    pub fn compose(self, f: [f64; 4]) -> Self {
        let [f0, f1, f2, f3] = f;
        let g1 = self.v1;
        let g2 = self.v2;
        let g3 = self.v3;
        Self {
            v0: f0,
            v1: f1 * g1,
            v2: f2 * g1 * g1 + f1 * g2,
            v3: f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.v0, k * self.v1, k * self.v2, k * self.v3)
    }

    pub fn recip(self) -> Self {
        let x = self.v0;
        let r = 1.0 / x;
        let r2 = r * r;
        self.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2])
    }

    /// Integer power, valid for any base where the needed powers exist.
    pub fn powi(self, n: i32) -> Self {
        let x = self.v0;
        let nf = f64::from(n);
        // Coefficients n, n(n-1), n(n-1)(n-2) multiply x^(n-k); a zero
        // coefficient must not multiply an infinite power at x = 0.
        let term = |coef: f64, k: i32| if coef == 0.0 { 0.0 } else { coef * x.powi(n - k) };
        self.compose([
            x.powi(n),
            term(nf, 1),
            term(nf * (nf - 1.0), 2),
            term(nf * (nf - 1.0) * (nf - 2.0), 3),
        ])
    }

    /// Real power with a constant exponent; requires a positive base.
    pub fn powf(self, p: f64) -> Self {
        let x = self.v0;
        self.compose([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(self) -> Self {
        let t = self.v0.tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, (2.0 + 6.0 * t * t) * sec2])
    }

    pub fn asin(self) -> Self {
        let x = self.v0;
        let w = 1.0 - x * x;
        let r = w.sqrt().recip();
        self.compose([x.asin(), r, x * r / w, (1.0 + 2.0 * x * x) * r / (w * w)])
    }

    pub fn acos(self) -> Self {
        let a = self.asin();
        Jet3::new(self.v0.acos(), -a.v1, -a.v2, -a.v3)
    }

    pub fn atan(self) -> Self {
        let x = self.v0;
        let w = 1.0 + x * x;
        self.compose([
            x.atan(),
            1.0 / w,
            -2.0 * x / (w * w),
            (6.0 * x * x - 2.0) / (w * w * w),
        ])
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v0.sinh(), self.v0.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v0.sinh(), self.v0.cosh());
        self.compose([c, s, c, s])
    }

    pub fn tanh(self) -> Self {
        let t = self.v0.tanh();
        let sech2 = 1.0 - t * t;
        self.compose([t, sech2, -2.0 * t * sech2, (6.0 * t * t - 2.0) * sech2])
    }

    pub fn exp(self) -> Self {
        let e = self.v0.exp();
        self.compose([e, e, e, e])
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(self) -> Self {
        let x = self.v0;
        let r = 1.0 / x;
        self.compose([x.ln(), r, -r * r, 2.0 * r * r * r])
    }

    /// Square root; derivatives require a positive value.
    pub fn sqrt(self) -> Self {
        let x = self.v0;
        let s = x.sqrt();
        let d1 = 0.5 / s;
        self.compose([s, d1, -0.5 * d1 / x, 0.75 * d1 / (x * x)])
    }

    /// Absolute value; derivatives exist only away from zero.
    pub fn abs(self) -> Self {
        let sign = self.v0.signum();
        self.scale(sign)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3::new(self.v0 + rhs.v0, self.v1 + rhs.v1, self.v2 + rhs.v2, self.v3 + rhs.v3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        Jet3::new(self.v0 - rhs.v0, self.v1 - rhs.v1, self.v2 - rhs.v2, self.v3 - rhs.v3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.v0, -self.v1, -self.v2, -self.v3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        let (a, b) = (self, rhs);
        Jet3 {
            v0: a.v0 * b.v0,
            v1: a.v1 * b.v0 + a.v0 * b.v1,
            v2: a.v2 * b.v0 + 2.0 * a.v1 * b.v1 + a.v0 * b.v2,
            v3: a.v3 * b.v0 + 3.0 * a.v2 * b.v1 + 3.0 * a.v1 * b.v2 + a.v0 * b.v3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet3) -> Jet3 {
        if rhs.is_constant() {
            return self.scale(1.0 / rhs.v0);
        }
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        self.scale(rhs)
    }
}

impl From<f64> for Jet3 {
    fn from(value: f64) -> Self {
        Jet3::constant(value)
    }
}

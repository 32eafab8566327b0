//! Truncated Taylor series ("jets") for exact higher-order differentiation.
//!
//! A [`Jet`] carries the Taylor coefficients of a function at a point, so
//! composing elementary operations yields derivatives up to order
//! `JET_LEN - 1` without finite differencing. Used by the Wronskian
//! machinery, where 8th-order numeric differentiation would be
//! ill-conditioned.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of Taylor coefficients carried by a [`Jet`] (value + 9 derivatives).
pub const JET_LEN: usize = 10;

/// Truncated Taylor expansion of a scalar function at a point.
///
/// `c[k]` is the k-th Taylor coefficient; the k-th derivative is `c[k] * k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative (k! times the k-th Taylor coefficient).
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    /// Series of the first derivative: d[k] = (k+1) c[k+1].
    fn deriv_series(&self) -> Jet {
        let mut d = [0.0; JET_LEN];
        for k in 0..JET_LEN - 1 {
            d[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Jet { c: d }
    }

    /// Termwise antiderivative with constant term `c0`.
    fn integrate(&self, c0: f64) -> Jet {
        let mut w = [0.0; JET_LEN];
        w[0] = c0;
        for k in 1..JET_LEN {
            w[k] = self.c[k - 1] / k as f64;
        }
        Jet { c: w }
    }

    pub fn recip(self) -> Jet {
        Jet::constant(1.0) / self
    }

    pub fn sqrt(self) -> Jet {
        let mut s = [0.0; JET_LEN];
        s[0] = self.c[0].sqrt();
        for k in 1..JET_LEN {
            let mut acc = self.c[k];
            for i in 1..k {
                acc -= s[i] * s[k - i];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    pub fn powi(self, n: i32) -> Jet {
        if n == 0 {
            return Jet::constant(1.0);
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn ln(self) -> Jet {
        let e = self.deriv_series() / self;
        e.integrate(self.c[0].ln())
    }

    pub fn asin(self) -> Jet {
        let one = Jet::constant(1.0);
        let e = self.deriv_series() / (one - self * self).sqrt();
        e.integrate(self.c[0].asin())
    }

    pub fn atan(self) -> Jet {
        let one = Jet::constant(1.0);
        let e = self.deriv_series() / (one + self * self);
        e.integrate(self.c[0].atan())
    }

    pub fn sin(self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(self) -> Jet {
        self.sin_cos().1
    }

    /// Joint recurrence: s' = c·u', c' = −s·u'.
    pub fn sin_cos(self) -> (Jet, Jet) {
        let mut s = [0.0; JET_LEN];
        let mut co = [0.0; JET_LEN];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..JET_LEN {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for i in 1..=k {
                acc_s += i as f64 * self.c[i] * co[k - i];
                acc_c += i as f64 * self.c[i] * s[k - i];
            }
            s[k] = acc_s / k as f64;
            co[k] = -acc_c / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for k in 0..JET_LEN {
            c[k] += rhs.c[k];
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for k in 0..JET_LEN {
            c[k] -= rhs.c[k];
        }
        Jet { c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut c = self.c;
        for v in &mut c {
            *v = -*v;
        }
        Jet { c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += self.c[i] * rhs.c[k - i];
            }
            c[k] = acc;
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let mut q = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = self.c[k];
            for i in 0..k {
                acc -= q[i] * rhs.c[k - i];
            }
            q[k] = acc / rhs.c[0];
        }
        Jet { c: q }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut c = self.c;
        for v in &mut c {
            *v *= rhs;
        }
        Jet { c }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut c = self.c;
        c[0] += rhs;
        Jet { c }
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        let mut c = self.c;
        c[0] -= rhs;
        Jet { c }
    }
}

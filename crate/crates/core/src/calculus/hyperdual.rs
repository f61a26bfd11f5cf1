//! Scalar types that Lagrangians are evaluated over.
//!
//! [`HyperDual`] carries two independent infinitesimal directions `e1`, `e2`
//! with `e1² = e2² = 0` and a cross term `e1e2`. Seeding `e1` along axis `a`
//! and `e2` along axis `b` yields `∂f/∂x_a`, `∂f/∂x_b` and `∂²f/∂x_a∂x_b` in a
//! single forward pass.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a Lagrangian.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// Real part.
    fn re(&self) -> f64;
    /// True when every derivative part is zero.
    fn is_constant(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, k: i32) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
}

/// Second-order hyper-dual number `re + e1·ε₁ + e2·ε₂ + e12·ε₁ε₂`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        HyperDual { re, e1, e2, e12 }
    }

    /// Variable with the given seeds in each direction.
    pub fn variable(re: f64, seed1: f64, seed2: f64) -> Self {
        HyperDual::new(re, seed1, seed2, 0.0)
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.re`.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        HyperDual {
            re: f0,
            e1: f1 * self.e1,
            e2: f1 * self.e2,
            e12: f1 * self.e12 + f2 * self.e1 * self.e2,
        }
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.re;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Add for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        HyperDual::new(self.re + o.re, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        HyperDual::new(self.re - o.re, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        HyperDual {
            re: self.re * o.re,
            e1: self.e1 * o.re + self.re * o.e1,
            e2: self.e2 * o.re + self.re * o.e2,
            e12: self.e12 * o.re + self.e1 * o.e2 + self.e2 * o.e1 + self.re * o.e12,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        if o.is_constant() {
            let inv = 1.0 / o.re;
            return HyperDual::new(self.re * inv, self.e1 * inv, self.e2 * inv, self.e12 * inv);
        }
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        HyperDual::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl Scalar for HyperDual {
    fn constant(v: f64) -> Self {
        HyperDual::new(v, 0.0, 0.0, 0.0)
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn is_constant(&self) -> bool {
        self.e1 == 0.0 && self.e2 == 0.0 && self.e12 == 0.0
    }

    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(c, -s, -c)
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e, e)
    }

    fn ln(self) -> Self {
        let inv = 1.0 / self.re;
        self.chain(self.re.ln(), inv, -inv * inv)
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.re))
    }

    fn abs(self) -> Self {
        let s = if self.re < 0.0 { -1.0 } else { 1.0 };
        self.chain(self.re.abs(), s, 0.0)
    }

    fn powi(self, k: i32) -> Self {
        match k {
            0 => HyperDual::constant(1.0),
            1 => self,
            _ => {
                let x = self.re;
                let kf = f64::from(k);
                let base = x.powi(k - 2);
                self.chain(x.powi(k), kf * base * x, kf * (kf - 1.0) * base)
            }
        }
    }
}

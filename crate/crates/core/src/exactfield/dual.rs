use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{Field, Rational, Ring};

/// Dual number `a + b·ε` with `ε² = 0`. Evaluating a polynomial expression
/// at `x + v·ε` yields its value and its derivative in direction `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<R> {
    pub re: R,
    pub eps: R,
}

impl<R: Ring> Dual<R> {
    pub fn new(re: R, eps: R) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: R) -> Self {
        Dual { re, eps: R::zero() }
    }
}

impl<R: Ring> Ring for Dual<R> {
    fn zero() -> Self {
        Dual::constant(R::zero())
    }
    fn one() -> Self {
        Dual::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn from_i64(n: i64) -> Self {
        Dual::constant(R::from_i64(n))
    }
}

impl<R: Ring> Add for Dual<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual { re: self.re + rhs.re, eps: self.eps + rhs.eps }
    }
}

impl<R: Ring> Sub for Dual<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual { re: self.re - rhs.re, eps: self.eps - rhs.eps }
    }
}

impl<R: Ring> Mul for Dual<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self.re.clone() * rhs.eps + self.eps * rhs.re.clone();
        Dual { re: self.re * rhs.re, eps }
    }
}

impl<R: Ring> Neg for Dual<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<R: Field> Div for Dual<R> {
    type Output = Self;
    /// Panics when the real part of the divisor is zero.
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.re.inv().expect("dual division by a pure infinitesimal");
        let re = self.re.clone() * inv.clone();
        let eps = (self.eps - re.clone() * rhs.eps) * inv;
        Dual { re, eps }
    }
}

impl<R: Field> Field for Dual<R> {
    fn inv(&self) -> Option<Self> {
        let r = self.re.inv()?;
        Some(Dual { re: r.clone(), eps: -(self.eps.clone() * r.clone() * r) })
    }
    fn from_rational(r: &Rational) -> Self {
        Dual::constant(R::from_rational(r))
    }
    fn field_id() -> String {
        format!("{}[eps]", R::field_id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Rational;

    #[test]
    fn derivative_of_cube() {
        let x = Dual::new(Rational::new(3, 2), Rational::one());
        let y = x.clone() * x.clone() * x;
        assert_eq!(y.re, Rational::new(27, 8));
        assert_eq!(y.eps, Rational::new(27, 4));
    }

    #[test]
    fn derivative_of_reciprocal() {
        let x = Dual::new(Rational::new(2, 1), Rational::one());
        let y = Dual::one() / x;
        assert_eq!(y.re, Rational::new(1, 2));
        assert_eq!(y.eps, Rational::new(-1, 4));
    }
}

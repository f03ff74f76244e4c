use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Field, Rational, Ring};

/// An element `re + im·i` of `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gaussian { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        Gaussian { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re² + im²`.
    pub fn norm(&self) -> Rational {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl Ring for Gaussian {
    fn zero() -> Self {
        Gaussian::real(Rational::zero())
    }
    fn one() -> Self {
        Gaussian::real(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_i64(n: i64) -> Self {
        Gaussian::real(Rational::integer(n))
    }
}

impl Field for Gaussian {
    fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        Some(Gaussian { re: self.re.clone() * n.clone(), im: -self.im.clone() * n })
    }
    fn from_rational(r: &Rational) -> Self {
        Gaussian::real(r.clone())
    }
    fn imag_unit() -> Option<Self> {
        Some(Gaussian::i())
    }
    fn field_id() -> String {
        "Q(i)".into()
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: Gaussian) -> Gaussian {
        Gaussian { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: Gaussian) -> Gaussian {
        Gaussian { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: Gaussian) -> Gaussian {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Gaussian { re, im }
    }
}

impl Div for Gaussian {
    type Output = Gaussian;
    fn div(self, rhs: Gaussian) -> Gaussian {
        self * rhs.inv().expect("gaussian division by zero")
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -self.re, im: -self.im }
    }
}

impl From<Rational> for Gaussian {
    fn from(r: Rational) -> Self {
        Gaussian::real(r)
    }
}

impl fmt::Debug for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{:?}", self.re),
            (true, false) => write!(f, "{:?}*i", self.im),
            (false, false) => write!(f, "({:?} + {:?}*i)", self.re, self.im),
        }
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = Gaussian::i();
        assert_eq!(i.clone() * i, -Gaussian::one());
    }

    #[test]
    fn inverse() {
        let z = Gaussian::new(Rational::new(3, 2), Rational::new(-1, 5));
        assert_eq!(z.clone() * z.inv().unwrap(), Gaussian::one());
        assert!(Gaussian::zero().inv().is_none());
    }

    #[test]
    fn json_shape() {
        let z = Gaussian::new(Rational::new(1, 2), Rational::zero());
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"re":"1/2","im":"0/1"}"#);
    }
}

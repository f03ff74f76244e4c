//! Exact arithmetic: rationals, Gaussian rationals, dense univariate
//! polynomials and the parameter field `Q(i)(H)(I2)`.
//!
//! Everything is built on two small traits. [`Ring`] is what the physical
//! layer needs (it is also implemented for `f64` so the same formulas run on
//! floats), [`Field`] adds inversion and is what polynomial arithmetic and
//! the curve constructions require.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

mod dual;
mod fraction;
mod gaussian;
mod poly;
mod rational;

pub use dual::Dual;
pub use fraction::{Frac, QiH, VarH, VarI2, Variable, ParamField};
pub use gaussian::Gaussian;
pub use poly::Poly;
pub use rational::Rational;

/// A commutative ring with unit.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// A field. For the exact types equality is total and decidable; the float
/// implementations exist so generic code can be reused numerically.
pub trait Field: Ring + Div<Output = Self> {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn from_rational(r: &Rational) -> Self;

    /// The square root of −1 if the field contains one.
    fn imag_unit() -> Option<Self> {
        None
    }

    /// Human readable name such as `Q(i)(H)(I2)`.
    fn field_id() -> String;

    /// A cheap proof that `p` is squarefree, if the field has one (for
    /// function fields: a squarefree specialization of the same degree).
    /// `None` means undecided.
    fn certify_squarefree(_p: &Poly<Self>) -> Option<bool> {
        None
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Field for f64 {
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn field_id() -> String {
        "f64".into()
    }
}

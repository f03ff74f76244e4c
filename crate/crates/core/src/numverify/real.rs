use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{FromPrimitive, Num, ToPrimitive};
use twofloat::TwoFloat;

use crate::exactfield::{Field, Gaussian, Poly, Rational, Ring};

/// Floating-point scalar usable by the numeric layer: hardware doubles or
/// double-double software floats.
pub trait Real:
    Num + Copy + PartialOrd + Neg<Output = Self> + Debug + Display + Default + Send + Sync + 'static
{
    /// Mantissa bits.
    const BITS: u32;

    fn of(x: f64) -> Self;
    fn f64(self) -> f64;
    fn sqrt(self) -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.f64().is_finite()
    }

    /// Correctly rounded up to the working precision (numerator and
    /// denominator are split into high and low doubles first).
    fn rat(r: &Rational) -> Self {
        split::<Self>(r.numer()) / split::<Self>(r.denom())
    }

    /// `2^-mantissa`.
    fn unit_roundoff() -> f64 {
        2f64.powi(-(Self::BITS as i32))
    }
}

fn split<T: Real>(n: &BigInt) -> T {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return T::of(hi);
    }
    let rest = n - BigInt::from_f64(hi).unwrap_or_default();
    T::of(hi) + T::of(rest.to_f64().unwrap_or(0.0))
}

impl Real for f64 {
    const BITS: u32 = 53;
    fn of(x: f64) -> Self {
        x
    }
    fn f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Double-double number (about 106 mantissa bits) on top of `TwoFloat`.
/// Division is long division with two correction terms; `TwoFloat`'s own
/// quotient is only accurate to a double.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DoubleDouble(self.0 + o.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        DoubleDouble(self.0 - o.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DoubleDouble(self.0 * o.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let b = o.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        DoubleDouble(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        DoubleDouble(self.0 % o.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl num_traits::Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl num_traits::One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble(TwoFloat::from(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(|x| DoubleDouble(TwoFloat::from(x)))
    }
}

impl Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Real for DoubleDouble {
    const BITS: u32 = 106;
    fn of(x: f64) -> Self {
        DoubleDouble(TwoFloat::from(x))
    }
    fn f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn sqrt(self) -> Self {
        if self.0.hi() <= 0.0 {
            return DoubleDouble(TwoFloat::from(0.0));
        }
        DoubleDouble(self.0.sqrt())
    }
}

pub type C<T> = Complex<T>;

impl<T: Real> Ring for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re == T::zero() && self.im == T::zero()
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(T::of(n as f64), T::zero())
    }
}

impl<T: Real> Field for Complex<T> {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(Complex::new(T::one(), T::zero()) / *self)
        }
    }
    fn from_rational(r: &Rational) -> Self {
        Complex::new(T::rat(r), T::zero())
    }
    fn imag_unit() -> Option<Self> {
        Some(Complex::new(T::zero(), T::one()))
    }
    fn field_id() -> String {
        format!("C[{} bits]", T::BITS)
    }
}

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

pub fn cr<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `|z|` at working precision, scaled against overflow.
pub fn modulus<T: Real>(z: C<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let m = if a > b { a } else { b };
    if m == T::zero() {
        return m;
    }
    let (x, y) = (a / m, b / m);
    m * (x * x + y * y).sqrt()
}

/// Principal square root.
pub fn csqrt<T: Real>(z: C<T>) -> C<T> {
    let r = modulus(z);
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let two = T::of(2.0);
    let t = ((r + z.re.abs()) / two).sqrt();
    if z.re >= T::zero() {
        Complex::new(t, z.im / (two * t))
    } else {
        let s = if z.im < T::zero() { -t } else { t };
        Complex::new(z.im.abs() / (two * t), s)
    }
}

pub fn from_gaussian<T: Real>(z: &Gaussian) -> C<T> {
    Complex::new(T::rat(&z.re), T::rat(&z.im))
}

pub fn poly_q<T: Real>(p: &Poly<Rational>) -> Poly<C<T>> {
    p.map(|r| C::<T>::from_rational(r))
}

pub fn poly_qi<T: Real>(p: &Poly<Gaussian>) -> Poly<C<T>> {
    p.map(from_gaussian::<T>)
}

/// `|z|` as a double, for tolerances and reports.
pub fn abs<T: Real>(z: C<T>) -> f64 {
    modulus(z).f64()
}

pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.f64(), z.im.f64())
}

/// Largest coefficient modulus, used to scale residuals.
pub fn coeff_scale<T: Real>(p: &Poly<C<T>>) -> f64 {
    p.coeffs().iter().map(|z| abs(*z)).fold(0.0, f64::max)
}

/// `Σ |a_k| |x|^k`, the natural magnitude of `p(x)` for relative residuals.
pub fn eval_scale<T: Real>(p: &Poly<C<T>>, x: C<T>) -> f64 {
    let r = abs(x);
    p.coeffs().iter().rev().fold(0.0, |acc, a| acc * r + abs(*a))
}

#[cfg(test)]
mod tests {
    use super::*;

    type DD = DoubleDouble;

    #[test]
    fn third_in_double_double() {
        let t = DD::rat(&Rational::new(1, 3));
        let err = (t * DD::of(3.0) - DD::of(1.0)).abs();
        assert!(err.f64() < 1e-31, "{}", err.f64());
        let q = DD::of(2.0) / DD::of(7.0) * DD::of(7.0) - DD::of(2.0);
        assert!(q.abs().f64() < 1e-31);
    }

    #[test]
    fn complex_sqrt_branches() {
        for (re, im) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (0.0, -2.0), (-1.0, 0.0)] {
            let z: C<f64> = c(re, im);
            let s = csqrt(z);
            assert!(abs(s * s - z) < 1e-14);
            assert!(s.re >= 0.0);
        }
        let z: C<DD> = c(2.0, 0.0);
        let s = csqrt(z);
        assert!(abs(s * s - z) < 1e-30);
    }

    #[test]
    fn complex_field_inverse() {
        let z: C<f64> = c(3.0, -4.0);
        let w = Field::inv(&z).unwrap();
        assert!(abs(z * w - C::one()) < 1e-15);
        assert!(Field::inv(&C::<f64>::zero()).is_none());
        let z: C<DD> = c(3.0, -4.0);
        let w = Field::inv(&z).unwrap();
        assert!(abs(z * w - C::one()) < 1e-30);
    }
}

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Field, Gaussian, Poly, Rational, Ring};
use crate::error::{Error, Result};

/// Marker naming the transcendental generator of a [`Frac`] level.
pub trait Variable: Clone + PartialEq + Eq + Hash + fmt::Debug + Default {
    const NAME: &'static str;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct VarH;

impl Variable for VarH {
    const NAME: &'static str = "H";
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct VarI2;

impl Variable for VarI2 {
    const NAME: &'static str = "I2";
}

/// `Q(i)(H)`.
pub type QiH = Frac<Gaussian, VarH>;
/// `Q(i)(H)(I2)`, the field of definition of both curves.
pub type ParamField = Frac<QiH, VarI2>;

/// Element `num/den` of the rational function field `F(V)`.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic, and zero is `0/1`. With
/// this normalization structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frac<F, V> {
    num: Poly<F>,
    den: Poly<F>,
    var: PhantomData<V>,
}

impl<F: Field, V: Variable> Frac<F, V> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Frac::from_poly(Poly::zero()));
        }
        let g = Poly::gcd(&num, &den)?;
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        let lc = den.lc();
        if !lc.is_one() {
            let inv = lc.inv().ok_or(Error::DivisionByZero)?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Frac { num, den, var: PhantomData })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        Frac { num: p, den: Poly::one(), var: PhantomData }
    }

    pub fn constant(c: F) -> Self {
        Frac::from_poly(Poly::constant(c))
    }

    /// The generator itself.
    pub fn var() -> Self {
        Frac::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    /// Returns the element if it does not depend on the generator.
    pub fn as_constant(&self) -> Option<F> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Evaluate at `at`, mapping coefficients through `down` first. Fails
    /// with [`Error::Pole`] when the denominator vanishes there.
    pub fn eval_with<G: Field>(&self, down: &impl Fn(&F) -> Result<G>, at: &G) -> Result<G> {
        let num = self.num.try_map(down)?.eval(at);
        let den = self.den.try_map(down)?.eval(at);
        match den.inv() {
            Some(inv) => Ok(num * inv),
            None => Err(Error::Pole(format!("{} = {:?}", V::NAME, at))),
        }
    }

    /// Evaluate at a point of the coefficient field.
    pub fn eval(&self, at: &F) -> Result<F> {
        self.eval_with(&|c: &F| Ok(c.clone()), at)
    }

    fn is_canonical(&self) -> bool {
        Frac::<F, V>::new(self.num.clone(), self.den.clone()).as_ref() == Ok(self)
    }
}

impl QiH {
    pub fn h() -> Self {
        Frac::var()
    }
}

impl ParamField {
    pub fn h() -> Self {
        Frac::constant(QiH::var())
    }

    pub fn i2() -> Self {
        Frac::var()
    }

    pub fn i() -> Self {
        Frac::constant(QiH::constant(Gaussian::i()))
    }

    /// Substitute `H = h`, `I2 = k`.
    pub fn specialize(&self, h: &Gaussian, k: &Gaussian) -> Result<Gaussian> {
        let down = |c: &QiH| c.eval(h);
        self.eval_with(&down, k)
    }

    pub fn specialize_rational(&self, h: &Rational, k: &Rational) -> Result<Rational> {
        let z = self.specialize(&Gaussian::real(h.clone()), &Gaussian::real(k.clone()))?;
        if z.is_real() {
            Ok(z.re)
        } else {
            Err(Error::Parse(format!("{z:?} is not rational")))
        }
    }
}

impl<F: Field, V: Variable> Ring for Frac<F, V> {
    fn zero() -> Self {
        Frac::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Frac::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn from_i64(n: i64) -> Self {
        Frac::constant(F::from_i64(n))
    }
}

impl<F: Field, V: Variable> Field for Frac<F, V> {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Frac::new(self.den.clone(), self.num.clone()).ok()
        }
    }
    fn from_rational(r: &Rational) -> Self {
        Frac::constant(F::from_rational(r))
    }
    fn imag_unit() -> Option<Self> {
        F::imag_unit().map(Frac::constant)
    }
    fn field_id() -> String {
        format!("{}({})", F::field_id(), V::NAME)
    }
    /// Substitute a few fixed values for the variable; a squarefree
    /// specialization of the same degree proves `p` squarefree.
    fn certify_squarefree(p: &Poly<Self>) -> Option<bool> {
        for (n, d) in [(3, 7), (-5, 11), (13, 17)] {
            let at = F::from_rational(&Rational::new(n, d));
            let Ok(q) = p.try_map(|c| c.eval(&at)) else { continue };
            if q.deg() == p.deg() && q.is_squarefree() {
                return Some(true);
            }
        }
        None
    }
}

impl<F: Field, V: Variable> Add for Frac<F, V> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return Frac::new(&self.num + &rhs.num, self.den).expect("nonzero denominator");
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Frac::new(num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl<F: Field, V: Variable> Sub for Frac<F, V> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field, V: Variable> Mul for Frac<F, V> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.den.is_constant() && rhs.den.is_constant() {
            return Frac::from_poly(&self.num * &rhs.num);
        }
        Frac::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl<F: Field, V: Variable> Div for Frac<F, V> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in rational function field")
    }
}

impl<F: Field, V: Variable> Neg for Frac<F, V> {
    type Output = Self;
    fn neg(self) -> Self {
        Frac { num: -self.num, den: self.den, var: PhantomData }
    }
}

impl<F: Field + fmt::Debug, V: Variable> fmt::Debug for Frac<F, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.display_in(V::NAME);
        if self.den.is_one() {
            if self.num.coeffs().len() > 1 {
                write!(f, "({num})")
            } else {
                f.write_str(&num)
            }
        } else {
            write!(f, "({num})/({})", self.den.display_in(V::NAME))
        }
    }
}

impl<F: Field + fmt::Debug, V: Variable> fmt::Display for Frac<F, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FracRepr<P> {
    num: P,
    den: P,
}

impl<F: Field + Serialize, V: Variable> Serialize for Frac<F, V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FracRepr { num: &self.num, den: &self.den }.serialize(s)
    }
}

impl<'de, F: Field + Deserialize<'de>, V: Variable> Deserialize<'de> for Frac<F, V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FracRepr::<Poly<F>>::deserialize(d)?;
        let out = Frac::new(r.num, r.den).map_err(serde::de::Error::custom)?;
        debug_assert!(out.is_canonical());
        Ok(out)
    }
}

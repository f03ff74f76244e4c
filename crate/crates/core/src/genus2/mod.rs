//! Genus-2 curve models, quadratic splittings and Richelot's construction.

mod pullback;
mod richelot;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly};

pub use pullback::{pullback_matrix, DiffPullback, FormBasis, TimeVar, VelocityVector};
pub use richelot::{
    bracket, correspondence, dual_splitting, richelot_split, richelot_transform, split_delta, BiPoly,
    CorrespondenceZ, QuadSplit, RichelotOut,
};

/// The curve `y² = f(x)` with `f` squarefree of degree 5 or 6.
#[derive(Clone, PartialEq, Debug)]
pub struct HyperCurve<F> {
    f: Poly<F>,
}

impl<F: Field> HyperCurve<F> {
    pub fn new(f: Poly<F>) -> Result<Self> {
        let d = f.deg().unwrap_or(0);
        if d != 5 && d != 6 {
            return Err(Error::WrongDegree(d));
        }
        if !f.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        Ok(HyperCurve { f })
    }

    /// Skip the squarefreeness test. Used for floating-point models where an
    /// exact discriminant comparison is meaningless.
    pub fn new_unchecked(f: Poly<F>) -> Self {
        HyperCurve { f }
    }

    pub fn f(&self) -> &Poly<F> {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.deg().unwrap_or(0)
    }

    pub fn is_quintic(&self) -> bool {
        self.degree() == 5
    }

    pub fn field_id(&self) -> String {
        F::field_id()
    }

    /// `y² = twist·f(x + a)`. With `a = −H` this is the translation
    /// `X̃ = X + H`.
    pub fn affine_change(&self, a: &F, twist: &F) -> Result<Self> {
        if twist.is_zero() {
            return Err(Error::ZeroTwist);
        }
        Ok(HyperCurve { f: self.f.shift(a).scale(twist) })
    }

    pub fn twist(&self, c: &F) -> Result<Self> {
        self.affine_change(&F::zero(), c)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> HyperCurve<G> {
        HyperCurve { f: self.f.map(f) }
    }

    pub fn try_map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<HyperCurve<G>> {
        HyperCurve::new(self.f.try_map(f)?)
    }

    /// Solve `other.f(x) = t·self.f(x + a)` for `(a, t)`. The translation is
    /// read off the subleading coefficient and the result verified exactly.
    pub fn affine_twist_to(&self, other: &HyperCurve<F>) -> Option<(F, F)> {
        let n = self.degree();
        if other.degree() != n {
            return None;
        }
        let t = other.f.lc() / self.f.lc();
        let sub = other.f.coeff(n - 1) / t.clone() - self.f.coeff(n - 1);
        let a = sub / (F::from_i64(n as i64) * self.f.lc());
        let moved = self.affine_change(&a, &t).ok()?;
        (moved.f == other.f).then_some((a, t))
    }
}

#[derive(Serialize, Deserialize)]
struct CurveRepr<P> {
    field: String,
    f: P,
}

impl<F: Field + Serialize> Serialize for HyperCurve<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveRepr { field: F::field_id(), f: &self.f }.serialize(s)
    }
}

impl<'de, F: Field + Deserialize<'de>> Deserialize<'de> for HyperCurve<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CurveRepr::<Poly<F>>::deserialize(d)?;
        if r.field != F::field_id() {
            return Err(serde::de::Error::custom(format!(
                "field mismatch: expected {}, found {}",
                F::field_id(),
                r.field
            )));
        }
        HyperCurve::new(r.f).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Rational, Ring};

    type P = Poly<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c2_at_1_2() -> P {
        let g2 = P::new(vec![q(1, 2), q(2, 1), q(1, 1)]);
        let g3 = P::new(vec![q(-1, 2), q(2, 1), q(1, 1)]);
        &(&P::x() * &g2) * &g3
    }

    #[test]
    fn curve_from_poly_cases() {
        assert!(HyperCurve::new(c2_at_1_2()).is_ok());
        let sq = P::new(vec![q(1, 2), q(1, 1)]);
        let bad = &(&(&P::x() * &sq) * &sq) * &P::new(vec![q(-3, 4), q(1, 1), q(1, 1)]);
        assert_eq!(HyperCurve::new(bad), Err(Error::NotSquarefree));
        assert_eq!(HyperCurve::new(P::from_ints(&[0, 0, 0, 1])), Err(Error::WrongDegree(3)));
    }

    #[test]
    fn twist_twice_is_identity() {
        let c = HyperCurve::new(c2_at_1_2()).unwrap();
        let m1 = Rational::integer(-1);
        assert_eq!(c.twist(&m1).unwrap().twist(&m1).unwrap(), c);
        assert_eq!(c.affine_change(&Rational::zero(), &Rational::one()).unwrap(), c);
        assert_eq!(c.twist(&Rational::zero()), Err(Error::ZeroTwist));
    }

    #[test]
    fn affine_twist_recovered() {
        let c = HyperCurve::new(c2_at_1_2()).unwrap();
        let (a, t) = (q(-7, 3), q(5, 2));
        let d = c.affine_change(&a, &t).unwrap();
        assert_eq!(c.affine_twist_to(&d), Some((a, t)));
    }

    #[test]
    fn json_shape() {
        let c = HyperCurve::new(P::from_ints(&[0, 1, 0, 0, 0, 1])).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"field":"Q","f":["0/1","1/1","0/1","0/1","0/1","1/1"]}"#);
        let back: HyperCurve<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}

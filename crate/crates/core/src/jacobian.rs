//! Exact Jacobian arithmetic on quintic models `y² = f(x)` in Mumford
//! representation, with Cantor's composition and reduction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Ring};
use crate::genus2::HyperCurve;

/// A reduced divisor class `(u, v)`: `u` monic of degree ≤ 2, `deg v < deg u`
/// and `u | v² − f`. The identity is `(1, 0)`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct MumfordClass<F> {
    pub u: Poly<F>,
    pub v: Poly<F>,
}

/// A class of order dividing 2 together with the factor of `f` it comes from.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TorsionClass<F> {
    pub factor: Poly<F>,
    pub class: MumfordClass<F>,
}

fn require_quintic<F: Field>(c: &HyperCurve<F>) -> Result<()> {
    if c.is_quintic() {
        Ok(())
    } else {
        Err(Error::EvenDegreeModel)
    }
}

impl<F: Field> MumfordClass<F> {
    pub fn identity() -> Self {
        MumfordClass { u: Poly::one(), v: Poly::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    /// Validated constructor.
    pub fn make(u: Poly<F>, v: Poly<F>, c: &HyperCurve<F>) -> Result<Self> {
        require_quintic(c)?;
        let du = u.deg().ok_or_else(|| Error::InvalidMumford("u = 0".into()))?;
        if du > 2 {
            return Err(Error::InvalidMumford(format!("deg u = {du} > 2")));
        }
        if !u.lc().is_one() {
            return Err(Error::InvalidMumford("u is not monic".into()));
        }
        if v.degree() >= (du.max(1) as isize) || (du == 0 && !v.is_zero()) {
            return Err(Error::InvalidMumford("deg v must be below deg u".into()));
        }
        let w = &(&v * &v) - c.f();
        if !w.rem(&u)?.is_zero() {
            return Err(Error::InvalidMumford("u does not divide v² − f".into()));
        }
        Ok(MumfordClass { u, v })
    }

    pub fn is_on(&self, c: &HyperCurve<F>) -> bool {
        MumfordClass::make(self.u.clone(), self.v.clone(), c).is_ok()
    }

    pub fn neg(&self) -> Self {
        MumfordClass { u: self.u.clone(), v: -&self.v }
    }

    pub fn double(&self, c: &HyperCurve<F>) -> Result<Self> {
        cantor_add(self, self, c)
    }

    /// `n·D` by double-and-add; negative `n` uses the inverse.
    pub fn mul(&self, n: i64, c: &HyperCurve<F>) -> Result<Self> {
        let base = if n < 0 { self.neg() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = MumfordClass::identity();
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = cantor_add(&acc, &pow, c)?;
            }
            k >>= 1;
            if k > 0 {
                pow = pow.double(c)?;
            }
        }
        Ok(acc)
    }
}

/// Reduce a semi-reduced pair `(u, v)` with `u | v² − f` to a class.
fn reduce<F: Field>(mut u: Poly<F>, mut v: Poly<F>, f: &Poly<F>) -> Result<MumfordClass<F>> {
    while u.degree() > 2 {
        let u2 = (f - &(&v * &v)).exact_div(&u)?;
        v = (-&v).rem(&u2)?;
        u = u2;
    }
    let u = u.monic();
    let v = v.rem(&u)?;
    Ok(MumfordClass { u, v })
}

/// Cantor's group law.
pub fn cantor_add<F: Field>(
    a: &MumfordClass<F>,
    b: &MumfordClass<F>,
    c: &HyperCurve<F>,
) -> Result<MumfordClass<F>> {
    require_quintic(c)?;
    if !a.is_on(c) || !b.is_on(c) {
        return Err(Error::CurveMismatch);
    }
    let f = c.f();
    let (d1, e1, e2) = Poly::xgcd(&a.u, &b.u);
    let vs = &a.v + &b.v;
    let (d, c1, c2) = Poly::xgcd(&d1, &vs);
    let s1 = &c1 * &e1;
    let s2 = &c1 * &e2;
    let u = (&a.u * &b.u).exact_div(&(&d * &d))?;
    let num = &(&(&s1 * &(&a.u * &b.v)) + &(&s2 * &(&b.u * &a.v))) + &(&c2 * &(&(&a.v * &b.v) + f));
    let v = num.exact_div(&d)?.rem(&u)?;
    reduce(u, v, f)
}

/// `(G/lc(G), 0)` for a factor `G` of `f` of degree 1 or 2.
pub fn two_torsion_from_factor<F: Field>(g: &Poly<F>, c: &HyperCurve<F>) -> Result<TorsionClass<F>> {
    require_quintic(c)?;
    match g.deg() {
        Some(1) | Some(2) => {}
        _ => return Err(Error::NotADivisor(format!("{g:?}"))),
    }
    if !g.divides(c.f()) {
        return Err(Error::NotADivisor(format!("{g:?}")));
    }
    let class = MumfordClass::make(g.monic(), Poly::zero(), c)?;
    Ok(TorsionClass { factor: g.clone(), class })
}

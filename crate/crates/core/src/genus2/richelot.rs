use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HyperCurve;
use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly};

/// `[G, H] = G'H − GH'` for polynomials of degree at most 2, written out
/// coefficientwise: for `G = ax²+bx+c`, `H = dx²+ex+f` it is
/// `(ae−bd)x² + 2(af−cd)x + (bf−ce)`.
pub fn bracket<F: Field>(g: &Poly<F>, h: &Poly<F>) -> Poly<F> {
    let (a, b, c) = (g.coeff(2), g.coeff(1), g.coeff(0));
    let (d, e, f) = (h.coeff(2), h.coeff(1), h.coeff(0));
    let two = F::from_i64(2);
    Poly::new(vec![
        b.clone() * f.clone() - c.clone() * e.clone(),
        two * (a.clone() * f - c * d.clone()),
        a * e - b * d,
    ])
}

/// A factorization `f = G1·G2·G3` into factors of degree at most 2.
#[derive(Clone, PartialEq, Debug)]
pub struct QuadSplit<F> {
    g: [Poly<F>; 3],
}

impl<F: Field> QuadSplit<F> {
    /// Checks degrees only: each factor has degree ≤ 2 and at most one has
    /// degree below 2.
    pub fn new(g1: Poly<F>, g2: Poly<F>, g3: Poly<F>) -> Result<Self> {
        let g = [g1, g2, g3];
        let mut low = 0;
        for gi in &g {
            match gi.deg() {
                None => return Err(Error::SplittingMismatch),
                Some(d) if d > 2 => return Err(Error::SplittingDegree(d)),
                Some(d) if d < 2 => low += 1,
                _ => {}
            }
        }
        if low > 1 {
            return Err(Error::SplittingMismatch);
        }
        Ok(QuadSplit { g })
    }

    /// A splitting of the given curve: the product must equal `f` exactly.
    pub fn for_curve(c: &HyperCurve<F>, g1: Poly<F>, g2: Poly<F>, g3: Poly<F>) -> Result<Self> {
        let s = QuadSplit::new(g1, g2, g3)?;
        if &s.product() != c.f() {
            return Err(Error::SplittingMismatch);
        }
        Ok(s)
    }

    pub fn g(&self, i: usize) -> &Poly<F> {
        &self.g[i]
    }

    pub fn factors(&self) -> &[Poly<F>; 3] {
        &self.g
    }

    pub fn product(&self) -> Poly<F> {
        &(&self.g[0] * &self.g[1]) * &self.g[2]
    }

    /// Coefficient rows `(g_j2, g_j1, g_j0)`.
    pub fn rows(&self) -> [[F; 3]; 3] {
        self.g.clone().map(|p| [p.coeff(2), p.coeff(1), p.coeff(0)])
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> QuadSplit<G> {
        QuadSplit { g: self.g.clone().map(|p| p.map(&f)) }
    }
}

/// `Δ = det(g_ij)` with columns in the order `(g_j2, g_j1, g_j0)`.
pub fn split_delta<F: Field>(s: &QuadSplit<F>) -> F {
    let m = s.rows();
    let minor = |a: usize, b: usize| {
        m[1][a].clone() * m[2][b].clone() - m[1][b].clone() * m[2][a].clone()
    };
    m[0][0].clone() * minor(1, 2) - m[0][1].clone() * minor(0, 2) + m[0][2].clone() * minor(0, 1)
}

/// Output of one Richelot step: `Lj = [Gk, Gl]` cyclically, `Δ`, and the
/// image curve `Y² = −L1L2L3/Δ`.
#[derive(Clone, PartialEq, Debug)]
pub struct RichelotOut<F> {
    pub l: [Poly<F>; 3],
    pub delta: F,
    pub image: HyperCurve<F>,
}

impl<F: Field> RichelotOut<F> {
    fn compute(s: &QuadSplit<F>, checked: bool) -> Result<Self> {
        let delta = split_delta(s);
        let Some(dinv) = delta.inv() else {
            return Err(Error::DeltaZero);
        };
        let l = [
            bracket(&s.g[1], &s.g[2]),
            bracket(&s.g[2], &s.g[0]),
            bracket(&s.g[0], &s.g[1]),
        ];
        let big_f = &(&l[0] * &l[1]) * &l[2];
        let fhat = big_f.scale(&-dinv);
        let image = if checked {
            HyperCurve::new(fhat)?
        } else {
            HyperCurve::new_unchecked(fhat)
        };
        Ok(RichelotOut { l, delta, image })
    }

    /// Richelot step without the squarefreeness test on the image; for
    /// floating-point fields.
    pub fn numeric(s: &QuadSplit<F>) -> Result<Self> {
        RichelotOut::compute(s, false)
    }

    /// `F = L1·L2·L3`.
    pub fn big_f(&self) -> Poly<F> {
        &(&self.l[0] * &self.l[1]) * &self.l[2]
    }
}

/// Richelot step on a splitting whose product is taken as the curve.
pub fn richelot_split<F: Field>(s: &QuadSplit<F>) -> Result<RichelotOut<F>> {
    RichelotOut::compute(s, true)
}

/// Richelot step for `c` along `s`; the splitting must multiply to `c`'s
/// polynomial.
pub fn richelot_transform<F: Field>(c: &HyperCurve<F>, s: &QuadSplit<F>) -> Result<RichelotOut<F>> {
    if &s.product() != c.f() {
        return Err(Error::SplittingMismatch);
    }
    richelot_split(s)
}

/// The splitting `(−L1/Δ, L2, L3)` of the image polynomial. Its own Richelot
/// step returns `4·f`, the original curve twisted by a square.
pub fn dual_splitting<F: Field>(r: &RichelotOut<F>) -> QuadSplit<F> {
    let dinv = r.delta.inv().expect("nonzero delta");
    QuadSplit { g: [r.l[0].scale(&-dinv), r.l[1].clone(), r.l[2].clone()] }
}

/// Polynomial in two variables, `c[i][j]` the coefficient of `x^i X^j`.
#[derive(Clone, PartialEq, Debug, Serialize)]
#[serde(transparent)]
pub struct BiPoly<F> {
    pub c: Vec<Vec<F>>,
}

impl<F: Field> BiPoly<F> {
    fn outer(p: &Poly<F>, q: &Poly<F>) -> Self {
        BiPoly {
            c: p.coeffs()
                .iter()
                .map(|a| q.coeffs().iter().map(|b| a.clone() * b.clone()).collect())
                .collect(),
        }
    }

    fn add(&self, o: &BiPoly<F>) -> Self {
        let rows = self.c.len().max(o.c.len());
        let get = |m: &Vec<Vec<F>>, i: usize, j: usize| {
            m.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(F::zero)
        };
        let cols = self.c.iter().chain(&o.c).map(Vec::len).max().unwrap_or(0);
        BiPoly {
            c: (0..rows)
                .map(|i| (0..cols).map(|j| get(&self.c, i, j) + get(&o.c, i, j)).collect())
                .collect(),
        }
    }

    pub fn eval(&self, x: &F, big_x: &F) -> F {
        let mut acc = F::zero();
        for row in self.c.iter().rev() {
            let mut r = F::zero();
            for a in row.iter().rev() {
                r = r * big_x.clone() + a.clone();
            }
            acc = acc * x.clone() + r;
        }
        acc
    }
}

/// The correspondence `Z ⊂ C × Ĉ`:
/// `G1(x)L1(X) + G2(x)L2(X) = 0` and `G1(x)L1(X)(x − X) = yY`.
#[derive(Clone, PartialEq, Debug)]
pub struct CorrespondenceZ<F> {
    pub g: [Poly<F>; 3],
    pub l: [Poly<F>; 3],
}

impl<F: Field> CorrespondenceZ<F> {
    pub fn new(s: &QuadSplit<F>, r: &RichelotOut<F>) -> Self {
        CorrespondenceZ { g: s.g.clone(), l: r.l.clone() }
    }

    /// `G1(x)L1(X) + G2(x)L2(X)`.
    pub fn relation1(&self) -> BiPoly<F> {
        BiPoly::outer(&self.g[0], &self.l[0]).add(&BiPoly::outer(&self.g[1], &self.l[1]))
    }

    /// `G1(x)L1(X)(x − X)`, the left side of `= yY`.
    pub fn relation2(&self) -> BiPoly<F> {
        let xg = &Poly::x() * &self.g[0];
        let xl = &Poly::x() * &self.l[0];
        let neg = BiPoly::outer(&self.g[0], &xl);
        let neg = BiPoly { c: neg.c.into_iter().map(|r| r.into_iter().map(|a| -a).collect()).collect() };
        BiPoly::outer(&xg, &self.l[0]).add(&neg)
    }

    /// The first relation at fixed `x`, as a polynomial in `X`.
    pub fn in_big_x(&self, x: &F) -> Poly<F> {
        &self.l[0].scale(&self.g[0].eval(x)) + &self.l[1].scale(&self.g[1].eval(x))
    }

    /// The first relation at fixed `X`, as a polynomial in `x`.
    pub fn in_x(&self, big_x: &F) -> Poly<F> {
        &self.g[0].scale(&self.l[0].eval(big_x)) + &self.g[1].scale(&self.l[1].eval(big_x))
    }

    /// `G1(x)L1(X)(x − X)`.
    pub fn product(&self, x: &F, big_x: &F) -> F {
        self.g[0].eval(x) * self.l[0].eval(big_x) * (x.clone() - big_x.clone())
    }
}

pub fn correspondence<F: Field>(s: &QuadSplit<F>, r: &RichelotOut<F>) -> CorrespondenceZ<F> {
    CorrespondenceZ::new(s, r)
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct SplitRepr<P> {
    G1: P,
    G2: P,
    G3: P,
}

impl<F: Field + Serialize> Serialize for QuadSplit<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SplitRepr { G1: &self.g[0], G2: &self.g[1], G3: &self.g[2] }.serialize(s)
    }
}

impl<'de, F: Field + Deserialize<'de>> Deserialize<'de> for QuadSplit<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SplitRepr::<Poly<F>>::deserialize(d)?;
        QuadSplit::new(r.G1, r.G2, r.G3).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct RichelotRepr<'a, F: Field> {
    L1: &'a Poly<F>,
    L2: &'a Poly<F>,
    L3: &'a Poly<F>,
    delta: &'a F,
    image: &'a HyperCurve<F>,
}

impl<F: Field + Serialize> Serialize for RichelotOut<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RichelotRepr { L1: &self.l[0], L2: &self.l[1], L3: &self.l[2], delta: &self.delta, image: &self.image }
            .serialize(s)
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

    fn c2_split() -> QuadSplit<Rational> {
        QuadSplit::new(
            P::x(),
            P::new(vec![q(1, 2), q(2, 1), q(1, 1)]),
            P::new(vec![q(-1, 2), q(2, 1), q(1, 1)]),
        )
        .unwrap()
    }

    /// `G'H − GH'` computed through generic polynomial arithmetic.
    fn bracket_oracle(g: &P, h: &P) -> P {
        &(&g.derivative() * h) - &(g * &h.derivative())
    }

    #[test]
    fn bracket_examples() {
        let g3 = P::new(vec![q(-1, 2), q(2, 1), q(1, 1)]);
        assert_eq!(bracket(&g3, &P::x()), P::new(vec![q(1, 2), q(0, 1), q(1, 1)]));
        assert!(bracket(&g3, &g3).is_zero());
        let a = P::from_ints(&[3, -2, 5]);
        let b = P::from_ints(&[-1, 7, 2]);
        assert_eq!(bracket(&a, &b), bracket_oracle(&a, &b));
        assert_eq!(bracket(&a, &b), -bracket(&b, &a));
    }

    #[test]
    fn c2_step_at_1_2() {
        let s = c2_split();
        assert_eq!(split_delta(&s), Rational::one());
        let r = richelot_split(&s).unwrap();
        assert_eq!(r.l[0], P::from_ints(&[-2, -2]));
        assert_eq!(r.l[1], P::new(vec![q(1, 2), q(0, 1), q(1, 1)]));
        assert_eq!(r.l[2], P::new(vec![q(1, 2), q(0, 1), q(-1, 1)]));
        let d = dual_splitting(&r);
        assert_eq!(bracket(&r.l[1], &r.l[2]), P::from_ints(&[0, 2]));
        assert_eq!(bracket(&r.l[2], &r.l[0]), P::from_ints(&[1, 4, 2]));
        assert_eq!(d.product(), *r.image.f());
        let back = richelot_split(&d).unwrap();
        assert_eq!(back.image.f(), &s.product().scale(&Rational::integer(4)));
    }

    #[test]
    fn equal_rows_degenerate() {
        let g = P::from_ints(&[1, 2, 1]);
        let s = QuadSplit::new(g.clone(), g, P::from_ints(&[3, 0, 1])).unwrap();
        assert_eq!(split_delta(&s), Rational::zero());
        assert_eq!(richelot_split(&s), Err(Error::DeltaZero));
    }

    #[test]
    fn correspondence_relation_at_1_2() {
        let s = c2_split();
        let r = richelot_split(&s).unwrap();
        let z = correspondence(&s, &r);
        let rel = z.relation1();
        let x = q(3, 7);
        let big_x = q(-5, 2);
        let direct = x.clone() * (q(-2, 1) * big_x.clone() - q(2, 1))
            + (x.clone() * x.clone() + q(2, 1) * x.clone() + q(1, 2))
                * (big_x.clone() * big_x.clone() + q(1, 2));
        assert_eq!(rel.eval(&x, &big_x), direct);
        // at the root x = 0 of G1 only G2(0)L2(X) survives
        assert_eq!(z.in_big_x(&Rational::zero()), r.l[1].scale(&q(1, 2)));
        assert_eq!(z.relation2().eval(&x, &big_x), z.product(&x, &big_x));
    }

    #[test]
    fn json_shapes() {
        let s = c2_split();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["G1"], serde_json::json!(["0/1", "1/1"]));
        let r = richelot_split(&s).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["delta"], "1/1");
        assert_eq!(v["image"]["field"], "Q");
    }
}

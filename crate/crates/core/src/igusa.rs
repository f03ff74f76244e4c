//! Igusa–Clebsch invariants of binary sextics via Clebsch transvectants,
//! and isomorphism testing over the algebraic closure.
//!
//! A quintic `f` is read as the sextic form `Σ a_k X^k Z^(6−k)` with
//! `a_6 = 0`, i.e. with a root at infinity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Rational};
use crate::genus2::HyperCurve;
use crate::kowtop::{curve_c1, curve_c2, degeneracy};

/// Binary form of degree `d`, `c[k]` the coefficient of `X^k Z^(d−k)`.
#[derive(Clone, Debug, PartialEq)]
struct BinForm<F> {
    d: usize,
    c: Vec<F>,
}

impl<F: Field> BinForm<F> {
    fn sextic(f: &Poly<F>) -> Self {
        BinForm { d: 6, c: (0..=6).map(|k| f.coeff(k)).collect() }
    }

    fn zero(d: usize) -> Self {
        BinForm { d, c: vec![F::zero(); d + 1] }
    }

    fn dx(&self) -> Self {
        if self.d == 0 {
            return BinForm::zero(0);
        }
        let c = (1..=self.d).map(|k| self.c[k].clone() * F::from_i64(k as i64)).collect();
        BinForm { d: self.d - 1, c }
    }

    fn dz(&self) -> Self {
        if self.d == 0 {
            return BinForm::zero(0);
        }
        let c = (0..self.d).map(|k| self.c[k].clone() * F::from_i64((self.d - k) as i64)).collect();
        BinForm { d: self.d - 1, c }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out: BinForm<F> = BinForm::zero(self.d + o.d);
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out.c[i + j] = out.c[i + j].clone() + a.clone() * b.clone();
            }
        }
        out
    }

    fn add_scaled(&mut self, o: &Self, s: &F) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a = a.clone() + s.clone() * b.clone();
        }
    }

    /// `∂^k / ∂X^(k−j) ∂Z^j`.
    fn partial(&self, k: usize, j: usize) -> Self {
        let mut g = self.clone();
        for _ in 0..k - j {
            g = g.dx();
        }
        for _ in 0..j {
            g = g.dz();
        }
        g
    }

    /// Value of a degree-0 form.
    fn scalar(&self) -> F {
        self.c[0].clone()
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn binomial(n: usize, k: usize) -> i64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(f, g)_k = (m−k)!(n−k)!/(m!n!) Σ_j (−1)^j C(k,j) ∂^k f/∂X^(k−j)∂Z^j · ∂^k g/∂X^j∂Z^(k−j)`.
fn transvectant<F: Field>(f: &BinForm<F>, g: &BinForm<F>, k: usize) -> BinForm<F> {
    let (m, n) = (f.d, g.d);
    let mut acc = BinForm::zero(m + n - 2 * k);
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let term = f.partial(k, j).mul(&g.partial(k, k - j));
        acc.add_scaled(&term, &F::from_i64(sign * binomial(k, j)));
    }
    let num = factorial(m - k) * factorial(n - k);
    let den = factorial(m) * factorial(n);
    let scale = F::from_rational(&Rational::new(num, den));
    acc.c.iter_mut().for_each(|a| *a = a.clone() * scale.clone());
    acc
}

/// The weighted tuple `(I2, I4, I6, I10)`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct IgusaInvariants<F> {
    pub weighted: [F; 4],
}

/// Weights of the components divided by 2.
const HALF_WEIGHTS: [u32; 4] = [1, 2, 3, 5];

impl<F: Field> IgusaInvariants<F> {
    /// Weight-zero invariants `I2⁵/I10, I2³I4/I10, I2²I6/I10, I4⁵/I10²,
    /// I4I6/I10, I6⁵/I10³`; `None` when `I10 = 0`.
    pub fn absolute(&self) -> Option<Vec<F>> {
        let [i2, i4, i6, i10] = self.weighted.clone();
        let inv = i10.inv()?;
        let inv2 = inv.clone() * inv.clone();
        Some(vec![
            i2.pow(5) * inv.clone(),
            i2.pow(3) * i4.clone() * inv.clone(),
            i2.pow(2) * i6.clone() * inv.clone(),
            i4.pow(5) * inv2.clone(),
            i4 * i6.clone() * inv.clone(),
            i6.pow(5) * inv2 * inv,
        ])
    }

    /// Equality as points of weighted projective space: same zero pattern
    /// and `p_j^(w_k) q_k^(w_j) = q_j^(w_k) p_k^(w_j)` for every pair.
    pub fn weighted_equal(&self, o: &IgusaInvariants<F>) -> bool {
        let (p, q) = (&self.weighted, &o.weighted);
        if (0..4).any(|k| p[k].is_zero() != q[k].is_zero()) {
            return false;
        }
        for j in 0..4 {
            for k in j + 1..4 {
                let (wj, wk) = (HALF_WEIGHTS[j], HALF_WEIGHTS[k]);
                if p[j].pow(wk) * q[k].pow(wj) != q[j].pow(wk) * p[k].pow(wj) {
                    return false;
                }
            }
        }
        true
    }
}

/// Igusa–Clebsch invariants of `f` (degree 5 or 6) from the Clebsch
/// invariants `A, B, C, D`.
pub fn igusa_clebsch<F: Field>(f: &Poly<F>) -> Result<IgusaInvariants<F>> {
    match f.deg() {
        Some(5) | Some(6) => {}
        d => return Err(Error::WrongDegree(d.unwrap_or(0))),
    }
    let s = BinForm::sextic(f);
    let i = transvectant(&s, &s, 4);
    let delta = transvectant(&i, &i, 2);
    let y1 = transvectant(&s, &i, 4);
    let y2 = transvectant(&i, &y1, 2);
    let y3 = transvectant(&i, &y2, 2);
    let a = transvectant(&s, &s, 6).scalar();
    let b = transvectant(&i, &i, 4).scalar();
    let c = transvectant(&i, &delta, 4).scalar();
    let d = transvectant(&y3, &y1, 2).scalar();
    let n = |k: i64| F::from_i64(k);
    let i2 = n(-120) * a.clone();
    let i4 = n(-720) * a.pow(2) + n(6750) * b.clone();
    let i6 = n(8640) * a.pow(3) - n(108000) * a.clone() * b.clone() + n(202500) * c.clone();
    let i10 = n(-62208) * a.pow(5) + n(972000) * a.pow(3) * b.clone() + n(1620000) * a.pow(2) * c.clone()
        - n(3037500) * a.clone() * b.pow(2)
        - n(6075000) * b * c
        - n(4556250) * d;
    Ok(IgusaInvariants { weighted: [i2, i4, i6, i10] })
}

/// Geometric isomorphism: equal Igusa–Clebsch points.
pub fn isomorphic_over_closure<F: Field>(c1: &HyperCurve<F>, c2: &HyperCurve<F>) -> Result<bool> {
    Ok(igusa_clebsch(c1.f())?.weighted_equal(&igusa_clebsch(c2.f())?))
}

/// Verdict for one parameter sample.
#[derive(Clone, Debug, Serialize)]
pub struct SampleVerdict {
    #[serde(rename = "H")]
    pub h: Rational,
    #[serde(rename = "I2")]
    pub i2: Rational,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<IgusaInvariants<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<IgusaInvariants<Rational>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericReport {
    pub samples: Vec<SampleVerdict>,
    /// Non-isomorphic at every nondegenerate sample.
    pub generic: bool,
}

/// Compare C1 and C2 at each `(H, I2)`; degenerate samples are skipped.
pub fn generic_nonisomorphism(samples: &[(Rational, Rational)]) -> Result<GenericReport> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut out = Vec::with_capacity(samples.len());
    for (h, k) in samples {
        if let Some(why) = degeneracy(h, k) {
            out.push(SampleVerdict { h: h.clone(), i2: k.clone(), verdict: "skipped".into(), reason: Some(why.into()), c1: None, c2: None });
            continue;
        }
        let a = igusa_clebsch(curve_c1(h, k)?.f())?;
        let b = igusa_clebsch(curve_c2(h, k)?.0.f())?;
        let verdict = if a.weighted_equal(&b) { "isomorphic" } else { "non-isomorphic" };
        out.push(SampleVerdict { h: h.clone(), i2: k.clone(), verdict: verdict.into(), reason: None, c1: Some(a), c2: Some(b) });
    }
    if out.iter().all(|s| s.verdict == "skipped") {
        return Err(Error::Degenerate("all samples are degenerate".into()));
    }
    let generic = out.iter().all(|s| s.verdict != "isomorphic");
    Ok(GenericReport { samples: out, generic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Ring;
    use crate::numverify::real::{poly_q, DoubleDouble};
    use crate::numverify::roots::roots;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type P = Poly<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Root-difference formulas: with `(ij) = (r_i − r_j)²`,
    /// `I2 = a²Σ(12)(34)(56)` over the 15 pairings, `I4 = a⁴Σ(12)(23)(31)(45)(56)(64)`
    /// over the 10 splittings into triples, `I6` adds `(14)(25)(36)` over the
    /// 60 matchings between the triples, `I10 = a¹⁰Π(ij)`.
    fn oracle(f: &P) -> [Complex64; 4] {
        // Move a root away from infinity with (X, Z) ↦ (X, Z + X).
        let g = if f.deg() == Some(5) {
            let mut acc = P::zero();
            let one_plus = P::from_ints(&[1, 1]);
            for k in 0..=5 {
                acc = &acc + &(&P::monomial(f.coeff(k), k) * &one_plus.pow(6 - k as u32));
            }
            acc
        } else {
            f.clone()
        };
        let rs: Vec<Complex64> = roots(&poly_q::<DoubleDouble>(&g))
            .unwrap()
            .into_iter()
            .map(|z| Complex64::new(z.re.0.hi() + z.re.0.lo(), z.im.0.hi() + z.im.0.lo()))
            .collect();
        let a = Complex64::new(g.lc().to_f64(), 0.0);
        let d = |i: usize, j: usize| (rs[i] - rs[j]).powi(2);
        let mut s2 = Complex64::new(0.0, 0.0);
        for b in 1..6 {
            let rest: Vec<usize> = (1..6).filter(|&k| k != b).collect();
            for (x, y) in [(1, 2), (0, 2), (0, 1)].map(|(u, v)| (rest[u], rest[v])) {
                let o: Vec<usize> = rest.iter().copied().filter(|&k| k != x && k != y).collect();
                s2 += d(0, b) * d(x, y) * d(o[0], o[1]);
            }
        }
        let (mut s4, mut s6) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for t1 in 1..6 {
            for t2 in t1 + 1..6 {
                let t = [0, t1, t2];
                let u: Vec<usize> = (0..6).filter(|k| !t.contains(k)).collect();
                let tri = d(t[0], t[1]) * d(t[1], t[2]) * d(t[2], t[0]) * d(u[0], u[1]) * d(u[1], u[2]) * d(u[2], u[0]);
                s4 += tri;
                for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    s6 += tri * d(t[0], u[p[0]]) * d(t[1], u[p[1]]) * d(t[2], u[p[2]]);
                }
            }
        }
        let mut s10 = Complex64::new(1.0, 0.0);
        for i in 0..6 {
            for j in i + 1..6 {
                s10 *= d(i, j);
            }
        }
        [a.powi(2) * s2, a.powi(4) * s4, a.powi(6) * s6, a.powi(10) * s10]
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> P {
        loop {
            let c: Vec<Rational> = (0..=deg).map(|_| q(rng.random_range(-9..=9), rng.random_range(1..=4))).collect();
            let p = P::new(c);
            if p.deg() == Some(deg) && p.is_squarefree() {
                return p;
            }
        }
    }

    #[test]
    fn agrees_with_root_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for t in 0..50 {
            let f = random_poly(&mut rng, if t % 2 == 0 { 6 } else { 5 });
            let exact = igusa_clebsch(&f).unwrap();
            let num = oracle(&f);
            for k in 0..4 {
                let e = exact.weighted[k].to_f64();
                let err = (num[k] - e).norm() / e.abs().max(1e-300);
                assert!(err < 1e-10, "weight {} of {:?}: {} vs {}", 2 * (k + 1), f, e, num[k]);
            }
        }
    }

    #[test]
    fn discriminant_component() {
        let good = igusa_clebsch(&crate::kowtop::curve_c2(&q(1, 1), &q(2, 1)).unwrap().0.f().clone()).unwrap();
        assert!(!good.weighted[3].is_zero());
        let bad = &(&P::x() * &P::new(vec![q(1, 2), q(1, 1)]).pow(2)) * &P::new(vec![q(-3, 4), q(1, 1), q(1, 1)]);
        assert!(igusa_clebsch(&bad).unwrap().weighted[3].is_zero());
        assert_eq!(igusa_clebsch(&P::from_ints(&[0, 0, 0, 1])), Err(Error::WrongDegree(3)));
    }

    #[test]
    fn scaling_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_poly(&mut rng, 6);
        let c = q(-7, 3);
        let a = igusa_clebsch(&f).unwrap();
        let b = igusa_clebsch(&f.scale(&c)).unwrap();
        for k in 0..4 {
            assert_eq!(b.weighted[k], a.weighted[k].clone() * c.pow(2 * HALF_WEIGHTS[k]));
        }
        assert!(a.weighted_equal(&b));
    }

    #[test]
    fn absolute_invariants_survive_translation_and_twist() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for deg in [5, 6] {
            let c = HyperCurve::new(random_poly(&mut rng, deg)).unwrap();
            let moved = c.affine_change(&q(5, 3), &q(-2, 1)).unwrap();
            let a = igusa_clebsch(c.f()).unwrap().absolute().unwrap();
            let b = igusa_clebsch(moved.f()).unwrap().absolute().unwrap();
            assert_eq!(a, b);
            assert!(isomorphic_over_closure(&c, &c.twist(&q(-1, 1)).unwrap()).unwrap());
        }
    }

    #[test]
    fn c1_and_c2_differ() {
        let c1 = curve_c1(&q(1, 1), &q(2, 1)).unwrap();
        let (c2, _) = curve_c2(&q(1, 1), &q(2, 1)).unwrap();
        assert!(!isomorphic_over_closure(&c1, &c2).unwrap());
        assert!(isomorphic_over_closure(&c1, &c1.affine_change(&q(1, 2), &q(1, 1)).unwrap()).unwrap());
    }

    #[test]
    fn sample_sweep() {
        let pts = [(1, 1, 2, 1), (3, 2, 5, 1), (2, 1, 3, 1), (5, 1, 7, 1), (1, 1, 1, 2), (1, 2, 1, 1)]
            .map(|(a, b, c, d)| (q(a, b), q(c, d)));
        let r = generic_nonisomorphism(&pts).unwrap();
        assert!(r.generic);
        assert_eq!(r.samples[5].verdict, "skipped");
        assert_eq!(r.samples[5].reason.as_deref(), Some("4H² − I2 = 0"));
        assert!(r.samples[..5].iter().all(|s| s.verdict == "non-isomorphic"));
        assert_eq!(generic_nonisomorphism(&[]).unwrap_err(), Error::NoSamples);
    }
}

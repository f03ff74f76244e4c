//! Pushing points and divisor classes through the correspondence Z of a
//! Richelot step, in floating point.
//!
//! The source of an edge is always a quintic model `y² = f(x)` with a
//! splitting whose first factor `G1` is linear (it pairs the root with the
//! point at infinity). The image `Y² = −F/Δ` is a quintic or a sextic; a
//! sextic image is moved to a quintic chart by sending one of its roots `r`
//! to infinity: `x' = 1/(X − r)`, `y' = Y·x'³`.

use super::cantor::{add, CPoint, NumDivisor};
use super::real::{abs, coeff_scale, csqrt, eval_scale, Real, C};
use super::roots::{quadratic_roots, roots};
use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Ring};
use crate::genus2::{CorrespondenceZ, QuadSplit, RichelotOut};

/// Quintic chart of an image curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Chart<T> {
    /// The image is already a quintic.
    Identity,
    /// `x' = 1/(X − r)` for a root `r` of the sextic image.
    ShiftInvert(C<T>),
}

/// `x = a·x'' + b`, `y = t·y''` from chart coordinates to normalized ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine<T> {
    pub a: C<T>,
    pub b: C<T>,
    pub t: C<T>,
}

impl<T: Real> Affine<T> {
    pub fn identity() -> Self {
        Affine { a: C::one(), b: C::zero(), t: C::one() }
    }

    fn forward(&self, p: CPoint<T>) -> CPoint<T> {
        CPoint::new((p.x - self.b) / self.a, p.y / self.t)
    }

    fn back(&self, p: CPoint<T>) -> CPoint<T> {
        CPoint::new(self.a * p.x + self.b, self.t * p.y)
    }

    /// `f(a·x + b)/t²`.
    fn apply(&self, f: &Poly<C<T>>) -> Poly<C<T>> {
        let lin = Poly::new(vec![self.b, self.a]);
        let mut acc = Poly::zero();
        for k in (0..f.coeffs().len()).rev() {
            acc = &(&acc * &lin) + &Poly::constant(f.coeff(k));
        }
        let inv = C::<T>::one() / (self.t * self.t);
        Poly::new(acc.coeffs().iter().map(|c| *c * inv).collect())
    }
}

/// One Richelot step on numeric data.
#[derive(Clone, Debug)]
pub struct NumEdge<T> {
    pub source: Poly<C<T>>,
    pub split: QuadSplit<C<T>>,
    pub rich: RichelotOut<C<T>>,
    pub corr: CorrespondenceZ<C<T>>,
    pub chart: Chart<T>,
    /// Affine normalization applied after the chart.
    pub norm: Affine<T>,
    /// The image in its (normalized) quintic chart.
    pub target: Poly<C<T>>,
    /// Relative distance under which two points are identified.
    pub tol: f64,
}

/// An image point, or the base point (infinity) of the receiving chart.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Img<T> {
    Pt(CPoint<T>),
    Base,
}

/// Default identification tolerance at the working precision.
pub fn match_tol<T: Real>() -> f64 {
    T::unit_roundoff().powf(0.4)
}

/// Remove negligible leading coefficients.
fn trim<T: Real>(p: &Poly<C<T>>, eps: f64) -> Poly<C<T>> {
    super::cantor::trim_relative(p.clone(), eps)
}

/// Roots of a polynomial of degree ≤ 2, plus how many roots went to
/// infinity (its nominal degree is 2).
fn roots_le2<T: Real>(p: &Poly<C<T>>, eps: f64) -> (Vec<C<T>>, usize) {
    let q = trim(p, eps);
    match q.deg() {
        Some(2) => (quadratic_roots(q.coeff(2), q.coeff(1), q.coeff(0)).to_vec(), 0),
        Some(1) => (vec![-q.coeff(0) / q.coeff(1)], 1),
        _ => (Vec::new(), 2),
    }
}

/// `x⁶·g(r + 1/x)` for a sextic `g` with `g(r) = 0`, as a quintic.
pub fn recenter_at_root<F: Field>(g: &Poly<F>, r: F) -> Poly<F> {
    // Σ a_k (r x + 1)^k x^(6−k)
    let lin = Poly::new(vec![F::one(), r]);
    let mut acc = Poly::zero();
    let mut pw = Poly::one();
    for k in 0..=6 {
        let term = &(&pw * &Poly::monomial(F::one(), 6 - k)).scale(&g.coeff(k));
        acc = &acc + term;
        pw = &pw * &lin;
    }
    let mut c = acc.into_coeffs();
    c.truncate(6);
    Poly::new(c)
}

impl<T: Real> NumEdge<T> {
    /// Build the step for a quintic `source` and a splitting of it with
    /// `G1` linear. The image is re-charted when it is a sextic, at the
    /// root with the smallest imaginary part.
    pub fn new(source: Poly<C<T>>, split: QuadSplit<C<T>>) -> Result<Self> {
        Self::with_chart_root(source, split, None)
    }

    /// As [`NumEdge::new`], re-charting a sextic image at the root nearest
    /// to `root` when one is given.
    pub fn with_chart_root(source: Poly<C<T>>, split: QuadSplit<C<T>>, root: Option<C<T>>) -> Result<Self> {
        if source.deg() != Some(5) || split.g(0).deg() != Some(1) {
            return Err(Error::Numeric("numeric edges need a quintic source with G1 linear".into()));
        }
        let rich = RichelotOut::numeric(&split)?;
        let scale = split.factors().iter().map(coeff_scale).fold(1.0, f64::max);
        if abs(rich.delta) <= 1e3 * T::unit_roundoff() * scale.powi(3) {
            return Err(Error::DeltaZero);
        }
        let eps = T::unit_roundoff().sqrt() * 1e-3;
        let image = trim(rich.image.f(), eps);
        let (chart, target) = match image.deg() {
            Some(5) => (Chart::Identity, image),
            Some(6) => {
                let rs = roots(&image)?;
                let key = |z: &C<T>| match root {
                    Some(w) => abs(*z - w),
                    None => z.im.abs().f64(),
                };
                let r = *rs.iter().min_by(|a, b| key(a).partial_cmp(&key(b)).expect("finite")).expect("six roots");
                (Chart::ShiftInvert(r), recenter_at_root(&image, r))
            }
            d => return Err(Error::Numeric(format!("image of degree {d:?}"))),
        };
        let corr = CorrespondenceZ::new(&split, &rich);
        Ok(NumEdge { source, split, rich, corr, chart, norm: Affine::identity(), target, tol: match_tol::<T>() })
    }

    /// Move the target to real-scaled coordinates: roots centred at their
    /// mean, largest root distance 1, leading coefficient ±1. For a real
    /// target the change is real.
    pub fn normalized(mut self) -> Result<Self> {
        let rs = roots(&self.target)?;
        let n = T::of(rs.len() as f64);
        let b = rs.iter().fold(C::<T>::zero(), |acc, r| acc + *r) / C::new(n, T::zero());
        let spread = rs.iter().map(|r| abs(*r - b)).fold(0.0, f64::max).max(1e-300);
        let a = C::new(T::of(spread), T::zero());
        let t2 = abs(self.target.lc()) * spread.powi(5);
        let t = C::new(T::of(t2).sqrt(), T::zero());
        let b = if self.target.coeffs().iter().all(|c| c.im.abs().f64() == 0.0) { C::new(b.re, T::zero()) } else { b };
        self.norm = Affine { a, b, t };
        self.target = self.norm.apply(&self.target);
        Ok(self)
    }

    /// Where an image-model point lands in the target chart; `None` for the
    /// base point.
    pub fn chart_point(&self, x: C<T>, y: C<T>) -> Option<CPoint<T>> {
        match self.to_chart(x, y) {
            Img::Pt(p) => Some(p),
            Img::Base => None,
        }
    }

    /// The image polynomial `−F/Δ` in its own coordinates.
    pub fn image(&self) -> &Poly<C<T>> {
        self.rich.image.f()
    }

    fn to_chart(&self, x: C<T>, y: C<T>) -> Img<T> {
        match self.to_raw_chart(x, y) {
            Img::Pt(p) => Img::Pt(self.norm.forward(p)),
            Img::Base => Img::Base,
        }
    }

    fn to_raw_chart(&self, x: C<T>, y: C<T>) -> Img<T> {
        match &self.chart {
            Chart::Identity => Img::Pt(CPoint::new(x, y)),
            Chart::ShiftInvert(r) => {
                let d = x - *r;
                if abs(d) <= self.tol * (1.0 + abs(*r)) {
                    return Img::Base;
                }
                let xp = C::<T>::one() / d;
                Img::Pt(CPoint::new(xp, y * xp * xp * xp))
            }
        }
    }

    /// Chart coordinates back to the image model; `None` at `X = ∞`.
    pub fn from_chart(&self, p: &CPoint<T>) -> Option<CPoint<T>> {
        let p = &self.norm.back(*p);
        match &self.chart {
            Chart::Identity => Some(*p),
            Chart::ShiftInvert(r) => {
                if Ring::is_zero(&p.x) {
                    return None;
                }
                let inv = C::<T>::one() / p.x;
                Some(CPoint::new(*r + inv, p.y * inv * inv * inv))
            }
        }
    }

    fn is_weierstrass(f: &Poly<C<T>>, p: &CPoint<T>) -> bool {
        abs(p.y).powi(2) <= 1e4 * T::unit_roundoff() * eval_scale(f, p.x)
    }

    /// Images of a non-Weierstrass source point, in the target chart.
    fn push_regular(&self, p: &CPoint<T>) -> Vec<Img<T>> {
        let eps = T::unit_roundoff().sqrt() * 1e-3;
        let (xs, at_inf) = roots_le2(&self.corr.in_big_x(&p.x), eps);
        let mut out: Vec<Img<T>> = xs
            .into_iter()
            .map(|big_x| self.to_chart(big_x, self.corr.product(&p.x, &big_x) / p.y))
            .collect();
        for _ in 0..at_inf {
            out.push(match &self.chart {
                Chart::Identity => Img::Base,
                Chart::ShiftInvert(_) => {
                    let lead = self.rich.l[0].coeff(2);
                    Img::Pt(self.norm.forward(CPoint::new(C::zero(), -(self.split.g(0).eval(&p.x) * lead) / p.y)))
                }
            });
        }
        out
    }

    /// Preimages of a non-Weierstrass image point (image coordinates) on
    /// the source.
    fn pull_regular(&self, q: &CPoint<T>) -> Vec<Img<T>> {
        let eps = T::unit_roundoff().sqrt() * 1e-3;
        let (xs, at_inf) = roots_le2(&self.corr.in_x(&q.x), eps);
        let mut out: Vec<Img<T>> =
            xs.into_iter().map(|x| Img::Pt(CPoint::new(x, self.corr.product(&x, &q.x) / q.y))).collect();
        out.extend(std::iter::repeat_n(Img::Base, at_inf));
        out
    }

    /// Images of a source point in the target chart (base-point images
    /// dropped). Weierstrass points are handled by moving along the curve,
    /// `x = x_W + t²`, and extrapolating `t → 0`.
    pub fn push_point(&self, p: &CPoint<T>) -> Result<Vec<CPoint<T>>> {
        if Self::is_weierstrass(&self.source, p) {
            let inf_ok = matches!(self.chart, Chart::Identity);
            if let Some(pts) = weierstrass_fiber(&self.corr.in_big_x(&p.x), self.image(), inf_ok)? {
                return Ok(finite(pts.into_iter().map(|q| self.to_chart(q.x, q.y)).collect()));
            }
            let imgs = along_curve(&self.source, p.x, |q| Ok(self.push_regular(q)))?;
            snap_weierstrass(&self.target, finite(imgs))
        } else {
            Ok(finite(self.push_regular(p)))
        }
    }

    /// Preimages of a target-chart point on the source (base point dropped).
    pub fn pull_point(&self, q: &CPoint<T>) -> Result<Vec<CPoint<T>>> {
        let big = self
            .from_chart(q)
            .ok_or_else(|| Error::Numeric("pullback of the point over X = ∞".into()))?;
        self.pull_image_point(&big)
    }

    fn pull_image_point(&self, big: &CPoint<T>) -> Result<Vec<CPoint<T>>> {
        if Self::is_weierstrass(self.image(), big) {
            if let Some(pts) = weierstrass_fiber(&self.corr.in_x(&big.x), &self.source, true)? {
                return Ok(pts);
            }
            let imgs = along_curve(self.image(), big.x, |q| Ok(self.pull_regular(q)))?;
            snap_weierstrass(&self.source, finite(imgs))
        } else {
            Ok(finite(self.pull_regular(big)))
        }
    }

    /// `Z(O)` for the source point at infinity: the roots of `L2`, all
    /// Weierstrass points of the image, in the target chart.
    pub fn image_of_source_base(&self) -> Vec<CPoint<T>> {
        let eps = T::unit_roundoff().sqrt() * 1e-3;
        let (xs, _) = roots_le2(&self.rich.l[1], eps);
        finite(xs.into_iter().map(|x| self.to_chart(x, C::zero())).collect())
    }

    /// `Zᵀ(Ô)` for the base point of the target chart.
    pub fn preimage_of_target_base(&self) -> Result<Vec<CPoint<T>>> {
        match &self.chart {
            Chart::Identity => {
                let eps = T::unit_roundoff().sqrt() * 1e-3;
                if abs(trim(&self.rich.l[0], eps).coeff(2)) != 0.0 {
                    return Err(Error::Numeric("quintic image with L1 of degree 2".into()));
                }
                // X → ∞ leaves l2₂·G2(x) = 0.
                let (xs, _) = roots_le2(self.split.g(1), eps);
                Ok(xs.into_iter().map(|x| CPoint::new(x, C::zero())).collect())
            }
            Chart::ShiftInvert(r) => self.pull_image_point(&CPoint::new(*r, C::zero())),
        }
    }

    /// Push `Σ P_i − n·O`: the images `Z(P_i)` plus `n` copies of
    /// `ιZ(O)`, reduced on the target chart.
    pub fn push_class(&self, d: &NumDivisor<T>) -> Result<NumDivisor<T>> {
        self.guarded(d, true)
    }

    /// Pull a target-chart class back to the source through `Zᵀ`.
    pub fn pull_class(&self, d: &NumDivisor<T>) -> Result<NumDivisor<T>> {
        self.guarded(d, false)
    }

    /// A regular point close to a kernel Weierstrass point has an image
    /// close to the base point, and reducing with it loses most of the
    /// digits. Then `D` is replaced by `(D + E) − E` for a fixed auxiliary
    /// class `E` on which the transfer is well conditioned.
    fn guarded(&self, d: &NumDivisor<T>, forward: bool) -> Result<NumDivisor<T>> {
        let (direct, ill) = self.transfer(d, forward)?;
        if !ill {
            return Ok(direct);
        }
        let (from, to) = if forward { (&self.source, &self.target) } else { (&self.target, &self.source) };
        for k in 1..=4 {
            let e = auxiliary_class(from, k);
            let (b, ill_b) = self.transfer(&e, forward)?;
            let (a, ill_a) = self.transfer(&add(d, &e, from, self.tol)?, forward)?;
            if !ill_a && !ill_b {
                return add(&a, &b.neg(), to, self.tol);
            }
        }
        Ok(direct)
    }

    /// The transfer itself, and whether some regular point went close to
    /// the base point of the receiving chart.
    fn transfer(&self, d: &NumDivisor<T>, forward: bool) -> Result<(NumDivisor<T>, bool)> {
        let (from, to) = if forward { (&self.source, &self.target) } else { (&self.target, &self.source) };
        let far = 1e2 * root_bound(to);
        let mut ill = false;
        let mut acc = NumDivisor::identity();
        for p in &d.points {
            let pts = if forward { self.push_point(p)? } else { self.pull_point(p)? };
            ill |= !Self::is_weierstrass(from, p) && pts.iter().any(|q| abs(q.x) > far);
            acc = add(&acc, &NumDivisor { points: pts }, to, self.tol)?;
        }
        // Z(O) and Zᵀ(Ô) are made of Weierstrass points (resp. stable under
        // ι), so their classes are 2-torsion and only the parity of n
        // matters.
        if d.points.len() % 2 == 1 {
            let base = if forward { self.image_of_source_base() } else { self.preimage_of_target_base()? };
            acc = add(&acc, &NumDivisor { points: base }, to, self.tol)?;
        }
        Ok((acc, ill))
    }
}

/// The fiber over a Weierstrass point is fixed by `ι`, so its points are
/// Weierstrass points of `y² = f(x)` or a pair `P + ιP`. `q` cuts out their
/// `x`; roots at infinity are base points and are dropped when `inf_ok`.
/// `None` when the roots fit neither shape.
fn weierstrass_fiber<T: Real>(q: &Poly<C<T>>, f: &Poly<C<T>>, inf_ok: bool) -> Result<Option<Vec<CPoint<T>>>> {
    let eps = T::unit_roundoff().sqrt() * 1e-3;
    let (xs, at_inf) = roots_le2(q, eps);
    if at_inf > 0 && !inf_ok {
        return Ok(None);
    }
    let rs = roots(f)?;
    let tol = T::unit_roundoff().powf(0.3);
    let nearest = |x: C<T>| {
        let r = *rs.iter().min_by(|a, b| abs(**a - x).partial_cmp(&abs(**b - x)).expect("finite")).expect("roots");
        (abs(r - x) <= tol * (1.0 + abs(r))).then_some(r)
    };
    if let [a, b] = xs.as_slice() {
        if abs(*a - *b) <= tol * (1.0 + abs(*a)) && nearest(*a).is_none() {
            let x = (*a + *b) * T::of(0.5);
            let y = csqrt(f.eval(&x));
            return Ok(Some(vec![CPoint::new(x, y), CPoint::new(x, -y)]));
        }
    }
    Ok(xs.into_iter().map(|x| nearest(x).map(|r| CPoint::new(r, C::zero()))).collect())
}

/// Extrapolated images that land on a Weierstrass point of `y² = f(x)`
/// carry `y` of the size of the extrapolation error; doubling such a point
/// would amplify it, so they are moved onto the root.
fn snap_weierstrass<T: Real>(f: &Poly<C<T>>, pts: Vec<CPoint<T>>) -> Result<Vec<CPoint<T>>> {
    let near = |p: &CPoint<T>| abs(p.y).powi(2) <= T::unit_roundoff().powf(0.6) * eval_scale(f, p.x);
    if !pts.iter().any(near) {
        return Ok(pts);
    }
    let rs = roots(f)?;
    Ok(pts
        .into_iter()
        .map(|p| {
            if !near(&p) {
                return p;
            }
            let r = *rs.iter().min_by(|a, b| abs(**a - p.x).partial_cmp(&abs(**b - p.x)).expect("finite")).expect("roots");
            if abs(r - p.x) <= T::unit_roundoff().powf(0.3) * (1.0 + abs(r)) {
                CPoint::new(r, C::zero())
            } else {
                p
            }
        })
        .collect())
}

/// Cauchy bound on the roots of `f`.
fn root_bound<T: Real>(f: &Poly<C<T>>) -> f64 {
    let lc = abs(f.lc());
    f.coeffs().iter().rev().skip(1).map(|a| abs(*a) / lc).fold(0.0, f64::max) + 1.0
}

/// A fixed class of two points of `y² = f(x)`, the `k`-th of a short list.
fn auxiliary_class<T: Real>(f: &Poly<C<T>>, k: usize) -> NumDivisor<T> {
    let s = root_bound(f).sqrt();
    let k = k as f64;
    let pt = |re: f64, im: f64| {
        let x = C::new(T::of(re * s), T::of(im * s));
        CPoint::new(x, csqrt(f.eval(&x)))
    };
    NumDivisor { points: vec![pt(0.31 * k, 0.57), pt(-0.43, 0.29 * k + 0.11)] }
}

fn finite<T>(imgs: Vec<Img<T>>) -> Vec<CPoint<T>> {
    imgs.into_iter()
        .filter_map(|i| match i {
            Img::Pt(p) => Some(p),
            Img::Base => None,
        })
        .collect()
}

/// Limit of `map(x_W + t², y(t))` as `t → 0`, with `y(t)` the branch that
/// is analytic in `t`. Two Richardson levels on `t, t/2, t/4`; image points
/// are matched across the three runs by nearest continuation.
fn along_curve<T: Real>(
    f: &Poly<C<T>>,
    x_w: C<T>,
    map: impl Fn(&CPoint<T>) -> Result<Vec<Img<T>>>,
) -> Result<Vec<Img<T>>> {
    let slope = csqrt(f.derivative().eval(&x_w));
    let h = T::unit_roundoff().powf(0.25) * (1.0 + abs(x_w));
    let run = |t: f64| -> Result<Vec<Img<T>>> {
        let tt = T::of(t);
        let x = x_w + C::new(tt * tt, T::zero());
        let mut y = csqrt(f.eval(&x));
        if (y * slope.conj()).re < T::zero() {
            y = -y;
        }
        map(&CPoint::new(x, y))
    };
    let runs = [run(h)?, run(h / 2.0)?, run(h / 4.0)?];
    let n = runs[0].len();
    if runs.iter().any(|r| r.len() != n) {
        return Err(Error::Numeric("image count changes near a Weierstrass point".into()));
    }
    // Chordal distance, so that branches running off to infinity match up.
    let chordal = |a: C<T>, b: C<T>| {
        let (na, nb) = (abs(a), abs(b));
        abs(a - b) / ((1.0 + na * na).sqrt() * (1.0 + nb * nb).sqrt())
    };
    let mut out = Vec::with_capacity(n);
    let mut used = [vec![false; n], vec![false; n]];
    for a in &runs[0] {
        let Img::Pt(p0) = a else {
            out.push(Img::Base);
            continue;
        };
        let mut chain = [*p0, *p0, *p0];
        for (level, run_k) in runs[1..].iter().enumerate() {
            let prev = chain[level];
            let (best, _) = run_k
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[level][*j])
                .filter_map(|(j, img)| match img {
                    Img::Pt(q) => Some((j, chordal(q.x, prev.x))),
                    Img::Base => None,
                })
                .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                .ok_or_else(|| Error::Numeric("lost an image branch".into()))?;
            used[level][best] = true;
            let Img::Pt(q) = run_k[best] else { unreachable!() };
            chain[level + 1] = q;
        }
        // x ~ c/t² grows sixteenfold from t to t/4.
        let (x0, x2) = (abs(chain[0].x), abs(chain[2].x));
        if x2 > 4.0 * (1.0 + x0) && x2 * h > 1.0 {
            out.push(Img::Base);
            continue;
        }
        let extrap = |g: fn(&CPoint<T>) -> C<T>| {
            let [a, b, c] = chain.map(|p| g(&p));
            let two = C::<T>::from_i64(2);
            let r1 = two * b - a;
            let r2 = two * c - b;
            (C::<T>::from_i64(4) * r2 - r1) / C::<T>::from_i64(3)
        };
        out.push(Img::Pt(CPoint::new(extrap(|p| p.x), extrap(|p| p.y))));
    }
    Ok(out)
}

/// Largest mismatch when the points are paired off as `P + ιP`; infinite
/// if some point has no partner.
pub fn identity_residual<T: Real>(points: &[CPoint<T>]) -> f64 {
    let mut left: Vec<CPoint<T>> = points.to_vec();
    let mut worst = 0.0f64;
    while let Some(p) = left.pop() {
        let best = left
            .iter()
            .enumerate()
            .map(|(j, q)| (j, (abs(p.x - q.x) + abs(p.y + q.y)) / (1.0 + abs(p.x) + abs(p.y))))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"));
        match best {
            Some((j, d)) => {
                worst = worst.max(d);
                left.remove(j);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

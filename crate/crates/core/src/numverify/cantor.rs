use serde::Serialize;

use super::real::{abs, coeff_scale, eval_scale, Real, C};
use super::roots::quadratic_roots;
use crate::error::{Error, Result};
use crate::exactfield::{Poly, Ring};

/// An affine point `(x, y)` on a numeric curve model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CPoint<T> {
    pub x: C<T>,
    pub y: C<T>,
}

impl<T: Real> CPoint<T> {
    pub fn new(x: C<T>, y: C<T>) -> Self {
        CPoint { x, y }
    }

    /// The hyperelliptic conjugate `(x, −y)`.
    pub fn conj(&self) -> Self {
        CPoint { x: self.x, y: -self.y }
    }

    /// `|y² − f(x)|` relative to the magnitude of the terms.
    pub fn residual(&self, f: &Poly<C<T>>) -> f64 {
        let r = abs(self.y * self.y - f.eval(&self.x));
        r / eval_scale(f, self.x).max(abs(self.y).powi(2)).max(1e-300)
    }

    fn close(&self, o: &CPoint<T>, tol: f64) -> bool {
        let s = 1.0 + abs(self.x).max(abs(o.x));
        abs(self.x - o.x) <= tol * s
    }

    fn y_scale(&self, o: &CPoint<T>) -> f64 {
        1.0 + abs(self.y).max(abs(o.y))
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.x.re.f64(), self.x.im.f64()], [self.y.re.f64(), self.y.im.f64()]]
    }
}

/// A reduced divisor class on a quintic model, stored as its at most two
/// affine points; the identity is the empty list.
#[derive(Clone, Debug, PartialEq)]
pub struct NumDivisor<T> {
    pub points: Vec<CPoint<T>>,
}

/// Coordinates of the points in a serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorCoords {
    pub points: Vec<[[f64; 2]; 2]>,
}

impl<T: Real> NumDivisor<T> {
    pub fn identity() -> Self {
        NumDivisor { points: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> DivisorCoords {
        DivisorCoords { points: self.points.iter().map(CPoint::to_f64).collect() }
    }

    pub fn neg(&self) -> Self {
        NumDivisor { points: self.points.iter().map(CPoint::conj).collect() }
    }

    pub fn max_residual(&self, f: &Poly<C<T>>) -> f64 {
        self.points.iter().map(|p| p.residual(f)).fold(0.0, f64::max)
    }

    /// Mumford polynomials `(u, v)` of the class.
    pub fn mumford(&self, f: &Poly<C<T>>) -> Result<(Poly<C<T>>, Poly<C<T>>)> {
        let groups = group(&self.points, 1e-9)?;
        Ok(interpolate(&groups, f)?)
    }
}

/// Points with a multiplicity of 1 or 2.
type Groups<T> = Vec<(CPoint<T>, usize)>;

fn group<T: Real>(points: &[CPoint<T>], tol: f64) -> Result<Groups<T>> {
    let mut out: Groups<T> = Vec::new();
    for p in points {
        match out.iter_mut().find(|(q, _)| q.close(p, tol)) {
            Some((_, m)) if *m == 1 => *m = 2,
            Some(_) => return Err(Error::Numeric("point of multiplicity above 2; resample".into())),
            None => out.push((*p, 1)),
        }
    }
    Ok(out)
}

/// Solve a small dense complex system by Gaussian elimination with partial
/// pivoting.
pub(crate) fn solve<T: Real>(mut a: Vec<Vec<C<T>>>, mut b: Vec<C<T>>) -> Result<Vec<C<T>>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| abs(a[i][col]).partial_cmp(&abs(a[j][col])).expect("finite"))
            .expect("nonempty");
        if abs(a[piv][col]) == 0.0 {
            return Err(Error::Numeric("singular interpolation system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = C::<T>::one() / a[col][col];
        for r in col + 1..n {
            let factor = a[r][col] * inv;
            if Ring::is_zero(&factor) {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[r][k] = a[r][k] - factor * t;
            }
            let t = b[col];
            b[r] = b[r] - factor * t;
        }
    }
    let mut x = vec![C::<T>::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s = s - a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Ok(x)
}

/// `u = Π(x − x_i)^{m_i}` and `v` of degree `< deg u` through the points,
/// tangent to the curve at double points.
fn interpolate<T: Real>(groups: &Groups<T>, f: &Poly<C<T>>) -> Result<(Poly<C<T>>, Poly<C<T>>)> {
    let mut u = Poly::one();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let n: usize = groups.iter().map(|(_, m)| m).sum();
    let fp = f.derivative();
    for (p, m) in groups {
        for _ in 0..*m {
            u = &u * &Poly::linear_root(p.x);
        }
        let mut row = Vec::with_capacity(n);
        let mut pw = C::<T>::one();
        for _ in 0..n {
            row.push(pw);
            pw = pw * p.x;
        }
        rows.push(row);
        rhs.push(p.y);
        if *m == 2 {
            if abs(p.y) == 0.0 {
                return Err(Error::Numeric("tangent at a Weierstrass point".into()));
            }
            let mut row = vec![C::<T>::zero(); n];
            let mut pw = C::<T>::one();
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                *slot = pw * C::<T>::from_i64(k as i64);
                pw = pw * p.x;
            }
            rows.push(row);
            rhs.push(fp.eval(&p.x) / (p.y * C::<T>::from_i64(2)));
        }
    }
    let v = if n == 0 { Poly::zero() } else { Poly::new(solve(rows, rhs)?) };
    Ok((u, v))
}

/// Remove pairs `P + ιP`, which are principal.
fn cancel<T: Real>(points: &[CPoint<T>], tol: f64) -> Vec<CPoint<T>> {
    let mut pts: Vec<CPoint<T>> = points.to_vec();
    let mut i = 0;
    while i < pts.len() {
        let partner = (i + 1..pts.len()).find(|&j| {
            pts[i].close(&pts[j], tol) && abs(pts[i].y + pts[j].y) <= tol * pts[i].y_scale(&pts[j])
        });
        match partner {
            Some(j) => {
                pts.remove(j);
                pts.remove(i);
            }
            None => i += 1,
        }
    }
    pts
}

/// Numeric Cantor reduction of the divisor `Σ P_i − n·∞` on the quintic
/// model `y² = f(x)`. `tol` is the relative distance under which two
/// coordinates are treated as equal.
pub fn reduce<T: Real>(points: &[CPoint<T>], f: &Poly<C<T>>, tol: f64) -> Result<NumDivisor<T>> {
    if f.deg() != Some(5) {
        return Err(Error::EvenDegreeModel);
    }
    let pts = cancel(points, tol);
    let groups = group(&pts, tol)?;
    if pts.len() <= 2 {
        return Ok(NumDivisor { points: pts });
    }
    let (mut u, mut v) = interpolate(&groups, f)?;
    while u.degree() > 2 {
        let (q, _) = (f - &(&v * &v)).divrem(&u)?;
        v = (-&v).rem(&q)?;
        u = trim_relative(q, T::unit_roundoff().sqrt() * 1e-2);
    }
    let u = u.monic();
    let v = v.rem(&u)?;
    let xs: Vec<C<T>> = match u.deg() {
        Some(0) | None => Vec::new(),
        Some(1) => vec![-u.coeff(0)],
        _ => quadratic_roots(C::one(), u.coeff(1), u.coeff(0)).to_vec(),
    };
    Ok(NumDivisor { points: xs.into_iter().map(|x| CPoint::new(x, v.eval(&x))).collect() })
}

/// Drop leading coefficients that are negligible against the largest one.
pub(crate) fn trim_relative<T: Real>(p: Poly<C<T>>, eps: f64) -> Poly<C<T>> {
    let scale = coeff_scale(&p);
    let mut c = p.into_coeffs();
    while c.len() > 1 && abs(*c.last().expect("nonempty")) <= eps * scale {
        c.pop();
    }
    Poly::new(c)
}

pub fn add<T: Real>(a: &NumDivisor<T>, b: &NumDivisor<T>, f: &Poly<C<T>>, tol: f64) -> Result<NumDivisor<T>> {
    let pts: Vec<CPoint<T>> = a.points.iter().chain(&b.points).copied().collect();
    reduce(&pts, f, tol)
}

pub fn double<T: Real>(a: &NumDivisor<T>, f: &Poly<C<T>>, tol: f64) -> Result<NumDivisor<T>> {
    add(a, a, f, tol)
}

/// Largest relative coordinate difference between two reduced classes,
/// minimized over the point matchings; infinite if the supports differ in
/// size.
pub fn distance<T: Real>(a: &NumDivisor<T>, b: &NumDivisor<T>) -> f64 {
    let d = |p: &CPoint<T>, q: &CPoint<T>| {
        let s = 1.0 + abs(p.x).max(abs(p.y));
        (abs(p.x - q.x) + abs(p.y - q.y)) / s
    };
    match (a.points.as_slice(), b.points.as_slice()) {
        ([], []) => 0.0,
        ([p], [q]) => d(p, q),
        ([p1, p2], [q1, q2]) => d(p1, q1).max(d(p2, q2)).min(d(p1, q2).max(d(p2, q1))),
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numverify::real::{c, csqrt};

    fn curve() -> Poly<C<f64>> {
        // x(x²+2x+1/2)(x²+2x−1/2) = x⁵+4x⁴+4x³−x/4
        Poly::new(vec![c(0.0, 0.0), c(-0.25, 0.0), c(0.0, 0.0), c(4.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)])
    }

    fn point(f: &Poly<C<f64>>, x: f64, sign: f64) -> CPoint<f64> {
        let x = c(x, 0.0);
        let y = csqrt(f.eval(&x)) * c(sign, 0.0);
        CPoint::new(x, y)
    }

    #[test]
    fn inverse_cancels() {
        let f = curve();
        let a = NumDivisor { points: vec![point(&f, 0.3, 1.0), point(&f, 1.7, -1.0)] };
        assert!(add(&a, &a.neg(), &f, 1e-9).unwrap().is_identity());
    }

    #[test]
    fn commutative_and_associative() {
        let f = curve();
        let a = NumDivisor { points: vec![point(&f, 0.3, 1.0), point(&f, 1.7, -1.0)] };
        let b = NumDivisor { points: vec![point(&f, -0.7, 1.0), point(&f, 2.2, 1.0)] };
        let d = NumDivisor { points: vec![point(&f, 0.9, -1.0), point(&f, -3.1, 1.0)] };
        let ab = add(&a, &b, &f, 1e-9).unwrap();
        assert!(distance(&ab, &add(&b, &a, &f, 1e-9).unwrap()) < 1e-10);
        let l = add(&ab, &d, &f, 1e-9).unwrap();
        let r = add(&a, &add(&b, &d, &f, 1e-9).unwrap(), &f, 1e-9).unwrap();
        assert!(distance(&l, &r) < 1e-8, "{}", distance(&l, &r));
        assert!(l.max_residual(&f) < 1e-10);
    }

    #[test]
    fn weierstrass_points_are_two_torsion() {
        let f = curve();
        let w = NumDivisor { points: vec![CPoint::new(c(0.0, 0.0), c(0.0, 0.0))] };
        assert!(double(&w, &f, 1e-9).unwrap().is_identity());
    }
}

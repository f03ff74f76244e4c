use num_complex::Complex;

use super::real::{abs, cr, csqrt, Real, C};
use crate::error::{Error, Result};
use crate::exactfield::{Poly, Ring};

fn eval_with_derivative<T: Real>(p: &[C<T>], z: C<T>) -> (C<T>, C<T>) {
    let mut val = C::<T>::zero();
    let mut der = C::<T>::zero();
    for a in p.iter().rev() {
        der = der * z + val;
        val = val * z + *a;
    }
    (val, der)
}

/// All complex roots of `p` (with multiplicity) by Aberth–Ehrlich
/// iteration followed by Newton polishing.
pub fn roots<T: Real>(p: &Poly<C<T>>) -> Result<Vec<C<T>>> {
    let n = match p.deg() {
        None => return Err(Error::Numeric("roots of the zero polynomial".into())),
        Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let lc = p.lc();
    let monic: Vec<C<T>> = p.coeffs().iter().map(|a| *a / lc).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..n].iter().map(|a| abs(*a)).fold(0.0, f64::max);
    let start = radius.min(1e6).max(1e-3);
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex::new(T::of(start * th.cos()), T::of(start * th.sin()))
        })
        .collect();
    let tol = 16.0 * T::unit_roundoff();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (val, der) = eval_with_derivative(&monic, z[k]);
            if Ring::is_zero(&val) {
                continue;
            }
            let ratio = val / der;
            let mut s = C::<T>::zero();
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if !Ring::is_zero(&d) {
                        s = s + C::<T>::one() / d;
                    }
                }
            }
            let denom = C::<T>::one() - ratio * s;
            let w = if Ring::is_zero(&denom) { ratio } else { ratio / denom };
            z[k] = z[k] - w;
            max_step = max_step.max(abs(w) / (1.0 + abs(z[k])));
        }
        if max_step < tol {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..2 {
            let (val, der) = eval_with_derivative(&monic, *zk);
            if Ring::is_zero(&der) {
                break;
            }
            let step = val / der;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zk = *zk - step;
        }
    }
    if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(Error::Numeric("root iteration diverged".into()));
    }
    Ok(z)
}

/// Roots of `a z² + b z + c` with `a ≠ 0`, using the cancellation-free
/// form of the quadratic formula.
pub fn quadratic_roots<T: Real>(a: C<T>, b: C<T>, c: C<T>) -> [C<T>; 2] {
    let disc = csqrt(b * b - a * c * cr(T::of(4.0)));
    let sign = if (b.conj() * disc).re >= T::zero() { T::one() } else { -T::one() };
    let q = (b + disc * cr(sign)) * cr(T::of(-0.5));
    if Ring::is_zero(&q) {
        return [C::zero(), C::zero()];
    }
    [q / a, c / q]
}

/// Real parts of roots whose imaginary part is negligible, sorted.
pub fn real_roots<T: Real>(rs: &[C<T>], tol: f64) -> Vec<T> {
    let mut out: Vec<T> = rs
        .iter()
        .filter(|z| z.im.abs().f64() <= tol * (1.0 + abs(**z)))
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Rational;
    use crate::numverify::real::{c, poly_q};
    use crate::numverify::real::DoubleDouble;

    #[test]
    fn quintic_roots_double() {
        // x(x²+2x+1/2)(x²+2x−1/2)
        let p = Poly::new(vec![
            Rational::zero(),
            Rational::new(-1, 4),
            Rational::zero(),
            Rational::integer(4),
            Rational::integer(4),
            Rational::one(),
        ]);
        let pc = poly_q::<f64>(&p);
        let rs = roots(&pc).unwrap();
        let s2 = 2f64.sqrt() / 2.0;
        let s6 = 6f64.sqrt() / 2.0;
        let mut expect = [0.0, -1.0 + s2, -1.0 - s2, -1.0 + s6, -1.0 - s6];
        let mut got: Vec<f64> = real_roots(&rs, 1e-9);
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(expect.iter()) {
            assert!((g - e).abs() < 1e-13, "{g} vs {e}");
        }
    }

    #[test]
    fn roots_at_double_double() {
        let p = Poly::new(vec![Rational::integer(-2), Rational::zero(), Rational::one()]);
        let rs = roots(&poly_q::<DoubleDouble>(&p)).unwrap();
        let sqrt2 = DoubleDouble::of(2.0).sqrt();
        let best = rs.iter().map(|z| (z.re.abs() - sqrt2).abs().f64() + z.im.abs().f64()).fold(1.0, f64::min);
        assert!(best < 1e-28);
    }

    #[test]
    fn quadratic_formula_stable() {
        let [r1, r2] = quadratic_roots::<f64>(c(1.0, 0.0), c(-1e8, 0.0), c(1.0, 0.0));
        let small = if abs(r1) < abs(r2) { r1 } else { r2 };
        assert!((small.re - 1e-8).abs() < 1e-20);
    }
}

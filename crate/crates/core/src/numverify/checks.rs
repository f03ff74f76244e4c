use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::cantor::{distance, double, CPoint, NumDivisor};
use super::push::{identity_residual, NumEdge};
use super::real::{abs, c, csqrt, eval_scale, poly_q, Real, C};
use super::roots::roots;
use super::Report;
use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Rational, Ring};
use crate::kowtop::curve_c2;

/// The canonical step from `C2(H, I2)` onto `Ĉ2`, in floating point.
pub fn c2_edge<T: Real>(h: &Rational, i2: &Rational) -> Result<NumEdge<T>> {
    let (curve, split) = curve_c2(h, i2)?;
    NumEdge::new(poly_q(curve.f()), split.map(|a| C::<T>::from_rational(a)))
}

fn hk(r: Report, h: &Rational, i2: &Rational) -> Report {
    r.param("H", h.to_string()).param("I2", i2.to_string())
}

/// A random affine point of `y² = f(x)` with `x` in `[-2, 2]²`.
pub(crate) fn random_point<T: Real>(f: &Poly<C<T>>, rng: &mut ChaCha8Rng) -> CPoint<T> {
    let x = c::<T>(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let y = csqrt(f.eval(&x));
    CPoint::new(x, if rng.random_bool(0.5) { y } else { -y })
}

fn weierstrass_points<T: Real>(g: &Poly<C<T>>) -> Result<Vec<CPoint<T>>> {
    Ok(roots(g)?.into_iter().map(|x| CPoint::new(x, C::zero())).collect())
}

/// Which kernel an edge check looks at: `[G_i]` on the source pushed
/// through `Z`, or `[L_i]` on the target pulled back through `Zᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSide {
    Source,
    Target,
}

/// Every point entering the push (or pull) of `Σ P_i − n·O` before
/// reduction, with all `n` base-point copies.
fn moved_points<T: Real>(e: &NumEdge<T>, d: &[CPoint<T>], side: KernelSide) -> Result<Vec<CPoint<T>>> {
    let mut out = Vec::new();
    for p in d {
        match side {
            KernelSide::Source => {
                out.extend(e.push_point(p)?);
                out.extend(e.image_of_source_base());
            }
            KernelSide::Target => {
                out.extend(e.pull_point(p)?);
                out.extend(e.preimage_of_target_base()?);
            }
        }
    }
    Ok(out)
}

/// The three generators of the kernel on the chosen side, as classes of
/// Weierstrass points.
fn kernel_classes<T: Real>(e: &NumEdge<T>, side: KernelSide) -> Result<Vec<Vec<CPoint<T>>>> {
    match side {
        KernelSide::Source => e.split.factors().iter().map(weierstrass_points).collect(),
        KernelSide::Target => e
            .rich
            .l
            .iter()
            .map(|l| Ok(roots(l)?.into_iter().filter_map(|x| e.chart_point(x, C::zero())).collect()))
            .collect(),
    }
}

/// The three kernel generators die under the edge; a mixed two-torsion
/// class (one point from the second generator, one from the third) does
/// not.
pub fn kernel_check_edge<T: Real>(e: &NumEdge<T>, side: KernelSide) -> Result<Report> {
    let tol = 1e-6;
    let run = |pts: Vec<CPoint<T>>| {
        let d = NumDivisor { points: pts };
        match side {
            KernelSide::Source => e.push_class(&d),
            KernelSide::Target => e.pull_class(&d),
        }
    };
    let classes = kernel_classes(e, side)?;
    let mut residuals = Vec::new();
    for pts in &classes {
        let reduced = run(pts.clone())?;
        let r = if reduced.is_identity() { identity_residual(&moved_points(e, pts, side)?) } else { f64::INFINITY };
        residuals.push(r);
    }
    let mixed: Vec<CPoint<T>> = [&classes[1], &classes[2]].iter().filter_map(|c| c.first().copied()).collect();
    let control = run(mixed)?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let mut r = Report::new::<T>("kernel", 3, worst, tol);
    r.pass &= !control.is_identity();
    r.details = json!({
        "side": format!("{side:?}").to_lowercase(),
        "residuals": residuals,
        "control_is_identity": control.is_identity(),
        "control_image": control.coords(),
    });
    Ok(r)
}

/// The classes `[G1]`, `[G2]`, `[G3]` of the canonical splitting of `C2`
/// die under the step onto `Ĉ2`.
pub fn kernel_check<T: Real>(h: &Rational, i2: &Rational) -> Result<Report> {
    Ok(hk(kernel_check_edge(&c2_edge::<T>(h, i2)?, KernelSide::Source)?, h, i2))
}

/// One sample of the doubling check: pull `d` back, push it forward, and
/// compare with `2d`.
fn mult2_sample<T: Real>(e: &NumEdge<T>, d: &NumDivisor<T>) -> Result<f64> {
    let there = e.push_class(&e.pull_class(d)?)?;
    let twice = double(d, &e.target, e.tol)?;
    Ok(distance(&there, &twice))
}

/// The step composed with its dual equals doubling on the target, checked
/// on `samples` random classes.
pub fn mult2_check_edge<T: Real>(e: &NumEdge<T>, samples: usize, seed: u64) -> Result<Report> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let tol = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(samples);
    let mut resampled = 0usize;
    while errors.len() < samples {
        let d = NumDivisor { points: vec![random_point(&e.target, &mut rng), random_point(&e.target, &mut rng)] };
        match mult2_sample(e, &d) {
            Ok(err) if err.is_finite() => errors.push(err),
            _ if resampled < 10 * samples => resampled += 1,
            Ok(err) => errors.push(err),
            Err(x) => return Err(x),
        }
    }
    let identity_ok = mult2_sample(e, &NumDivisor::identity())? == 0.0;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let mut r = Report::new::<T>("mult2", samples, worst, tol).param("seed", seed);
    r.pass &= identity_ok;
    r.details = json!({ "errors": errors, "resampled": resampled, "identity_maps_to_identity": identity_ok });
    Ok(r)
}

pub fn mult2_check<T: Real>(h: &Rational, i2: &Rational, samples: usize, seed: u64) -> Result<Report> {
    Ok(hk(mult2_check_edge(&c2_edge::<T>(h, i2)?, samples, seed)?, h, i2))
}

/// Branches `X_k(x)` over a source point with `Y_k` and `dX_k/dx`; `None`
/// near branch points.
fn branches<T: Real>(e: &NumEdge<T>, p: &CPoint<T>) -> Option<[(C<T>, C<T>, C<T>); 2]> {
    let [g1, g2, _] = e.split.factors().clone();
    let [l1, l2, _] = e.rich.l.clone();
    let rel = e.corr.in_big_x(&p.x);
    if abs(rel.coeff(2)) < 1e-6 * super::real::coeff_scale(&rel) {
        return None;
    }
    let xs = super::roots::quadratic_roots(rel.coeff(2), rel.coeff(1), rel.coeff(0));
    if abs(xs[0] - xs[1]) < 1e-4 * (1.0 + abs(xs[0])) {
        return None;
    }
    let (dg1, dg2, dl1, dl2) = (g1.derivative(), g2.derivative(), l1.derivative(), l2.derivative());
    let out = xs.map(|big_x| {
        let rx = dg1.eval(&p.x) * l1.eval(&big_x) + dg2.eval(&p.x) * l2.eval(&big_x);
        let r_big = g1.eval(&p.x) * dl1.eval(&big_x) + g2.eval(&p.x) * dl2.eval(&big_x);
        let big_y = e.corr.product(&p.x, &big_x) / p.y;
        (big_x, big_y, -rx / r_big)
    });
    Some(out)
}

/// Trace of `S(X)·dX/Y` over the two branches, divided by `dx`.
fn trace_of<T: Real>(b: &[(C<T>, C<T>, C<T>); 2], s: &Poly<C<T>>) -> C<T> {
    b.iter().fold(C::zero(), |acc, (x, y, dx)| acc + s.eval(x) * *dx / *y)
}

/// Relative error of `trace(S dX/Y) = S(x)/y` for `S = 1` and `S = X`; the
/// `S = X²` row is a negative control that must fail.
pub fn trace_check_edge<T: Real>(e: &NumEdge<T>, samples: usize, seed: u64) -> Result<Report> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let tol = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms = [Poly::one(), Poly::x(), &Poly::x() * &Poly::x()];
    let mut worst = [0.0f64; 3];
    let mut taken = 0;
    let mut resampled = 0;
    while taken < samples {
        let p = super::checks::random_point(&e.source, &mut rng);
        let near_branch = abs(p.y).powi(2) < 1e-6 * eval_scale(&e.source, p.x);
        let Some(b) = branches(e, &p).filter(|_| !near_branch) else {
            resampled += 1;
            continue;
        };
        for (k, s) in forms.iter().enumerate() {
            let want = s.eval(&p.x) / p.y;
            let err = abs(trace_of(&b, s) - want) / abs(want).max(1e-300);
            worst[k] = worst[k].max(err);
        }
        taken += 1;
    }
    let max_error = worst[0].max(worst[1]);
    let mut r = Report::new::<T>("trace", samples, max_error, tol).param("seed", seed).tol("negative_control_min", 1e-3);
    let control_fails = worst[2] > 1e-3;
    r.pass &= control_fails;
    r.details = json!({
        "error_s_1": worst[0],
        "error_s_x": worst[1],
        "error_s_x2": worst[2],
        "negative_control_fails": control_fails,
        "resampled": resampled,
    });
    Ok(r)
}

/// The trace check on the canonical step of `C2(H, I2)`, plus the pullback
/// of `(dξ/η, ξdξ/η)` through `ξ = X + H`, `η = iY` against the matrix
/// `[[−i, −iH], [0, −i]]`.
pub fn trace_check<T: Real>(h: &Rational, i2: &Rational, samples: usize, seed: u64) -> Result<Report> {
    let e = c2_edge::<T>(h, i2)?;
    let mut r = hk(trace_check_edge(&e, samples, seed)?, h, i2);
    let hh = C::<T>::from_rational(h);
    let i = C::<T>::new(T::zero(), T::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut taken = 0;
    while taken < samples {
        let p = random_point(&e.source, &mut rng);
        let Some(b) = branches(&e, &p) else { continue };
        // dξ/η = −i·dX/Y and ξdξ/η = −i(X + H)·dX/Y
        let t0 = -i * trace_of(&b, &Poly::one());
        let t1 = -i * (trace_of(&b, &Poly::x()) + hh * trace_of(&b, &Poly::one()));
        let want0 = -i / p.y;
        let want1 = (-i * p.x - i * hh) / p.y;
        worst = worst.max(abs(t0 - want0) / abs(want0)).max(abs(t1 - want1) / abs(want1));
        taken += 1;
    }
    r.max_error = r.max_error.max(worst);
    r.pass &= worst <= r.tolerance;
    r.details["pullback_matrix_error"] = json!(worst);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numverify::real::DoubleDouble;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn kernel_at_one_two() {
        let r = kernel_check::<f64>(&q(1), &q(2)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.details["control_is_identity"], json!(false));
    }

    #[test]
    fn mult2_at_one_two_and_precision_scaling() {
        let lo = mult2_check::<f64>(&q(1), &q(2), 20, 7).unwrap();
        assert!(lo.pass, "{lo:?}");
        let hi = mult2_check::<DoubleDouble>(&q(1), &q(2), 20, 7).unwrap();
        assert!(hi.max_error < lo.max_error * 1e-6, "{} {}", lo.max_error, hi.max_error);
        assert_eq!(hi.precision_bits, 106);
    }

    #[test]
    fn trace_and_its_negative_control() {
        let r = trace_check::<f64>(&q(1), &q(2), 50, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.details["error_s_x2"].as_f64().unwrap() > 1e-3);
    }

    #[test]
    fn dual_kernel_on_both_edge_types() {
        let e = c2_edge::<f64>(&q(1), &q(2)).unwrap();
        let r = kernel_check_edge(&e, KernelSide::Target).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn trace_on_a_sextic_image_step() {
        let g1 = Poly::new(vec![c::<f64>(0.0, 0.0), c(1.0, 0.0)]);
        let g2 = Poly::new(vec![c(1.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        let g3 = Poly::new(vec![c(-5.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let f = &(&g1 * &g2) * &g3;
        let e = NumEdge::new(f, crate::genus2::QuadSplit::new(g1, g2, g3).unwrap()).unwrap();
        let r = trace_check_edge(&e, 20, 1).unwrap();
        assert!(r.pass, "{r:?}");
        let m = mult2_check_edge(&e, 10, 2).unwrap();
        assert!(m.pass, "{m:?}");
        for side in [KernelSide::Source, KernelSide::Target] {
            let k = kernel_check_edge(&e, side).unwrap();
            assert!(k.pass, "{k:?}");
        }
    }
}

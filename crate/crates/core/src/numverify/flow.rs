use serde_json::json;

use super::cantor::{CPoint, NumDivisor};
use super::checks::c2_edge;
use super::real::{abs, c, cr, csqrt, eval_scale, poly_q, Real, C};
use super::Report;
use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Rational, Ring};
use crate::kowtop::{curve_c1, curve_c2, integrate_top, invariants_of, xi_variables, TopState};

/// A point of `Sym²(C)` at time `t`: `(x1, u1)`, `(x2, u2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowState<T> {
    pub t: f64,
    pub x: [C<T>; 2],
    pub u: [C<T>; 2],
}

impl<T: Real> FlowState<T> {
    /// `(x1, +√f(x1))`, `(x2, +√f(x2))` on `C2(H, I2)` at `t = 0`.
    pub fn on_c2(h: &Rational, i2: &Rational, x1: f64, x2: f64) -> Result<Self> {
        let f = poly_q::<T>(curve_c2(h, i2)?.0.f());
        if x1 == x2 {
            return Err(Error::Numeric("x1 = x2 in the initial divisor".into()));
        }
        let x = [c(x1, 0.0), c(x2, 0.0)];
        Ok(FlowState { t: 0.0, x, u: x.map(|x| csqrt(f.eval(&x))) })
    }

    fn points(&self) -> [CPoint<T>; 2] {
        [CPoint::new(self.x[0], self.u[0]), CPoint::new(self.x[1], self.u[1])]
    }

    fn drift(&self, f: &Poly<C<T>>) -> f64 {
        (0..2).map(|k| abs(self.u[k] * self.u[k] - f.eval(&self.x[k])) / eval_scale(f, self.x[k])).fold(0.0, f64::max)
    }
}

type Vec4<T> = [C<T>; 4];

/// `dx1/dt = −√2·u1/(x1 − x2)`, `dx2/dt = √2·u2/(x1 − x2)`, and
/// `du_k/dt = f'(x_k)·(dx_k/dt)/(2u_k)` with the `u_k` cancelled.
fn dubrovin_rhs<T: Real>(fp: &Poly<C<T>>, s: &Vec4<T>) -> Result<Vec4<T>> {
    let [x1, x2, u1, u2] = *s;
    let d = x1 - x2;
    if abs(d) < 1e-9 * (1.0 + abs(x1)) {
        return Err(Error::Numeric("x1 and x2 collide".into()));
    }
    let r2 = cr(T::of(2.0).sqrt());
    Ok([-r2 * u1 / d, r2 * u2 / d, -fp.eval(&x1) / (r2 * d), fp.eval(&x2) / (r2 * d)])
}

fn rk4<T: Real>(fp: &Poly<C<T>>, s: &Vec4<T>, dt: f64) -> Result<Vec4<T>> {
    let h = cr(T::of(dt));
    let half = cr(T::of(0.5));
    let step = |a: &Vec4<T>, k: &Vec4<T>, w: C<T>| [0, 1, 2, 3].map(|i| a[i] + w * k[i]);
    let k1 = dubrovin_rhs(fp, s)?;
    let k2 = dubrovin_rhs(fp, &step(s, &k1, half * h))?;
    let k3 = dubrovin_rhs(fp, &step(s, &k2, half * h))?;
    let k4 = dubrovin_rhs(fp, &step(s, &k3, h))?;
    let sixth = h / C::<T>::from_i64(6);
    let two = C::<T>::from_i64(2);
    Ok([0, 1, 2, 3].map(|i| s[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i])))
}

/// One Newton step on `u² = f(x)` with `x` fixed, skipped near
/// Weierstrass points.
fn project<T: Real>(f: &Poly<C<T>>, x: C<T>, u: C<T>) -> C<T> {
    if abs(u).powi(2) < 1e-3 * eval_scale(f, x) {
        return u;
    }
    u + (f.eval(&x) - u * u) / (C::<T>::from_i64(2) * u)
}

/// RK4 trajectory of the Dubrovin system on `Sym²(C2)`; one state per step
/// (the initial state included). Negative `dt` runs backwards.
pub fn dubrovin_flow<T: Real>(
    h: &Rational,
    i2: &Rational,
    init: FlowState<T>,
    t_end: f64,
    dt: f64,
) -> Result<Vec<FlowState<T>>> {
    let f = poly_q::<T>(curve_c2(h, i2)?.0.f());
    let fp = f.derivative();
    let steps = ((t_end - init.t) / dt).round().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = [init.x[0], init.x[1], init.u[0], init.u[1]];
    out.push(init);
    for n in 1..=steps {
        let t = init.t + n as f64 * dt;
        let next = rk4(&fp, &s, dt).map_err(|e| Error::Numeric(format!("{e} at t = {t}")))?;
        s = [next[0], next[1], project(&f, next[0], next[2]), project(&f, next[1], next[3])];
        out.push(FlowState { t, x: [s[0], s[1]], u: [s[2], s[3]] });
    }
    Ok(out)
}

/// Incremental Abel sums `(∫dx/y, ∫x dx/y)` along a moving point of
/// `y² = f(x)`. Each trapezoid step uses `dx/y` or `2dy/f'(x)`, whichever
/// integrand varies less over the step.
struct AbelSum<T> {
    fp: Poly<C<T>>,
    total: [C<T>; 2],
}

impl<T: Real> AbelSum<T> {
    fn new(f: &Poly<C<T>>) -> Self {
        AbelSum { fp: f.derivative(), total: [C::zero(), C::zero()] }
    }

    fn step(&mut self, a: &CPoint<T>, b: &CPoint<T>) {
        let half = cr(T::of(0.5));
        let two = C::<T>::from_i64(2);
        let vary = |p: C<T>, q: C<T>| abs(p - q) / (abs(p) + abs(q)).max(1e-300);
        let (ga, gb) = (C::<T>::one() / a.y, C::<T>::one() / b.y);
        let (ha, hb) = (two / self.fp.eval(&a.x), two / self.fp.eval(&b.x));
        let use_dx = (ga.re.is_finite() && gb.re.is_finite() && vary(ga, gb) <= vary(ha, hb)) || !ha.re.is_finite();
        for k in 0..2 {
            let w = |p: &CPoint<T>| if k == 0 { C::<T>::one() } else { p.x };
            let inc = if use_dx {
                (b.x - a.x) * half * (w(a) * ga + w(b) * gb)
            } else {
                (b.y - a.y) * half * (w(a) * ha + w(b) * hb)
            };
            self.total[k] = self.total[k] + inc;
        }
    }
}

/// Largest `|A(t) − v·t|` over the samples and the least-squares slope.
fn linearity<T: Real>(ts: &[f64], sums: &[[C<T>; 2]], v: [C<T>; 2]) -> (f64, [C<T>; 2]) {
    let mut worst = 0.0f64;
    let (mut num, mut den) = ([C::<T>::zero(), C::zero()], 0.0);
    for (t, a) in ts.iter().zip(sums) {
        let tt = cr(T::of(*t));
        for k in 0..2 {
            worst = worst.max(abs(a[k] - v[k] * tt));
            num[k] = num[k] + a[k] * tt;
        }
        den += t * t;
    }
    let d = cr(T::of(den.max(1e-300)));
    (worst, num.map(|n| n / d))
}

/// Integrate the Dubrovin flow, track the on-curve drift, Abel-sum
/// linearity `(0, −√2)·t` and time reversal.
pub fn dubrovin_check<T: Real>(h: &Rational, i2: &Rational, init: FlowState<T>, t_end: f64, dt: f64) -> Result<Report> {
    let f = poly_q::<T>(curve_c2(h, i2)?.0.f());
    let traj = dubrovin_flow(h, i2, init, t_end, dt)?;
    let drift = traj.iter().map(|s| s.drift(&f)).fold(0.0, f64::max);
    let mut abel = [AbelSum::new(&f), AbelSum::new(&f)];
    let mut sums = vec![[C::zero(), C::zero()]];
    for w in traj.windows(2) {
        let (a, b) = (w[0].points(), w[1].points());
        for k in 0..2 {
            abel[k].step(&a[k], &b[k]);
        }
        sums.push([0, 1].map(|j| abel[0].total[j] + abel[1].total[j]));
    }
    let ts: Vec<f64> = traj.iter().map(|s| s.t).collect();
    let r2 = T::of(2.0).sqrt();
    let (abel_err, slope) = linearity(&ts, &sums, [C::zero(), cr(-r2)]);
    let last = *traj.last().expect("nonempty");
    let back = dubrovin_flow(h, i2, last, init.t, -dt)?;
    let end = back.last().expect("nonempty");
    let reversal = (0..2).map(|k| abs(end.x[k] - init.x[k]) + abs(end.u[k] - init.u[k])).fold(0.0, f64::max);
    let (tol_drift, tol_abel, tol_rev) = (1e-8, 1e-5, 1e-6);
    let worst = (drift / tol_drift).max(abel_err / tol_abel).max(reversal / tol_rev);
    let mut r = Report::new::<T>("dubrovin", traj.len(), abel_err, tol_abel)
        .param("H", h.to_string())
        .param("I2", i2.to_string())
        .param("t_end", t_end)
        .param("dt", dt)
        .tol("drift", tol_drift)
        .tol("reversal", tol_rev);
    r.pass = worst <= 1.0;
    r.details = json!({
        "drift": drift,
        "abel_error": abel_err,
        "abel_rate": slope.map(|z| [z.re.f64(), z.im.f64()]),
        "reversal_error": reversal,
    });
    Ok(r)
}

/// Match `new` to `prev` by nearest continuation.
fn track<T: Real>(prev: &[CPoint<T>; 2], new: &[CPoint<T>]) -> Option<[CPoint<T>; 2]> {
    let [a, b] = new else { return None };
    let d = |p: &CPoint<T>, q: &CPoint<T>| abs(p.x - q.x) + abs(p.y - q.y);
    if d(&prev[0], a) + d(&prev[1], b) <= d(&prev[0], b) + d(&prev[1], a) {
        Some([*a, *b])
    } else {
        Some([*b, *a])
    }
}

/// Push the Dubrovin trajectory through `ξ = X + H`, `η = iY` composed with
/// the canonical step and check that `(∫dξ/η, ∫ξdξ/η)` grows as
/// `(0, i)·t̃` with `t̃ = √2·t`.
pub fn flow_transport_check<T: Real>(
    h: &Rational,
    i2: &Rational,
    init: FlowState<T>,
    t_end: f64,
    dt: f64,
) -> Result<Report> {
    let e = c2_edge::<T>(h, i2)?;
    let f1 = poly_q::<T>(curve_c1(h, i2)?.f());
    let hh = C::<T>::from_rational(h);
    let i = C::<T>::new(T::zero(), T::one());
    let to_c1 = |p: &CPoint<T>| CPoint::new(p.x + hh, i * p.y);
    let traj = dubrovin_flow(h, i2, init, t_end, dt)?;
    let mut prev: Option<[CPoint<T>; 2]> = None;
    let mut abel = [AbelSum::new(&f1), AbelSum::new(&f1)];
    let mut sums = Vec::with_capacity(traj.len());
    let mut residual = 0.0f64;
    for s in &traj {
        let d = e.push_class(&NumDivisor { points: s.points().to_vec() })?;
        let img: Vec<CPoint<T>> = d.points.iter().map(to_c1).collect();
        let lost = || Error::Numeric(format!("branch tracking lost at t = {}", s.t));
        let cur = match &prev {
            None => <[CPoint<T>; 2]>::try_from(img.clone()).map_err(|_| lost())?,
            Some(p) => track(p, &img).ok_or_else(lost)?,
        };
        residual = residual.max(cur.iter().map(|p| p.residual(&f1)).fold(0.0, f64::max));
        if let Some(p) = &prev {
            for k in 0..2 {
                abel[k].step(&p[k], &cur[k]);
            }
        }
        sums.push([0, 1].map(|j| abel[0].total[j] + abel[1].total[j]));
        prev = Some(cur);
    }
    let ts: Vec<f64> = traj.iter().map(|s| s.t).collect();
    let r2 = cr(T::of(2.0).sqrt());
    let v = [C::zero(), i * r2];
    let (deviation, slope) = linearity(&ts, &sums, v);
    let rate_error = (0..2).map(|k| abs(slope[k] - v[k])).fold(0.0, f64::max);
    let (tol_dev, tol_rate, tol_res) = (1e-4, 1e-5, 1e-6);
    let mut r = Report::new::<T>("flow", traj.len(), deviation, tol_dev)
        .param("H", h.to_string())
        .param("I2", i2.to_string())
        .param("t_end", t_end)
        .param("dt", dt)
        .tol("rate", tol_rate)
        .tol("on_curve", tol_res);
    r.pass &= rate_error <= tol_rate && residual <= tol_res;
    r.details = json!({
        "deviation": deviation,
        "rate": slope.map(|z| [z.re.f64(), z.im.f64()]),
        "expected_rate": [[0.0, 0.0], [0.0, 2f64.sqrt()]],
        "rate_error": rate_error,
        "on_curve_residual": residual,
    });
    Ok(r)
}

/// Run the top, read off the ξ-chart along the way and check that the
/// chart points stay on C1 and that `Σ ξ_k^j·(dξ_k/dt̃)/η_k = (0, i)_j`.
/// Samples with `|l2|` or `|ξ1 − ξ2|` below `mask` are skipped.
pub fn top_to_curve_check(s0: &TopState<f64>, t_end: f64, dt: f64, mask: f64) -> Result<Report> {
    let traj = integrate_top(s0, t_end, dt, 1)?;
    let inv0 = invariants_of(s0);
    let f1 = curve_c1(&inv0.h, &inv0.i2)?.f().map(|a| num_complex::Complex64::new(*a, 0.0));
    let i = num_complex::Complex64::new(0.0, 1.0);
    let (mut residual, mut velocity, mut masked, mut used) = (0.0f64, 0.0f64, 0usize, 0usize);
    for smp in &traj.samples {
        let s = TopState::new(smp.l, smp.g);
        if s.l[1].abs() < mask {
            masked += 1;
            continue;
        }
        let ch = xi_variables(&s, smp.t, f64::INFINITY)?;
        let [x1, x2] = ch.xi_c;
        if (x1 - x2).norm() < mask * (1.0 + x1.norm()) {
            masked += 1;
            continue;
        }
        // The chart uses the curve of the current invariants; compare with
        // the curve fixed at the start as well.
        let r0 = (0..2)
            .map(|k| (ch.eta_c[k] * ch.eta_c[k] - f1.eval(&ch.xi_c[k])).norm() / eval_scale(&f1, ch.xi_c[k]))
            .fold(0.0, f64::max);
        residual = residual.max(ch.residual).max(r0);
        let sum = |j: i32| (0..2).map(|k| ch.xi_c[k].powi(j) * ch.rate_c[k] / ch.eta_c[k]).sum::<num_complex::Complex64>();
        velocity = velocity.max(sum(0).norm()).max((sum(1) - i).norm());
        used += 1;
    }
    let tol = 1e-6;
    let drift = traj.drift.max();
    let mut r = Report::new::<f64>("top", used, residual.max(velocity), tol)
        .param("l0", s0.l)
        .param("g0", s0.g)
        .param("t_end", t_end)
        .param("dt", dt)
        .tol("mask", mask)
        .tol("invariant_drift", 1e-8);
    r.pass &= drift <= 1e-8 && used > 0;
    r.params.insert("H".into(), json!(inv0.h));
    r.params.insert("I2".into(), json!(inv0.i2));
    r.details = json!({
        "on_curve_residual": residual,
        "velocity_error": velocity,
        "masked": masked,
        "invariant_drift": drift,
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn dubrovin_at_three_halves_five() {
        let init = FlowState::<f64>::on_c2(&q(3, 2), &q(5, 1), -0.3, -2.7).unwrap();
        let r = dubrovin_check(&q(3, 2), &q(5, 1), init, 1.0, 1e-4).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn transport_to_c1() {
        let init = FlowState::<f64>::on_c2(&q(3, 2), &q(5, 1), -0.3, -2.7).unwrap();
        let r = flow_transport_check(&q(3, 2), &q(5, 1), init, 0.5, 1e-4).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn top_lands_on_c1() {
        let s0 = TopState::new([1.0, 0.0, 1.0], [0.0, 1.0, 0.0]);
        let r = top_to_curve_check(&s0, 2.0, 1e-3, 1e-2).unwrap();
        assert!(r.pass, "{r:?}");
        let bad = TopState::new([1.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
        assert!(matches!(top_to_curve_check(&bad, 1.0, 1e-3, 1e-2), Err(Error::Constraint(_))));
    }
}

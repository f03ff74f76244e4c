//! The Kowalewski top: state, equations of motion, first integrals, the Lax
//! matrix and spectral curve, the curves C1 and C2, the ξ-chart and the two
//! linear-flow velocities.
//!
//! Conventions: inertia `diag(1, 1, 1/2)`, so `ω = (l1, l2, 2·l3)`; centre
//! of mass `c = e1`; `|g| = 1` and `(l, g) = 0` on the physical slice.

mod curves;
mod lax;
mod xi;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Rational, Ring};

pub use curves::{canonical_velocities, check_nondegenerate, curve_c1, curve_c2, degeneracy};
pub use lax::{d1, d2, lax_matrix, omega0, spectral_identity_residual, spectral_poly, spectral_to_canonical};
pub use xi::{xi_symmetric, xi_variables, XiChart};

/// Angular momentum `l` and gravity direction `g` in the body frame.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TopState<F> {
    pub l: [F; 3],
    pub g: [F; 3],
}

/// `H`, `I1 = (l, g)²`, `I2` and `γ = |g|²`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct MotionInvariants<F> {
    #[serde(rename = "H")]
    pub h: F,
    #[serde(rename = "I1")]
    pub i1: F,
    #[serde(rename = "I2")]
    pub i2: F,
    pub gamma: F,
}

fn cross<F: Ring>(a: &[F; 3], b: &[F; 3]) -> [F; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

fn dot<F: Ring>(a: &[F; 3], b: &[F; 3]) -> F {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

impl<F: Field> TopState<F> {
    pub fn new(l: [F; 3], g: [F; 3]) -> Self {
        TopState { l, g }
    }

    /// `(l, g)`.
    pub fn area(&self) -> F {
        dot(&self.l, &self.g)
    }

    pub fn gnorm2(&self) -> F {
        dot(&self.g, &self.g)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> TopState<G> {
        TopState { l: self.l.clone().map(|x| f(&x)), g: self.g.clone().map(|x| f(&x)) }
    }

    /// `self + h·v`, treating the pair as a vector in six dimensions.
    pub fn axpy(&self, h: &F, v: &TopState<F>) -> Self {
        let step = |a: &[F; 3], b: &[F; 3]| {
            [0, 1, 2].map(|k| a[k].clone() + h.clone() * b[k].clone())
        };
        TopState { l: step(&self.l, &v.l), g: step(&self.g, &v.g) }
    }
}

impl TopState<f64> {
    /// Require `(l, g) = 0` and `|g|² = 1` up to `tol`.
    pub fn check_constraints(&self, tol: f64) -> Result<()> {
        let a = self.area();
        if a.abs() > tol {
            return Err(Error::Constraint(format!("(l, g) = {a:e}, expected 0")));
        }
        let n = self.gnorm2();
        if (n - 1.0).abs() > tol {
            return Err(Error::Constraint(format!("|g|² = {n}, expected 1")));
        }
        Ok(())
    }

    fn max_abs(&self) -> f64 {
        self.l.iter().chain(&self.g).fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn invariants_of<F: Field>(s: &TopState<F>) -> MotionInvariants<F> {
    let [l1, l2, l3] = s.l.clone();
    let [g1, g2, _] = s.g.clone();
    let two = F::from_i64(2);
    let half = F::from_rational(&Rational::new(1, 2));
    let h = half * (l1.clone() * l1.clone() + l2.clone() * l2.clone() + two.clone() * l3.clone() * l3)
        - g1.clone();
    let a = s.area();
    let p = l1.clone() * l1.clone() - l2.clone() * l2.clone() + two.clone() * g1;
    let q = l1 * l2 + g2;
    let i2 = p.clone() * p + F::from_i64(4) * q.clone() * q;
    MotionInvariants { h, i1: a.clone() * a, i2, gamma: s.gnorm2() }
}

/// Time derivative: `dl/dt = l × ω + c × g`, `dg/dt = g × ω`.
pub fn top_vector_field<F: Field>(s: &TopState<F>) -> TopState<F> {
    let [l1, l2, l3] = s.l.clone();
    let omega = [l1, l2, F::from_i64(2) * l3];
    let c = [F::one(), F::zero(), F::zero()];
    let lw = cross(&s.l, &omega);
    let cg = cross(&c, &s.g);
    TopState {
        l: [0, 1, 2].map(|k| lw[k].clone() + cg[k].clone()),
        g: cross(&s.g, &omega),
    }
}

/// Directional derivatives of `(H, I1, I2, |g|²)` along the vector field,
/// computed exactly with dual numbers.
pub fn invariant_rates<F: Field>(s: &TopState<F>) -> MotionInvariants<F> {
    use crate::exactfield::Dual;
    let v = top_vector_field(s);
    let lift = |a: &[F; 3], b: &[F; 3]| [0, 1, 2].map(|k| Dual::new(a[k].clone(), b[k].clone()));
    let d = TopState { l: lift(&s.l, &v.l), g: lift(&s.g, &v.g) };
    let inv = invariants_of(&d);
    MotionInvariants { h: inv.h.eps, i1: inv.i1.eps, i2: inv.i2.eps, gamma: inv.gamma.eps }
}

pub fn rk4_step(s: &TopState<f64>, dt: f64) -> TopState<f64> {
    let k1 = top_vector_field(s);
    let k2 = top_vector_field(&s.axpy(&(dt / 2.0), &k1));
    let k3 = top_vector_field(&s.axpy(&(dt / 2.0), &k2));
    let k4 = top_vector_field(&s.axpy(&dt, &k3));
    let mut out = s.clone();
    for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
        out = out.axpy(&(dt * w / 6.0), k);
    }
    out
}

/// One recorded sample of a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub l: [f64; 3],
    pub g: [f64; 3],
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    pub gnorm: f64,
}

/// Largest drift of each conserved quantity, relative to `max(|initial|, 1)`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Drift {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    pub gnorm2: f64,
    pub area: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        self.h.max(self.i2).max(self.gnorm2).max(self.area)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
    pub drift: Drift,
    #[serde(skip)]
    pub last: TopState<f64>,
}

fn sample(t: f64, s: &TopState<f64>) -> TrajectorySample {
    let inv = invariants_of(s);
    TrajectorySample { t, l: s.l, g: s.g, h: inv.h, i1: inv.i1, i2: inv.i2, gnorm: inv.gamma.sqrt() }
}

/// Fixed-step RK4 from `s0` to `t_end`, keeping every `every`-th state
/// (and the last). Drift is tracked at every step.
pub fn integrate_top(s0: &TopState<f64>, t_end: f64, dt: f64, every: usize) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Numeric(format!("need dt > 0 and t_end ≥ 0, got dt = {dt}, t_end = {t_end}")));
    }
    s0.check_constraints(1e-9 * (1.0 + s0.max_abs()))?;
    let steps = (t_end / dt).round() as usize;
    let every = every.max(1);
    let inv0 = invariants_of(s0);
    let rel = |x: f64, x0: f64| (x - x0).abs() / x0.abs().max(1.0);
    let mut drift = Drift::default();
    let mut s = s0.clone();
    let mut samples = vec![sample(0.0, s0)];
    for k in 1..=steps {
        s = rk4_step(&s, dt);
        let inv = invariants_of(&s);
        drift.h = drift.h.max(rel(inv.h, inv0.h));
        drift.i2 = drift.i2.max(rel(inv.i2, inv0.i2));
        drift.gnorm2 = drift.gnorm2.max(rel(inv.gamma, inv0.gamma));
        drift.area = drift.area.max(rel(s.area(), s0.area()));
        if k % every == 0 || k == steps {
            samples.push(sample(k as f64 * dt, &s));
        }
    }
    Ok(Trajectory { dt, samples, drift, last: s })
}

/// Random exact state with `|g|² = 1` and `(l, g) = 0`: `g` is a rational
/// point of the unit sphere (inverse stereographic projection) and
/// `l = g × w` for a random rational `w`.
pub fn random_rational_state<R: Rng>(rng: &mut R) -> TopState<Rational> {
    let mut q = || Rational::new(rng.random_range(-20..=20), rng.random_range(1..=9));
    let (a, b) = (q(), q());
    let n = a.clone() * a.clone() + b.clone() * b.clone();
    let den = n.clone() + Rational::one();
    let two = Rational::integer(2);
    let g = [
        two.clone() * a / den.clone(),
        two * b / den.clone(),
        (n - Rational::one()) / den,
    ];
    let w = [q(), q(), q()];
    TopState { l: cross(&g, &w), g }
}

/// Random float state on the physical slice.
pub fn random_constrained_state<R: Rng>(rng: &mut R) -> TopState<f64> {
    loop {
        let v: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-1.0..1.0));
        let n = dot(&v, &v).sqrt();
        if n < 0.1 {
            continue;
        }
        let g = v.map(|x| x / n);
        let w: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-1.5..1.5));
        let l = cross(&g, &w);
        return TopState { l, g };
    }
}

/// Random float state ignoring the area constraint (`|g| = 1` kept).
pub fn random_unconstrained_state<R: Rng>(rng: &mut R) -> TopState<f64> {
    let mut s = random_constrained_state(rng);
    for k in 0..3 {
        s.l[k] += 0.5 * s.g[k] + rng.random_range(-0.2..0.2);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn state(l: [i64; 3], g: [i64; 3]) -> TopState<Rational> {
        TopState::new(l.map(Rational::integer), g.map(Rational::integer))
    }

    #[test]
    fn invariant_examples() {
        let i = invariants_of(&state([1, 0, 1], [0, 1, 0]));
        assert_eq!((i.h, i.i1, i.i2, i.gamma), (q(3, 2), q(0, 1), q(5, 1), q(1, 1)));
        let i = invariants_of(&state([0, 0, 0], [1, 0, 0]));
        assert_eq!((i.h, i.i2), (q(-1, 1), q(4, 1)));
        let i = invariants_of(&state([1, 0, 0], [0, 0, 1]));
        assert_eq!((i.h, i.i1, i.i2), (q(1, 2), q(0, 1), q(1, 1)));
    }

    #[test]
    fn hanging_equilibrium_is_fixed() {
        let v = top_vector_field(&state([0, 0, 0], [1, 0, 0]));
        assert!(v.l.iter().chain(&v.g).all(|x| x.is_zero()));
    }

    #[test]
    fn conservation_is_exact_at_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let s = random_rational_state(&mut rng);
            assert!(s.area().is_zero() && s.gnorm2().is_one());
            let r = invariant_rates(&s);
            assert!(r.h.is_zero() && r.i1.is_zero() && r.i2.is_zero() && r.gamma.is_zero());
        }
    }

    #[test]
    fn rk4_drift_is_fourth_order() {
        let s0 = TopState::new([1.0, 0.0, 1.0], [0.0, 1.0, 0.0]);
        let a = integrate_top(&s0, 2.0, 4e-3, 1000).unwrap().drift.max();
        let b = integrate_top(&s0, 2.0, 2e-3, 1000).unwrap().drift.max();
        assert!(a / b > 10.0, "ratio {}", a / b);
    }

    #[test]
    fn unconstrained_start_is_refused() {
        let s0 = TopState::new([1.0, 0.0, 1.0], [0.0, 0.0, 1.0]);
        assert!(matches!(integrate_top(&s0, 1.0, 1e-3, 1), Err(Error::Constraint(_))));
    }
}

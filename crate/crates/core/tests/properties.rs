use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rk_core::genus2::{bracket, dual_splitting, richelot_split};
use rk_core::igusa::isomorphic_over_closure;
use rk_core::kowtop::{curve_c2, degeneracy, invariant_rates, random_rational_state};
use rk_core::numverify::cantor::{add, distance};
use rk_core::numverify::{c2_edge, CPoint, NumDivisor};
use rk_core::{Field, Poly, QuadSplit, Rational, Ring};

type P = Poly<Rational>;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn quadratic() -> impl Strategy<Value = P> {
    (rational(), rational(), nonzero()).prop_map(|(a, b, c)| P::new(vec![a, b, c]))
}

fn params() -> impl Strategy<Value = (Rational, Rational)> {
    (nonzero(), nonzero()).prop_filter("off the degeneracy wall", |(h, k)| degeneracy(h, k).is_none())
}

fn point(f: &Poly<Complex64>, re: f64, im: f64, up: bool) -> CPoint<f64> {
    let x = Complex64::new(re, im);
    let y = f.eval(&x).sqrt();
    CPoint::new(x, if up { y } else { -y })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rationals_form_a_field(a in rational(), b in rational(), c in nonzero()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        prop_assert_eq!(c.clone() * c.inv().unwrap(), Rational::one());
        prop_assert_eq!(a.clone() - a, Rational::zero());
    }

    #[test]
    fn bracket_is_the_wronskian(g in quadratic(), h in quadratic()) {
        let direct = &(&g.derivative() * &h) - &(&g * &h.derivative());
        prop_assert_eq!(bracket(&g, &h), direct);
        prop_assert_eq!(bracket(&g, &h), -bracket(&h, &g));
    }

    #[test]
    fn dual_step_returns_four_times_the_start(g1 in quadratic(), g2 in quadratic(), g3 in quadratic()) {
        let s = QuadSplit::new(g1, g2, g3).unwrap();
        if let Ok(r) = richelot_split(&s) {
            let back = richelot_split(&dual_splitting(&r)).unwrap();
            prop_assert_eq!(back.image.f(), &s.product().scale(&Rational::integer(4)));
        }
    }

    #[test]
    fn motion_invariants_are_first_integrals(seed in any::<u64>()) {
        let s = random_rational_state(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = invariant_rates(&s);
        prop_assert!(r.h.is_zero() && r.i1.is_zero() && r.i2.is_zero() && r.gamma.is_zero());
    }

    #[test]
    fn pushed_points_lie_on_the_target(re in -2.0f64..2.0, im in 0.05f64..2.0, up in any::<bool>()) {
        let e = c2_edge::<f64>(&Rational::one(), &Rational::integer(2)).unwrap();
        let p = point(&e.source, re, im, up);
        let imgs = e.push_point(&p).unwrap();
        prop_assert!(!imgs.is_empty() && imgs.len() <= 2);
        for q in &imgs {
            prop_assert!(q.residual(&e.target) < 1e-9, "{}", q.residual(&e.target));
        }
        let conj = e.push_point(&p.conj()).unwrap();
        prop_assert_eq!(conj.len(), imgs.len());
        for q in &imgs {
            let best = conj.iter().map(|c| (c.x - q.x).norm() + (c.y + q.y).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8 * (1.0 + q.x.norm() + q.y.norm()), "{}", best);
        }
    }

    #[test]
    fn numeric_addition_commutes_and_associates(xs in prop::array::uniform6((-1.5f64..1.5, 0.1f64..1.5))) {
        let e = c2_edge::<f64>(&Rational::one(), &Rational::integer(2)).unwrap();
        let f = &e.source;
        let d = |k: usize| NumDivisor { points: vec![point(f, xs[k].0, xs[k].1, true), point(f, xs[k + 1].0, -xs[k + 1].1, k % 4 == 0)] };
        let (a, b, c) = (d(0), d(2), d(4));
        let tol = 1e-9;
        let ab = add(&a, &b, f, tol).unwrap();
        prop_assert!(distance(&ab, &add(&b, &a, f, tol).unwrap()) < 1e-7);
        let left = add(&ab, &c, f, tol).unwrap();
        let right = add(&a, &add(&b, &c, f, tol).unwrap(), f, tol).unwrap();
        prop_assert!(distance(&left, &right) < 1e-6, "{}", distance(&left, &right));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn absolute_invariants_ignore_translation_and_twist((h, k) in params(), a in rational(), t in nonzero()) {
        let (c, _) = curve_c2(&h, &k).unwrap();
        let moved = c.affine_change(&a, &t).unwrap();
        prop_assert!(isomorphic_over_closure(&c, &moved).unwrap());
    }
}

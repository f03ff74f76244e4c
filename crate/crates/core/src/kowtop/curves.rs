use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Rational};
use crate::genus2::{FormBasis, HyperCurve, QuadSplit, TimeVar, VelocityVector};

fn quarter<F: Field>() -> F {
    F::from_rational(&Rational::new(1, 4))
}

/// The first vanishing factor among `I2`, `I2 − 4`, `4H² − I2`,
/// `4H² − I2 + 4`, named as an equation.
pub fn degeneracy<F: Field>(h: &F, i2: &F) -> Option<&'static str> {
    let four = F::from_i64(4);
    let d = four.clone() * h.clone() * h.clone() - i2.clone();
    if i2.is_zero() {
        Some("I2 = 0")
    } else if (i2.clone() - four.clone()).is_zero() {
        Some("I2 = 4")
    } else if d.is_zero() {
        Some("4H² − I2 = 0")
    } else if (d + four).is_zero() {
        Some("4H² − I2 + 4 = 0")
    } else {
        None
    }
}

pub fn check_nondegenerate<F: Field>(h: &F, i2: &F) -> Result<()> {
    match degeneracy(h, i2) {
        Some(msg) => Err(Error::Degenerate(msg.into())),
        None => Ok(()),
    }
}

/// `u² = x(x² + 2Hx + I2/4)(x² + 2Hx − 1 + I2/4)` with its splitting
/// `G1 = x`, `G2 = x² + 2Hx + I2/4`, `G3 = G2 − 1`.
pub fn curve_c2<F: Field>(h: &F, i2: &F) -> Result<(HyperCurve<F>, QuadSplit<F>)> {
    check_nondegenerate(h, i2)?;
    let g1 = Poly::x();
    let g2 = Poly::new(vec![quarter::<F>() * i2.clone(), F::from_i64(2) * h.clone(), F::one()]);
    let g3 = &g2 - &Poly::one();
    let c = HyperCurve::new(&(&g1 * &g2) * &g3)?;
    let s = QuadSplit::for_curve(&c, g1, g2, g3)?;
    Ok((c, s))
}

/// `η² = 2ξ((ξ − H)² + 1 − I2/4)((ξ − H)² − I2/4)`.
pub fn curve_c1<F: Field>(h: &F, i2: &F) -> Result<HyperCurve<F>> {
    check_nondegenerate(h, i2)?;
    let shifted = Poly::linear_root(h.clone());
    let sq = &shifted * &shifted;
    let q = quarter::<F>() * i2.clone();
    let a = &sq + &Poly::constant(F::one() - q.clone());
    let b = &sq - &Poly::constant(q);
    HyperCurve::new((&(&Poly::x() * &a) * &b).scale(&F::from_i64(2)))
}

/// The two linear-flow velocities: the Dubrovin flow on Jac(C2), `(0, −1)`
/// in `(ω0, ω1)` with respect to `t`, and Kowalewski's flow on Jac(C1),
/// `(0, i)` in `(dξ/η, ξdξ/η)` with respect to `t̃`.
pub fn canonical_velocities<F: Field>() -> Result<(VelocityVector<F>, VelocityVector<F>)> {
    let i = F::imag_unit().ok_or_else(|| Error::NoImaginaryUnit(F::field_id()))?;
    let dubrovin = VelocityVector {
        coords: [F::zero(), -F::one()],
        sqrt2_power: 0,
        basis: FormBasis::Spectral,
        time: TimeVar::T,
    };
    let kowalewski = VelocityVector { coords: [F::zero(), i], sqrt2_power: 0, basis: FormBasis::Xi, time: TimeVar::TTilde };
    Ok((dubrovin, kowalewski))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Gaussian, ParamField, Ring};
    use crate::genus2::pullback_matrix;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn c2_at_one_two() {
        let (c, s) = curve_c2(&q(1, 1), &q(2, 1)).unwrap();
        let expect = Poly::new(vec![q(0, 1), q(-1, 4), q(0, 1), q(4, 1), q(4, 1), q(1, 1)]);
        assert_eq!(c.f(), &expect);
        assert_eq!(s.g(1), &Poly::new(vec![q(1, 2), q(2, 1), q(1, 1)]));
    }

    #[test]
    fn c1_at_one_two() {
        let c = curve_c1(&q(1, 1), &q(2, 1)).unwrap();
        // 2ξ(ξ² − 2ξ + 3/2)(ξ² − 2ξ + 1/2)
        let a = Poly::new(vec![q(3, 2), q(-2, 1), q(1, 1)]);
        let b = Poly::new(vec![q(1, 2), q(-2, 1), q(1, 1)]);
        assert_eq!(c.f(), &(&(&Poly::x() * &a) * &b).scale(&q(2, 1)));
    }

    #[test]
    fn degeneracy_wall_is_shared() {
        for (h, k, msg) in [(1, 0, "I2 = 0"), (0, 4, "I2 = 4"), (2, 16, "4H² − I2 = 0"), (1, 8, "4H² − I2 + 4 = 0")] {
            let (h, k) = (q(h, 1), q(k, 1));
            assert_eq!(curve_c2(&h, &k).unwrap_err(), Error::Degenerate(msg.into()));
            assert_eq!(curve_c1(&h, &k).unwrap_err(), Error::Degenerate(msg.into()));
        }
        assert_eq!(curve_c2(&q(1, 2), &q(1, 1)).unwrap_err(), Error::Degenerate("4H² − I2 = 0".into()));
        assert!(curve_c2(&ParamField::h(), &ParamField::i2()).is_ok());
        assert!(curve_c1(&ParamField::h(), &ParamField::i2()).is_ok());
    }

    #[test]
    fn velocities_match_under_pullback() {
        let (dub, kow) = canonical_velocities::<ParamField>().unwrap();
        let dub = dub.spectral_to_canonical().unwrap();
        assert_eq!(dub.coords, [ParamField::zero(), -ParamField::one()]);
        assert_eq!(dub.sqrt2_power, 1);
        let moved = pullback_matrix(&ParamField::h()).unwrap().transport(&dub).unwrap();
        assert_eq!(moved, kow.in_time_t());
        assert_eq!(moved.coords[1], ParamField::i());
        assert!(canonical_velocities::<Rational>().is_err());
        assert!(canonical_velocities::<Gaussian>().is_ok());
    }
}

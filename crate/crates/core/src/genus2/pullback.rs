use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::Field;

/// Basis of holomorphic 1-forms a velocity is expressed in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormBasis {
    /// `(ω0, ω1) = (dx/(√2u), x·dx/(√2u))` on the spectral model of C2.
    Spectral,
    /// `(dx/u, x·dx/u)` on the quintic model of C2.
    Canonical,
    /// `(dξ/η, ξ·dξ/η)` on C1.
    Xi,
}

/// Time variable a velocity refers to: `t`, or `t̃ = √2·t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeVar {
    T,
    TTilde,
}

/// Coordinates of a linear flow's velocity, i.e. the rates of the Abel sums
/// of the basis forms. The true vector is `coords · (√2)^sqrt2_power`, which
/// keeps √2 out of the exact fields.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct VelocityVector<F> {
    pub coords: [F; 2],
    pub sqrt2_power: u32,
    pub basis: FormBasis,
    pub time: TimeVar,
}

impl<F: Field> VelocityVector<F> {
    /// Spectral to canonical basis: `ω_k = (x^k dx/u)/√2`, so each rate
    /// picks up a factor √2.
    pub fn spectral_to_canonical(&self) -> Result<Self> {
        if self.basis != FormBasis::Spectral {
            return Err(Error::Numeric(format!("expected spectral basis, got {:?}", self.basis)));
        }
        Ok(VelocityVector {
            coords: self.coords.clone(),
            sqrt2_power: self.sqrt2_power + 1,
            basis: FormBasis::Canonical,
            time: self.time,
        })
    }

    /// Rates with respect to `t̃` converted to rates with respect to
    /// `t = t̃/√2`.
    pub fn in_time_t(&self) -> Self {
        match self.time {
            TimeVar::T => self.clone(),
            TimeVar::TTilde => VelocityVector {
                coords: self.coords.clone(),
                sqrt2_power: self.sqrt2_power + 1,
                basis: self.basis,
                time: TimeVar::T,
            },
        }
    }

    /// Numeric value of the coordinates, given a conversion to complex.
    pub fn evaluate(&self, to_c: impl Fn(&F) -> (f64, f64)) -> [(f64, f64); 2] {
        let s = 2f64.sqrt().powi(self.sqrt2_power as i32);
        self.coords.clone().map(|c| {
            let (re, im) = to_c(&c);
            (re * s, im * s)
        })
    }
}

/// Pullback of 1-forms from C1 to C2 as a 2×2 matrix: column `k` holds the
/// image of the `k`-th form of `(dξ/η, ξ·dξ/η)` in the basis
/// `(dx/u, x·dx/u)`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct DiffPullback<F> {
    pub m: [[F; 2]; 2],
}

/// `dξ/η ↦ −i·dx/u`, `ξ·dξ/η ↦ −iH·dx/u − i·x·dx/u`.
pub fn pullback_matrix<F: Field>(h: &F) -> Result<DiffPullback<F>> {
    let i = F::imag_unit().ok_or_else(|| Error::NoImaginaryUnit(F::field_id()))?;
    let mi = -i;
    Ok(DiffPullback { m: [[mi.clone(), mi.clone() * h.clone()], [F::zero(), mi]] })
}

impl<F: Field> DiffPullback<F> {
    pub fn det(&self) -> F {
        let m = &self.m;
        m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
    }

    /// Pullback along the composite `self` followed by `next`: forms are
    /// pulled back first by `self`, then by `next`, so the matrix is
    /// `next · self`.
    pub fn then(&self, next: &DiffPullback<F>) -> DiffPullback<F> {
        let (a, b) = (&next.m, &self.m);
        let e = |r: usize, c: usize| a[r][0].clone() * b[0][c].clone() + a[r][1].clone() * b[1][c].clone();
        DiffPullback { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    /// Transport a velocity on the source Jacobian: the rate of `∫ω` for a
    /// target form `ω` is the rate of `∫ψ*ω`, giving `Pᵀ·v`.
    pub fn transport(&self, v: &VelocityVector<F>) -> Result<VelocityVector<F>> {
        if v.basis != FormBasis::Canonical {
            return Err(Error::Numeric(format!("expected canonical basis, got {:?}", v.basis)));
        }
        let m = &self.m;
        let c = &v.coords;
        let coord = |k: usize| m[0][k].clone() * c[0].clone() + m[1][k].clone() * c[1].clone();
        Ok(VelocityVector {
            coords: [coord(0), coord(1)],
            sqrt2_power: v.sqrt2_power,
            basis: FormBasis::Xi,
            time: v.time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Gaussian, ParamField, Rational, Ring};

    #[test]
    fn matrix_entries_and_det() {
        let h = ParamField::h();
        let p = pullback_matrix(&h).unwrap();
        let i = ParamField::i();
        assert_eq!(p.m[0][0], -i.clone());
        assert_eq!(p.m[0][1], -(i.clone() * h));
        assert_eq!(p.m[1][0], ParamField::zero());
        assert_eq!(p.m[1][1], -i);
        assert_eq!(p.det(), -ParamField::one());
    }

    #[test]
    fn needs_i() {
        assert!(matches!(pullback_matrix(&Rational::one()), Err(Error::NoImaginaryUnit(_))));
    }

    #[test]
    fn velocity_transport_is_exact() {
        let h = Gaussian::real(Rational::new(3, 2));
        let p = pullback_matrix(&h).unwrap();
        let v = VelocityVector {
            coords: [Gaussian::zero(), -Gaussian::one()],
            sqrt2_power: 1,
            basis: FormBasis::Canonical,
            time: TimeVar::T,
        };
        let w = p.transport(&v).unwrap();
        assert_eq!(w.coords, [Gaussian::zero(), Gaussian::i()]);
        assert_eq!(w.sqrt2_power, 1);
    }

    #[test]
    fn composition_order() {
        let a = DiffPullback { m: [[Rational::integer(1), Rational::integer(2)], [Rational::integer(0), Rational::integer(1)]] };
        let b = DiffPullback { m: [[Rational::integer(3), Rational::integer(0)], [Rational::integer(1), Rational::integer(1)]] };
        let ab = a.then(&b);
        assert_eq!(ab.m[1][1], Rational::integer(3));
        assert_eq!(ab.det(), a.det() * b.det());
    }
}

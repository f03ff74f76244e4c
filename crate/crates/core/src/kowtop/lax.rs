use nalgebra::Matrix4;
use num_complex::Complex64;

use super::TopState;
use crate::error::{Error, Result};

type C = Complex64;

fn nonzero(z: C) -> Result<()> {
    if z == C::new(0.0, 0.0) {
        Err(Error::SpectralPole)
    } else {
        Ok(())
    }
}

/// `d1(z) = 1/z − 2H + 2z`.
pub fn d1(z: C, h: f64) -> Result<C> {
    nonzero(z)?;
    Ok(1.0 / z - 2.0 * h + 2.0 * z)
}

/// `d2(z) = 1/z² − 4H/z + I2`.
pub fn d2(z: C, h: f64, i2: f64) -> Result<C> {
    nonzero(z)?;
    let w = 1.0 / z;
    Ok(w * w - 4.0 * h * w + i2)
}

/// `μ⁴ − 2·d1(λ²)·μ² + d2(λ²)` together with the sum of the absolute
/// values of its terms.
pub fn spectral_poly(h: f64, i2: f64, lambda: C, mu: C) -> Result<(C, f64)> {
    let z = lambda * lambda;
    let (a, b) = (d1(z, h)?, d2(z, h, i2)?);
    let m2 = mu * mu;
    let value = m2 * m2 - 2.0 * a * m2 + b;
    let scale = m2.norm().powi(2) + 2.0 * a.norm() * m2.norm() + b.norm();
    Ok((value, scale))
}

/// The 4×4 Lax matrix `L(λ)`.
pub fn lax_matrix(s: &TopState<f64>, lambda: C) -> Result<Matrix4<C>> {
    if lambda == C::new(0.0, 0.0) {
        return Err(Error::LaxPole);
    }
    let [l1, l2, l3] = s.l.map(|x| C::new(x, 0.0));
    let [g1, g2, g3] = s.g.map(|x| C::new(x, 0.0) / lambda);
    let two = C::new(2.0, 0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        g1,       g2,        -l2 + g3,             -l1,
        g2,       -g1,       l1,                   -l2 - g3,
        l2 + g3,  -l1,       -two * lambda - g1,   -two * l3 + g2,
        l1,       l2 - g3,   two * l3 + g2,        two * lambda + g1,
    );
    Ok(m)
}

/// `|det(L(λ) − μ) − P(λ, μ)|` relative to the size of `P`'s terms, with
/// `H` and `I2` taken from the state.
pub fn spectral_identity_residual(s: &TopState<f64>, lambda: C, mu: C) -> Result<f64> {
    let inv = super::invariants_of(s);
    let l = lax_matrix(s, lambda)?;
    let det = (l - Matrix4::identity() * mu).determinant();
    let (p, scale) = spectral_poly(inv.h, inv.i2, lambda, mu)?;
    Ok((det - p).norm() / scale.max(f64::MIN_POSITIVE))
}

/// `(z, μ) ↦ (x, u)` with `x = (μ² − 1/z)/2`,
/// `u = (μ/√2)(x² + 2Hx − 1 + I2/4)`. The input must lie on the spectral
/// curve to relative accuracy `tol`.
pub fn spectral_to_canonical(z: C, mu: C, h: f64, i2: f64, tol: f64) -> Result<(C, C)> {
    nonzero(z)?;
    let (p, scale) = spectral_poly(h, i2, z.sqrt(), mu)?;
    let r = p.norm() / scale;
    if r > tol {
        return Err(Error::OffCurve(r));
    }
    let x = (mu * mu - 1.0 / z) / 2.0;
    let u = mu / 2f64.sqrt() * (x * x + 2.0 * h * x - 1.0 + i2 / 4.0);
    Ok((x, u))
}

/// Coefficient of `dz` in `ω0 = dz / (μ z (μ² − d1(z)))`.
pub fn omega0(z: C, mu: C, h: f64) -> Result<C> {
    Ok(1.0 / (mu * z * (mu * mu - d1(z, h)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kowtop::{random_constrained_state, random_unconstrained_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f_c2(x: C, h: f64, i2: f64) -> C {
        x * (x * x + 2.0 * h * x + i2 / 4.0) * (x * x + 2.0 * h * x - 1.0 + i2 / 4.0)
    }

    fn rc(rng: &mut ChaCha8Rng) -> C {
        C::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
    }

    #[test]
    fn trace_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = random_unconstrained_state(&mut rng);
            let l = lax_matrix(&s, rc(&mut rng)).unwrap();
            assert!(l.trace().norm() < 1e-12);
        }
        assert_eq!(lax_matrix(&random_constrained_state(&mut rng), C::new(0.0, 0.0)).unwrap_err(), Error::LaxPole);
    }

    #[test]
    fn spectral_identity_on_and_off_the_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = random_constrained_state(&mut rng);
            let r = spectral_identity_residual(&s, rc(&mut rng), rc(&mut rng)).unwrap();
            assert!(r < 1e-10, "{r}");
        }
        let worst = (0..20)
            .map(|_| {
                let s = random_unconstrained_state(&mut rng);
                spectral_identity_residual(&s, rc(&mut rng), rc(&mut rng)).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-4, "{worst}");
    }

    /// Roots `μ` of the quartic at fixed `z`, from `μ² = d1 ± √(d1² − d2)`.
    fn mus(z: C, h: f64, i2: f64) -> [C; 4] {
        let (a, b) = (d1(z, h).unwrap(), d2(z, h, i2).unwrap());
        let r = (a * a - b).sqrt();
        let (p, q) = ((a + r).sqrt(), (a - r).sqrt());
        [p, -p, q, -q]
    }

    #[test]
    fn canonical_model_and_first_form() {
        let (h, i2) = (1.5, 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = rc(&mut rng);
            for mu in mus(z, h, i2) {
                let (x, u) = spectral_to_canonical(z, mu, h, i2, 1e-9).unwrap();
                let f = f_c2(x, h, i2);
                assert!((u * u - f).norm() <= 1e-9 * (1.0 + f.norm()));
                // ω0 against dx/(√2u) by a central difference along z.
                let eps = 1e-6;
                let near = |dz: C| {
                    let z2 = z + dz;
                    mus(z2, h, i2).into_iter().min_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm())).unwrap()
                };
                let dz = C::new(eps, 0.0);
                let (xp, _) = spectral_to_canonical(z + dz, near(dz), h, i2, 1e-8).unwrap();
                let (xm, _) = spectral_to_canonical(z - dz, near(-dz), h, i2, 1e-8).unwrap();
                let lhs = omega0(z, mu, h).unwrap();
                let rhs = (xp - xm) / (2.0 * eps) / (2f64.sqrt() * u);
                assert!((lhs - rhs).norm() <= 1e-4 * lhs.norm(), "{lhs} vs {rhs}");
            }
        }
        assert_eq!(spectral_to_canonical(C::new(0.0, 0.0), C::new(1.0, 0.0), h, i2, 1e-9).unwrap_err(), Error::SpectralPole);
        assert!(matches!(spectral_to_canonical(C::new(1.0, 0.0), C::new(7.0, 0.0), h, i2, 1e-9), Err(Error::OffCurve(_))));
    }
}

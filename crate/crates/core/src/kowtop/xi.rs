use num_complex::Complex64;
use serde::Serialize;

use super::{invariants_of, top_vector_field, TopState};
use crate::error::{Error, Result};
use crate::exactfield::{Dual, Field, Rational};
use crate::numverify::real::{eval_scale, to_c64};

type C = Complex64;

/// Elementary symmetric functions `(ξ1 + ξ2, ξ1·ξ2)` of the ξ-variables,
/// with `H` and `I2` read off the state. The chart coordinates are
/// `x = (l1 + i·l2)/√2`, `y = (l1 − i·l2)/√2`; with that scaling
/// `x²`, `y²`, `xy` and `(x − y)² = −2·l2²` are polynomials in `l` and the
/// pair is rational in the state.
pub fn xi_symmetric<F: Field>(s: &TopState<F>) -> Result<(F, F)> {
    let [l1, l2, _] = s.l.clone();
    let m = l2.clone() * l2.clone();
    if m.is_zero() {
        return Err(Error::XiChartSingular);
    }
    let inv = invariants_of(s);
    let h = inv.h;
    let two = F::from_i64(2);
    let half = F::from_rational(&Rational::new(1, 2));
    let c0 = F::one() - F::from_rational(&Rational::new(1, 4)) * inv.i2;
    let rho = half.clone() * (l1.clone() * l1.clone() + m.clone());
    let a = half * (l1.clone() * l1.clone() - m.clone());
    let b = l1 * l2;
    // R(x²) = re + i·im, R(y²) its conjugate.
    let re = -(a.clone() * a.clone() - b.clone() * b.clone()) + two.clone() * h.clone() * a.clone() + c0.clone();
    let im = -(two.clone() * a * b.clone()) + two.clone() * h.clone() * b;
    let q = re.clone() * re + im.clone() * im;
    let r_rho = -(rho.clone() * rho.clone()) + two.clone() * h.clone() * rho + c0;
    let sum = two.clone() * h.clone() - r_rho.clone() / m.clone();
    let mid = h - r_rho / (two * m.clone());
    let prod = mid.clone() * mid - q / (F::from_i64(4) * m.clone() * m);
    Ok((sum, prod))
}

/// ξ-chart of a float state: the pair `(ξ1, ξ2)`, `η_k` from Kowalewski's
/// equations, and the on-curve residual on C1.
#[derive(Clone, Debug, Serialize)]
pub struct XiChart {
    pub t: f64,
    pub t_tilde: f64,
    pub xi: [[f64; 2]; 2],
    pub eta: [[f64; 2]; 2],
    /// `dξ_k/dt̃`.
    pub rate: [[f64; 2]; 2],
    pub residual: f64,
    #[serde(skip)]
    pub xi_c: [C; 2],
    #[serde(skip)]
    pub eta_c: [C; 2],
    #[serde(skip)]
    pub rate_c: [C; 2],
}

/// `(ξ1, ξ2)` with `ξ1 = (S + √(S² − 4P))/2`; the velocities come from the
/// dual-number derivative of `(S, P)` along the flow, and
/// `η1 = −i(ξ1 − ξ2)·dξ1/dt̃`, `η2 = i(ξ1 − ξ2)·dξ2/dt̃`. The residual
/// `max |η_k² − f_C1(ξ_k)|` (scaled) must not exceed `tol`.
pub fn xi_variables(s: &TopState<f64>, t: f64, tol: f64) -> Result<XiChart> {
    let (sum, prod) = xi_symmetric(s)?;
    let v = top_vector_field(s);
    let lift = |a: &[f64; 3], b: &[f64; 3]| [0, 1, 2].map(|k| Dual::new(a[k], b[k]));
    let (ds, dp) = xi_symmetric(&TopState { l: lift(&s.l, &v.l), g: lift(&s.g, &v.g) })?;
    let root = C::new(sum * sum - 4.0 * prod, 0.0).sqrt();
    let xi = [(sum + root) / 2.0, (sum - root) / 2.0];
    let sqrt2 = 2f64.sqrt();
    let rate = xi.map(|x| (ds.eps * x - dp.eps) / (2.0 * x - sum) / sqrt2);
    let i = C::new(0.0, 1.0);
    let diff = xi[0] - xi[1];
    let eta = [-i * diff * rate[0], i * diff * rate[1]];
    let inv = invariants_of(s);
    let f1 = super::curve_c1(&inv.h, &inv.i2)?.f().map(|a| C::new(*a, 0.0));
    let residual = (0..2)
        .map(|k| (eta[k] * eta[k] - f1.eval(&xi[k])).norm() / eval_scale(&f1, xi[k]))
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::OffCurve(residual));
    }
    let pair = |z: [C; 2]| z.map(|w| [to_c64(w).re, to_c64(w).im]);
    Ok(XiChart {
        t,
        t_tilde: sqrt2 * t,
        xi: pair(xi),
        eta: pair(eta),
        rate: pair(rate),
        residual,
        xi_c: xi,
        eta_c: eta,
        rate_c: rate,
    })
}

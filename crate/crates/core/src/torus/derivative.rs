use super::fourier::{Direction, MEAN_TOL};
use super::matrix::HyperbolicMatrix;
use super::trig::{phase, TrigPolynomial};
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eigendirection {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalDerivative {
    pub value: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `|DR·v|∞ ≤ 2π Σ|b_p||p·v|`.
fn gradient_bound(r: &TrigPolynomial, v: [f64; 2]) -> f64 {
    r.terms().map(|(p, b)| TAU * b.norm() * (p[0] as f64 * v[0] + p[1] as f64 * v[1]).abs()).sum()
}

/// Derivative of `u_α` along `v_s` or of `u_ω` along `v_u` at `x`:
/// `−Σ_{j≥0} λ_sʲ DR(Mʲx)·v_s` and `Σ_{j≥1} λ_u^{−j} DR(M^{−j}x)·v_u`.
pub fn directional_derivative(
    m: &HyperbolicMatrix,
    r: &TrigPolynomial,
    distribution: Direction,
    along: Eigendirection,
    x: [f64; 2],
    tol: f64,
) -> Result<DirectionalDerivative> {
    let split = m.require_planar()?;
    if r.dim() != 2 {
        return Err(Error::invalid(format!("observable has dimension {}, expected 2", r.dim())));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if r.mean().norm() > MEAN_TOL {
        return Err(Error::precondition(format!("∫R dm = {} is not zero", r.mean())));
    }
    let (v, ratio, sign, first, step) = match (distribution, along) {
        (Direction::Alpha, Eigendirection::Stable) => (split.v_s, split.lambda_s, -1.0, 0i64, 1i64),
        (Direction::Omega, Eigendirection::Unstable) => (split.v_u, 1.0 / split.lambda_u, 1.0, 1, -1),
        _ => {
            return Err(Error::precondition(format!(
                "{distribution:?} differentiated along the {along:?} direction diverges; use stable for α, unstable for ω"
            )))
        }
    };
    let dr = r.directional_derivative(&v);
    let bound = gradient_bound(r, v);
    let q = ratio.abs();
    let mut value = 0.0;
    let mut weight = if first == 0 { 1.0 } else { ratio };
    let mut terms = 0;
    let mut tail = bound * weight.abs() / (1.0 - q);
    while tail >= tol && bound > 0.0 {
        let j = first + step * terms as i64;
        // DR(Mʲx) through the frequencies (Mᵀ)ʲp so the phase stays exact.
        let s: C64 = dr
            .terms()
            .map(|(p, c)| Ok(c * C64::from_polar(1.0, TAU * phase(&m.dual_power_apply(j, p)?, &x))))
            .sum::<Result<C64>>()?;
        value += sign * weight * s.re;
        weight *= ratio;
        terms += 1;
        tail = bound * weight.abs() / (1.0 - q);
    }
    Ok(DirectionalDerivative { value, terms, tail_bound: if bound > 0.0 { tail } else { 0.0 } })
}

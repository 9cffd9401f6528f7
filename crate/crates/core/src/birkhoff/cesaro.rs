use super::series::Birkhoff;
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroPrimitive {
    pub x: f64,
    /// `(u, ψ̂_u)` for `u = p, 2p, 4p, …`.
    pub sequence: Vec<(usize, C64)>,
    /// Richardson-extrapolated limit of the sequence.
    pub limit: C64,
    pub psi: C64,
    pub g: C64,
    /// `|limit − ψ(x) − G(x)|`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaEvaluation {
    pub x: f64,
    pub value: C64,
    /// `(u, −ψ̂_u)`.
    pub sequence: Vec<(usize, C64)>,
    pub residual: f64,
}

/// `ψ̂_u = Σ_{i<u} (1 − i/u) cᵢ` on dyadic multiples of `p` up to `u_max`.
fn cesaro_sequence(c: &[C64], p: usize, u_max: usize) -> Vec<(usize, C64)> {
    let mut out = Vec::new();
    let mut u = p;
    while u <= u_max {
        let s: C64 = c[..u].iter().enumerate().map(|(i, ci)| ci * (1.0 - i as f64 / u as f64)).sum();
        out.push((u, s));
        u *= 2;
    }
    out
}

impl Birkhoff<'_> {
    /// Cesàro primitive at `x` and its limit `ψ(x) + G(x)`.
    pub fn cesaro_primitive(&self, x: f64, u_max: usize) -> Result<CesaroPrimitive> {
        let p = self.block_length();
        if u_max < 4 * p {
            return Err(Error::invalid(format!("u_max must be at least {}", 4 * p)));
        }
        let (a, _) = self.system().interval();
        let gamma = PiecewiseFn::indicator(a, x);
        let psi = self.primitive(x)?.value;
        let g = self.system().g_functional(self.observable(), &gamma);
        let zero = C64::new(0.0, 0.0);
        if gamma.is_zero() {
            return Ok(CesaroPrimitive { x, sequence: vec![(p, zero)], limit: zero, psi, g, residual: 0.0 });
        }
        let c = self.correlations(&gamma, u_max)?;
        let sequence = cesaro_sequence(&c, p, u_max);
        let n = sequence.len();
        let extrapolated: Vec<C64> = sequence.windows(2).map(|w| w[1].1 * 2.0 - w[0].1).collect();
        let limit = *extrapolated.last().expect("at least three terms");
        let diffs: Vec<f64> = extrapolated.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let scale = sequence.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
        if n >= 4 {
            let (last, prev) = (diffs[diffs.len() - 1], diffs[diffs.len() - 2]);
            if last > prev && last > 1e-12 * scale.max(gamma.l1_norm() * self.observable().sup_norm()) {
                return Err(Error::numerical(format!(
                    "Cesàro primitive at x = {x} is not converging: successive differences {prev:.3e} then {last:.3e}"
                )));
            }
        }
        Ok(CesaroPrimitive { x, sequence, limit, psi, g, residual: (limit - psi - g).norm() })
    }

    /// `α(x) = −(ψ(x) + G(x))`, with the Cesàro sequence kept for auditing.
    pub fn alpha_primitive(&self, x: f64, u_max: usize) -> Result<AlphaEvaluation> {
        let c = self.cesaro_primitive(x, u_max)?;
        Ok(AlphaEvaluation {
            x,
            value: -(c.psi + c.g),
            sequence: c.sequence.iter().map(|&(u, s)| (u, -s)).collect(),
            residual: c.residual,
        })
    }

    /// `α(x+h) − α(x−h)` divided by `2h`, read off one pairing.
    pub fn alpha_slope(&self, x: f64, h: f64) -> Result<C64> {
        let (a, b) = self.system().interval();
        let (lo, hi) = ((x - h).max(a), (x + h).min(b));
        let gamma = PiecewiseFn::indicator(lo, hi);
        let tol = self.options().tol * (hi - lo);
        let d = self.pair_with_tol(&gamma, tol)?.value + self.system().g_functional(self.observable(), &gamma);
        Ok(-d / (hi - lo))
    }
}

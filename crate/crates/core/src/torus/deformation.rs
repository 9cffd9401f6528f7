use super::matrix::{HyperbolicMatrix, PlanarSplit};
use super::trig::{phase, TrigPolynomial};
use crate::error::{Error, Result};
use crate::piecewise::C64;
use crate::regularity::check_scales;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub alpha: [f64; 2],
    /// Coordinates of `alpha` along `v_s` and `v_u`.
    pub alpha_s: f64,
    pub alpha_u: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// Solves `α∘M − Mα = W` for a real trigonometric vector field `W` on `𝕋²`.
#[derive(Clone, Debug)]
pub struct DeformationField {
    m: HyperbolicMatrix,
    split: PlanarSplit,
    /// `π_s W` and `π_u W`.
    ws: TrigPolynomial,
    wu: TrigPolynomial,
    tol: f64,
}

impl DeformationField {
    pub fn new(m: &HyperbolicMatrix, w: &[TrigPolynomial; 2], tol: f64) -> Result<Self> {
        let split = *m.require_planar()?;
        if w.iter().any(|c| c.dim() != 2) {
            return Err(Error::invalid("vector field components must live on the 2-torus"));
        }
        if w.iter().any(|c| !c.is_real(1e-12)) {
            return Err(Error::invalid("vector field must be real"));
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        let (s1, u1) = split.coordinates([1.0, 0.0]);
        let (s2, u2) = split.coordinates([0.0, 1.0]);
        let combine = |a: f64, b: f64| {
            w[0].scale(C64::new(a, 0.0)).plus(&w[1].scale(C64::new(b, 0.0))).expect("dimensions agree")
        };
        Ok(DeformationField { m: m.clone(), split, ws: combine(s1, s2), wu: combine(u1, u2), tol })
    }

    fn eval_at_power(&self, p: &TrigPolynomial, k: i64, x: [f64; 2]) -> Result<f64> {
        p.terms()
            .map(|(q, c)| Ok((c * C64::from_polar(1.0, TAU * phase(&self.m.dual_power_apply(k, q)?, &x))).re))
            .sum()
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<Deformation> {
        let qs = self.split.lambda_s.abs();
        let qu = 1.0 / self.split.lambda_u.abs();
        let (bs, bu) = (self.ws.l1(), self.wu.l1());
        let (mut a_s, mut a_u) = (0.0, 0.0);
        let (mut ws, mut wu) = (1.0, 1.0 / self.split.lambda_u);
        let mut k = 0usize;
        let tail = |ws: f64, wu: f64| bs * ws.abs() / (1.0 - qs) + bu * wu.abs() / (1.0 - qu);
        while tail(ws, wu) >= self.tol && bs + bu > 0.0 {
            a_s += ws * self.eval_at_power(&self.ws, -(k as i64 + 1), x)?;
            a_u -= wu * self.eval_at_power(&self.wu, k as i64, x)?;
            ws *= self.split.lambda_s;
            wu /= self.split.lambda_u;
            k += 1;
        }
        let (vs, vu) = (self.split.v_s, self.split.v_u);
        Ok(Deformation {
            alpha: [a_s * vs[0] + a_u * vu[0], a_s * vs[1] + a_u * vu[1]],
            alpha_s: a_s,
            alpha_u: a_u,
            terms: k,
            tail_bound: if bs + bu > 0.0 { tail(ws, wu) } else { 0.0 },
        })
    }
}

/// The infinitesimal deformation `α(x)` of `M` under the field `W`.
pub fn infinitesimal_deformation(m: &HyperbolicMatrix, w: &[TrigPolynomial; 2], x: [f64; 2], tol: f64) -> Result<Deformation> {
    DeformationField::new(m, w, tol)?.eval(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondDifferenceLevel {
    pub h: f64,
    /// `max |α(x+he) + α(x−he) − 2α(x)| / h` over probes and axes.
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondDifferenceScan {
    pub levels: Vec<SecondDifferenceLevel>,
    /// The finer half of the scales stays within twice the coarser half.
    pub bounded: bool,
}

const PROBES: usize = 16;

/// Second differences of `α` over dyadic scales at a fixed set of probes.
pub fn deformation_second_differences(
    m: &HyperbolicMatrix,
    w: &[TrigPolynomial; 2],
    hs: &[f64],
    tol: f64,
) -> Result<SecondDifferenceScan> {
    check_scales(hs)?;
    let field = DeformationField::new(m, w, tol)?;
    let probes: Vec<[f64; 2]> = (1..=PROBES)
        .map(|i| [(i as f64 * 0.618_033_988_749_895).fract(), (i as f64 * 0.414_213_562_373_095).fract()])
        .collect();
    let alpha = |x: [f64; 2]| field.eval([x[0].rem_euclid(1.0), x[1].rem_euclid(1.0)]).map(|d| d.alpha);
    let levels = hs
        .iter()
        .map(|&h| {
            let mut worst = 0.0f64;
            for &x in &probes {
                let c = alpha(x)?;
                for e in [[h, 0.0], [0.0, h]] {
                    let a = alpha([x[0] + e[0], x[1] + e[1]])?;
                    let b = alpha([x[0] - e[0], x[1] - e[1]])?;
                    let d = ((a[0] + b[0] - 2.0 * c[0]).powi(2) + (a[1] + b[1] - 2.0 * c[1]).powi(2)).sqrt();
                    worst = worst.max(d / h);
                }
            }
            Ok(SecondDifferenceLevel { h, max_ratio: worst })
        })
        .collect::<Result<Vec<_>>>()?;
    let half = levels.len() / 2;
    let coarse = levels[..half.max(1)].iter().map(|l| l.max_ratio).fold(0.0, f64::max);
    let fine = levels[half..].iter().map(|l| l.max_ratio).fold(0.0, f64::max);
    Ok(SecondDifferenceScan { levels, bounded: fine <= 2.0 * coarse || fine == 0.0 })
}

use super::fourier::MEAN_TOL;
use super::matrix::HyperbolicMatrix;
use super::trig::TrigPolynomial;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};

/// `L g = g∘M⁻¹`, the transfer operator of a volume-preserving automorphism.
pub fn transfer(m: &HyperbolicMatrix, g: &TrigPolynomial) -> Result<TrigPolynomial> {
    g.map_frequencies(|k| m.dual_power_apply(-1, k))
}

/// `ρ_0, …, ρ_{j_max}` with `ρ_{j+1} = L(ρ_j + R)`. No mean condition is
/// imposed, so the charge `∫ρ_j` may drift.
pub fn evolve(m: &HyperbolicMatrix, r: &TrigPolynomial, rho0: &TrigPolynomial, j_max: usize) -> Result<Vec<TrigPolynomial>> {
    if r.dim() != m.dim() || rho0.dim() != m.dim() {
        return Err(Error::invalid(format!("densities must live on the {}-torus", m.dim())));
    }
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(rho0.clone());
    for j in 0..j_max {
        let next = transfer(m, &out[j].plus(r)?)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvectionStep {
    pub j: usize,
    pub q: C64,
    /// `Q_j(1) = ∫ρ_j`.
    pub charge: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvectionReport {
    pub steps: Vec<AdvectionStep>,
    /// First `j` after which `Q_j(φ)` provably no longer changes.
    pub stabilized_from: Option<usize>,
    /// `lim Q_j(φ)`, which for `ρ_0 = 0` is `u_ω(φ)`.
    pub limit: Option<C64>,
}

/// Smallest `j ≥ 1` from which every `(M⁻ᵀ)^i p`, `i ≥ j`, is longer than
/// `radius`, for all nonzero `p` in `supports`.
fn escape_index(m: &HyperbolicMatrix, supports: &[&TrigPolynomial], radius: f64) -> Option<usize> {
    let split = m.transpose().planar().copied()?;
    let growth = 1.0 / split.lambda_s.abs();
    let mut worst = 1usize;
    for p in supports.iter().flat_map(|t| t.terms().map(|(k, _)| k)) {
        if p.iter().all(|&v| v == 0) {
            continue;
        }
        let (a_s, _) = split.coordinates([p[0] as f64, p[1] as f64]);
        let floor = a_s.abs() * split.sin_angle() * (1.0 - 1e-9);
        if !(floor > 0.0) {
            return None;
        }
        // floor·growthʲ > radius.
        let j = ((radius / floor).ln() / growth.ln()).floor() + 1.0;
        worst = worst.max(j.max(1.0) as usize);
    }
    Some(worst)
}

/// Evolves `ρ` under `ρ_{j+1} = L(ρ_j + R)` and records `Q_j(φ) = ∫φρ_j`.
pub fn advect(
    m: &HyperbolicMatrix,
    r: &TrigPolynomial,
    rho0: &TrigPolynomial,
    phi: &TrigPolynomial,
    j_max: usize,
) -> Result<AdvectionReport> {
    if r.mean().norm() > MEAN_TOL {
        return Err(Error::precondition(format!("∫R dm = {} is not zero, so charge is not conserved", r.mean())));
    }
    if phi.dim() != m.dim() {
        return Err(Error::invalid(format!("test function must live on the {}-torus", m.dim())));
    }
    let escape = escape_index(m, &[r, rho0], phi.max_frequency_norm());
    let horizon = escape.map_or(j_max, |e| j_max.max(e));
    let rhos = evolve(m, r, rho0, horizon)?;
    let q = |j: usize| rhos[j].integral_product(phi);
    let steps = (0..=j_max).map(|j| AdvectionStep { j, q: q(j), charge: rhos[j].mean() }).collect();
    let stabilized_from = escape.map(|e| e - 1);
    Ok(AdvectionReport { steps, stabilized_from, limit: stabilized_from.map(q) })
}

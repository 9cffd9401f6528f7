use super::besov::{block_weight, DyadicBlockProfile};
use super::fourier::FourierSystem;
use super::trig::{freq_norm, TrigPolynomial};
use crate::error::{Error, Result};
use crate::piecewise::C64;
use crate::stats::linear_fit;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DecayVerdict {
    /// `c_j = 0` exactly for `from ≤ j ≤ j_max`.
    EventuallyZero { from: usize },
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `c_j = ∫R(fʲx)φ(x) dm` for `j = 0..=j_max`.
    pub correlations: Vec<C64>,
    pub verdict: DecayVerdict,
    /// `|c_j| ≤ C₁e^{−C₂j}` on the window; `c2` is absent when fewer than two
    /// correlations are nonzero and any rate fits.
    pub c1: f64,
    pub c2: Option<f64>,
    /// Largest number of `j` whose frequency of `R∘fʲ` meets one block support.
    pub block_multiplicity: usize,
    /// `C₃ = L·Σ|b_p|`, so that `sup|u_ℓ| ≤ C₃ ≤ C₃(1+ℓ)`.
    pub c3: f64,
    pub block_check: Option<bool>,
}

/// Correlations of `R∘fʲ` against `φ` by exact frequency pairing, an
/// exponential envelope, and the block bound they imply.
pub fn correlation_decay_fit(
    sys: &FourierSystem,
    r: &TrigPolynomial,
    phi: &TrigPolynomial,
    j_max: usize,
    profile: Option<&DyadicBlockProfile>,
) -> Result<DecayFit> {
    if r.dim() != sys.dim() || phi.dim() != sys.dim() {
        return Err(Error::invalid(format!("observables must have dimension {}", sys.dim())));
    }
    let mut correlations = Vec::with_capacity(j_max + 1);
    let mut norms: Vec<Vec<f64>> = vec![Vec::new(); r.len()];
    for j in 0..=j_max {
        let rj = sys.compose(r, j as i64)?;
        correlations.push(rj.integral_product(phi));
        for ((p, _), ns) in r.terms().zip(norms.iter_mut()) {
            ns.push(TAU * freq_norm(&sys.dual_power(j as i64, p)?));
        }
    }
    let nonzero: Vec<(f64, f64)> = correlations
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j as f64, c.norm().ln()))
        .collect();
    let from = correlations.iter().rposition(|c| c.norm() > 0.0).map_or(0, |i| i + 1);
    let c2 = (nonzero.len() >= 2).then(|| -linear_fit(&nonzero).0);
    let c1 = nonzero.iter().map(|&(j, l)| (l + c2.unwrap_or(0.0) * j).exp()).fold(0.0, f64::max);
    let verdict = if from <= j_max {
        DecayVerdict::EventuallyZero { from }
    } else {
        match c2 {
            Some(rate) if rate > 0.0 => DecayVerdict::Exponential,
            _ => {
                return Err(Error::numerical(format!(
                    "no decay detected over j ≤ {j_max}: fitted rate {:?}",
                    c2.map(|r| -r)
                )))
            }
        }
    };
    let top = norms.iter().flatten().fold(1.0f64, |m, &n| m.max(n));
    let levels = top.log2().ceil() as u32 + 2;
    let block_multiplicity = (0..=levels)
        .map(|l| norms.iter().map(|ns| ns.iter().filter(|&&n| block_weight(l, n) != 0.0).count()).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let c3 = block_multiplicity as f64 * r.l1();
    let block_check = profile.map(|p| p.blocks.iter().all(|b| b.sup <= c3 * (1.0 + b.level as f64) * (1.0 + 1e-9)));
    Ok(DecayFit { correlations, verdict, c1, c2, block_multiplicity, c3, block_check })
}

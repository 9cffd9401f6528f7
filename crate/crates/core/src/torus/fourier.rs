use super::matrix::{Freq, HyperbolicMatrix};
use super::trig::TrigPolynomial;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Coefficient of a mean below this counts as zero.
pub const MEAN_TOL: f64 = 1e-12;

/// A map acting on frequencies: a toral automorphism, or `x ↦ kx` on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FourierSystem {
    Toral { matrix: HyperbolicMatrix },
    Circle { multiplier: u32 },
}

impl FourierSystem {
    pub fn cat() -> Self {
        FourierSystem::Toral { matrix: HyperbolicMatrix::cat() }
    }

    pub fn circle(multiplier: u32) -> Result<Self> {
        if multiplier < 2 {
            return Err(Error::invalid(format!("circle multiplier must be at least 2, got {multiplier}")));
        }
        Ok(FourierSystem::Circle { multiplier })
    }

    pub fn dim(&self) -> usize {
        match self {
            FourierSystem::Toral { matrix } => matrix.dim(),
            FourierSystem::Circle { .. } => 1,
        }
    }

    pub fn invertible(&self) -> bool {
        matches!(self, FourierSystem::Toral { .. })
    }

    /// Frequency of `e^{2πi p·x}∘fʲ`.
    pub fn dual_power(&self, j: i64, p: &[i128]) -> Result<Freq> {
        match self {
            FourierSystem::Toral { matrix } => matrix.dual_power_apply(j, p),
            FourierSystem::Circle { multiplier } => {
                if j < 0 {
                    return Err(Error::unsupported("the circle map is not invertible"));
                }
                let m = (*multiplier as i128)
                    .checked_pow(j as u32)
                    .and_then(|m| m.checked_mul(p[0]))
                    .ok_or_else(|| Error::numerical("integer frequency overflowed i128"))?;
                Ok(vec![m])
            }
        }
    }

    /// `φ∘fʲ`.
    pub fn compose(&self, phi: &TrigPolynomial, j: i64) -> Result<TrigPolynomial> {
        phi.map_frequencies(|k| self.dual_power(j, k))
    }

    /// Lower bound on `|(Mᵀ)ʲ p|` for all `j ≥ j0` (`forward`) or all
    /// `j ≤ −j0`; `None` where no bound is available.
    fn orbit_norm_floor(&self, p: &[i128], j0: i64, forward: bool) -> Option<f64> {
        match self {
            FourierSystem::Circle { multiplier } => {
                forward.then(|| (*multiplier as f64).powi(j0 as i32) * (p[0] as f64).abs())
            }
            FourierSystem::Toral { matrix } => {
                let t = matrix.transpose();
                let split = t.planar()?;
                let (a_s, a_u) = split.coordinates([p[0] as f64, p[1] as f64]);
                let (coef, growth) = if forward {
                    (a_u.abs(), split.lambda_u.abs())
                } else {
                    (a_s.abs(), 1.0 / split.lambda_s.abs())
                };
                Some(coef * growth.powi(j0 as i32) * split.sin_angle())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `u_α = −Σ_{j≥0} R∘fʲ`.
    Alpha,
    /// `u_ω = Σ_{j≥1} R∘f^{−j}`.
    Omega,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub direction: Direction,
    pub j_max: usize,
    /// `Σ|b_p|` of the source observable.
    pub observable_l1: f64,
    /// Every frequency with `|2πk| ≤ 2^{ℓ+1}` of the untruncated series is
    /// present for `ℓ` up to this level.
    pub coverage_level: Option<i32>,
}

/// `Σ_k c_k e^{2πi k·x}` with distinct frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseFourierDistribution {
    pub dim: usize,
    pub terms: Vec<(Freq, C64)>,
    pub provenance: Provenance,
}

impl SparseFourierDistribution {
    pub fn as_trig(&self) -> TrigPolynomial {
        TrigPolynomial::from_terms(self.dim, self.terms.iter().cloned()).expect("dimensions agree")
    }

    /// `u(φ) = Σ_k c_k ∫e^{2πi k·x} φ(x) dx`.
    pub fn pair(&self, phi: &TrigPolynomial) -> C64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let neg: Freq = k.iter().map(|v| -v).collect();
                c * phi.coefficient(&neg)
            })
            .sum()
    }
}

/// The Birkhoff sum of `R` in the given time direction, as a sparse Fourier
/// series truncated at `j_max`.
pub fn birkhoff_fourier(
    sys: &FourierSystem,
    r: &TrigPolynomial,
    direction: Direction,
    j_max: usize,
) -> Result<SparseFourierDistribution> {
    if r.dim() != sys.dim() {
        return Err(Error::invalid(format!("observable has dimension {}, system {}", r.dim(), sys.dim())));
    }
    if r.mean().norm() > MEAN_TOL {
        return Err(Error::precondition(format!("∫R dm = {} is not zero", r.mean())));
    }
    if direction == Direction::Omega && !sys.invertible() {
        return Err(Error::unsupported("u_ω needs an invertible map; only u_α is available on the circle"));
    }
    let (js, sign): (Vec<i64>, f64) = match direction {
        Direction::Alpha => ((0..=j_max as i64).collect(), -1.0),
        Direction::Omega => ((1..=j_max as i64).map(|j| -j).collect(), 1.0),
    };
    let mut acc = TrigPolynomial::zero(r.dim());
    for (p, b) in r.terms() {
        for &j in &js {
            acc.add_term(sys.dual_power(j, p)?, b * sign);
        }
    }
    let forward = direction == Direction::Alpha;
    let coverage = r
        .terms()
        .map(|(p, _)| {
            let floor = sys.orbit_norm_floor(p, j_max as i64 + 1, forward)?;
            let bound = TAU * floor * (1.0 - 1e-9);
            if !(bound > 0.0) {
                return Some(i32::MIN);
            }
            // Largest ℓ with 2^{ℓ+1} < bound.
            let l = bound.log2().ceil() as i32 - 2;
            Some(l.min(i32::MAX - 2))
        })
        .try_fold(i32::MAX, |m, l| l.map(|l| m.min(l)));
    Ok(SparseFourierDistribution {
        dim: r.dim(),
        terms: acc.terms().map(|(k, c)| (k.clone(), *c)).collect(),
        provenance: Provenance { direction, j_max, observable_l1: r.l1(), coverage_level: coverage },
    })
}

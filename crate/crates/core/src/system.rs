use crate::dynamics::{PiecewiseMap, PiecewiseObservable};
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use crate::transfer::{
    ergodic_structure, lasota_yorke_fit, ErgodicStructure, LasotaYorke, SpectralDecomposition, SpectralOptions,
    UlamDiscretization,
};

/// Default tolerance on `|∫φρ_ℓ dm|` for the orthogonality precondition.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A map together with everything the Birkhoff and variance code needs from
/// its transfer operator.
#[derive(Clone, Debug)]
pub struct IntervalSystem {
    map: PiecewiseMap,
    decomposition: SpectralDecomposition,
    ergodic: ErgodicStructure,
    lasota_yorke: LasotaYorke,
    options: SpectralOptions,
}

impl IntervalSystem {
    pub fn build(map: PiecewiseMap, options: &SpectralOptions) -> Result<Self> {
        let ulam = UlamDiscretization::new(&map, options.bins)?;
        let decomposition = SpectralDecomposition::compute(ulam, options)?;
        let ergodic = ergodic_structure(&decomposition, options.support_floor)?;
        let lasota_yorke = lasota_yorke_fit(&map, Some(decomposition.ulam()), 8)?;
        let rate = decomposition.tail().rate.max(lasota_yorke.per_step);
        if rate >= 1.0 {
            return Err(Error::numerical(format!("tail rate {rate} is not below 1; the decomposition is unusable")));
        }
        Ok(IntervalSystem { map, decomposition, ergodic, lasota_yorke, options: options.clone() })
    }

    pub fn map(&self) -> &PiecewiseMap {
        &self.map
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn ulam(&self) -> &UlamDiscretization {
        self.decomposition.ulam()
    }

    pub fn ergodic(&self) -> &ErgodicStructure {
        &self.ergodic
    }

    pub fn lasota_yorke(&self) -> &LasotaYorke {
        &self.lasota_yorke
    }

    pub fn options(&self) -> &SpectralOptions {
        &self.options
    }

    pub fn period(&self) -> usize {
        self.decomposition.period()
    }

    pub fn interval(&self) -> (f64, f64) {
        self.map.interval()
    }

    /// `∫φρ_ℓ dm` for every component.
    pub fn component_means(&self, phi: &PiecewiseFn) -> Vec<C64> {
        (0..self.ergodic.count()).map(|l| phi.inner(&self.ergodic.density_fn(l))).collect()
    }

    /// Fails unless `∫φρ_ℓ dm` vanishes for every component, which is the same
    /// as `∫φ·Φ₁γ dm = 0` for every `γ`.
    pub fn check_orthogonal(&self, phi: &PiecewiseFn, tol: f64) -> Result<()> {
        let means = self.component_means(phi);
        let bad: Vec<String> = means
            .iter()
            .enumerate()
            .filter(|(_, m)| m.norm() > tol)
            .map(|(l, m)| format!("∫φρ_{} dm = {:.3e}", l + 1, m.re))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "observable is not orthogonal to the invariant densities: {}",
                bad.join(", ")
            )))
        }
    }

    /// `φ − Σ_ℓ (∫φρ_ℓ) 1_{S_ℓ}`.
    pub fn center(&self, phi: &PiecewiseFn) -> PiecewiseFn {
        let mut out = phi.clone();
        for (l, m) in self.component_means(phi).into_iter().enumerate() {
            for &(lo, hi) in &self.ergodic.components[l].support {
                out = out.sub(&PiecewiseFn::constant(lo, hi, m));
            }
        }
        out
    }

    pub fn center_observable(&self, phi: &PiecewiseObservable) -> PiecewiseFn {
        self.center(phi.function())
    }

    /// `∫_{B_i} φ dm / |B_i|` for every Ulam bin.
    pub fn bin_averages(&self, phi: &PiecewiseFn) -> Vec<C64> {
        self.ulam().project(phi)
    }

    /// `Σ_{λ≠1} (1−λ)⁻¹ ∫φ·Φ_λγ dm`.
    pub fn g_functional(&self, phi: &PiecewiseFn, gamma: &PiecewiseFn) -> C64 {
        let u = self.ulam();
        let pg = u.project(gamma);
        let pphi = u.project(phi);
        self.decomposition
            .projectors()
            .iter()
            .filter(|p| !p.eigenvalue.is_one())
            .map(|p| u.pair(&pphi, &p.apply(&pg)) / (C64::new(1.0, 0.0) - p.lambda()))
            .sum()
    }

    /// `∫φ·Φ_λγ dm` for every `λ ≠ 1`, paired with `λ`.
    pub fn peripheral_pairings(&self, phi: &PiecewiseFn, gamma: &PiecewiseFn) -> Vec<(C64, C64)> {
        let u = self.ulam();
        let pg = u.project(gamma);
        let pphi = u.project(phi);
        self.decomposition
            .projectors()
            .iter()
            .filter(|p| !p.eigenvalue.is_one())
            .map(|p| (p.lambda(), u.pair(&pphi, &p.apply(&pg))))
            .collect()
    }

    /// `(C, r)` with `‖Kⁿ‖ ≤ C rⁿ`. On Markov maps the Ulam matrix makes the
    /// discrete tail nilpotent, so the fitted rate is floored at the
    /// Lasota–Yorke contraction and `C` is raised to cover every observed norm.
    pub fn tail_envelope(&self) -> (f64, f64) {
        let t = self.decomposition.tail();
        let r = t.rate.max(self.lasota_yorke.per_step);
        let c = t
            .norms
            .iter()
            .enumerate()
            .map(|(n, v)| v / r.powi(n as i32))
            .fold(t.constant.max(1.0), f64::max);
        (c, r)
    }

    /// `Σ_{j≥n} ‖Kʲ‖` from the tail envelope.
    pub fn tail_sum_from(&self, n: usize) -> f64 {
        let (c, r) = self.tail_envelope();
        c * r.powi(n as i32) / (1.0 - r)
    }
}

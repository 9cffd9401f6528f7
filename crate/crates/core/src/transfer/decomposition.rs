use super::projector::{measure_residuals, tail_apply, ProjectorResiduals, SpectralProjector};
use super::spectrum::{peripheral_spectrum, PeripheralSpectrum};
use super::tail::{estimate_tail, TailEstimate};
use super::ulam::UlamDiscretization;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralOptions {
    pub bins: usize,
    pub gap_tol: f64,
    pub n_avg: usize,
    pub support_floor: f64,
    /// Largest tolerated projector-algebra residual.
    pub residual_tol: f64,
    pub tail_steps: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            bins: 1024,
            gap_tol: 0.05,
            n_avg: 64,
            support_floor: 1e-6,
            residual_tol: 1e-8,
            tail_steps: 48,
        }
    }
}

/// `L = Σ λΦ_λ + K` on the Ulam bin space.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    ulam: UlamDiscretization,
    spectrum: PeripheralSpectrum,
    projectors: Vec<SpectralProjector>,
    tail: TailEstimate,
    residuals: ProjectorResiduals,
}

impl SpectralDecomposition {
    pub fn compute(ulam: UlamDiscretization, opts: &SpectralOptions) -> Result<Self> {
        let spectrum = peripheral_spectrum(&ulam, opts.gap_tol)?;
        Self::with_spectrum(ulam, spectrum, opts)
    }

    pub fn with_spectrum(ulam: UlamDiscretization, spectrum: PeripheralSpectrum, opts: &SpectralOptions) -> Result<Self> {
        if opts.n_avg == 0 {
            return Err(Error::invalid("n_avg must be positive"));
        }
        let window = opts.n_avg * spectrum.period;
        let projectors = spectrum
            .eigenvalues
            .iter()
            .map(|ev| SpectralProjector::compute(&ulam, ev, window))
            .collect::<Result<Vec<_>>>()?;
        let residuals = measure_residuals(&ulam, &spectrum, &projectors)?;
        if residuals.max() > opts.residual_tol {
            return Err(Error::numerical(format!(
                "projector residual {:e} exceeds {:e}; increase n_avg or the bin count",
                residuals.max(),
                opts.residual_tol
            )));
        }
        let tail = estimate_tail(&ulam, &projectors, opts.tail_steps);
        Ok(SpectralDecomposition { ulam, spectrum, projectors, tail, residuals })
    }

    pub fn ulam(&self) -> &UlamDiscretization {
        &self.ulam
    }

    pub fn spectrum(&self) -> &PeripheralSpectrum {
        &self.spectrum
    }

    pub fn period(&self) -> usize {
        self.spectrum.period
    }

    pub fn projectors(&self) -> &[SpectralProjector] {
        &self.projectors
    }

    pub fn projector_one(&self) -> &SpectralProjector {
        self.projectors.iter().find(|p| p.eigenvalue.is_one()).expect("1 is always peripheral")
    }

    pub fn tail(&self) -> &TailEstimate {
        &self.tail
    }

    pub fn residuals(&self) -> &ProjectorResiduals {
        &self.residuals
    }

    /// `Kx = Lx − Σ λΦ_λx`.
    pub fn apply_tail(&self, x: &[C64]) -> Vec<C64> {
        tail_apply(&self.ulam, &self.projectors, x)
    }
}

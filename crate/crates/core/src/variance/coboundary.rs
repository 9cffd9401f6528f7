use super::green_kubo::{sigma2_m, VarianceOptions};
use crate::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseFn;
use crate::system::IntervalSystem;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoboundaryOptions {
    /// `σ²_m` below this counts as zero.
    pub threshold: f64,
    /// Half-width of the divided difference of `α`.
    pub step: f64,
    pub grid: usize,
    pub residual_tol: f64,
    pub variance: VarianceOptions,
}

impl Default for CoboundaryOptions {
    fn default() -> Self {
        CoboundaryOptions {
            threshold: 1e-6,
            step: (-16f64).exp2(),
            grid: 256,
            residual_tol: 1e-4,
            variance: VarianceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CoboundaryVerdict {
    Coboundary { residual: f64 },
    NotCoboundary { sigma2: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoboundaryReport {
    pub verdict: CoboundaryVerdict,
    pub sigma2_m: f64,
    /// Grid and recovered transfer function `g`, empty unless a coboundary.
    pub grid: Vec<f64>,
    pub g: Vec<f64>,
}

impl CoboundaryReport {
    pub fn is_coboundary(&self) -> bool {
        matches!(self.verdict, CoboundaryVerdict::Coboundary { .. })
    }
}

/// Decides whether `φ = g∘f − g` and, if so, recovers `g = Dα` on a grid.
pub fn coboundary_solve(sys: &IntervalSystem, phi: &PiecewiseFn, opts: &CoboundaryOptions) -> Result<CoboundaryReport> {
    let sigma2 = sigma2_m(sys, phi, &opts.variance)?.total();
    if sigma2 >= opts.threshold {
        return Ok(CoboundaryReport {
            verdict: CoboundaryVerdict::NotCoboundary { sigma2 },
            sigma2_m: sigma2,
            grid: Vec::new(),
            g: Vec::new(),
        });
    }
    let bopts = BirkhoffOptions {
        route: opts.variance.route.clone(),
        orthogonality_tol: opts.variance.orthogonality_tol,
        ..Default::default()
    };
    let b = Birkhoff::new(sys, phi, &RouteRegistry::default(), &bopts)?;
    let (a, hi) = sys.interval();
    let n = opts.grid.max(2);
    let grid: Vec<f64> = (0..n).map(|j| a + (hi - a) * (j as f64 + 0.5) / n as f64).collect();
    let g_at = |x: f64| b.alpha_slope(x, opts.step).map(|z| z.re);
    let pairs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&x| Ok((g_at(x)?, g_at(sys.map().eval(x))?)))
        .collect::<Result<_>>()?;
    let mean_sq: f64 = grid
        .iter()
        .zip(&pairs)
        .map(|(&x, &(gx, gfx))| (phi.eval(x).re - (gfx - gx)).powi(2))
        .sum::<f64>()
        / n as f64;
    let residual = (mean_sq * (hi - a)).sqrt();
    if residual > opts.residual_tol {
        return Err(Error::numerical(format!(
            "σ²_m = {sigma2:.3e} is below the threshold but ‖φ − (g∘f − g)‖ = {residual:.3e}; refine the grid or the step"
        )));
    }
    Ok(CoboundaryReport {
        verdict: CoboundaryVerdict::Coboundary { residual },
        sigma2_m: sigma2,
        grid,
        g: pairs.into_iter().map(|p| p.0).collect(),
    })
}

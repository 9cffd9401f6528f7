use super::spectrum::{PeripheralEigenvalue, PeripheralSpectrum};
use super::ulam::UlamDiscretization;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const PROJECTOR_SEED: u64 = 0x5eed_0002;
const MAX_WINDOWS: usize = 4000;

pub(crate) fn sup(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn random_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect()
}

/// `λ⁻¹Pᵀ` (forward) or its adjoint `λP` applied once.
fn step(ulam: &UlamDiscretization, lambda: C64, adjoint: bool, x: &[C64]) -> Vec<C64> {
    if adjoint {
        ulam.pull_back(x).into_iter().map(|z| z * lambda).collect()
    } else {
        let inv = lambda.inv();
        ulam.push_forward(x).into_iter().map(|z| z * inv).collect()
    }
}

/// Windowed Cesàro average `(1/w) Σ_{i<w} λ^{-(M+i)} L^{M+i} x` with the
/// start `M` pushed forward until successive windows agree.
pub(crate) fn cesaro_block(
    ulam: &UlamDiscretization,
    lambda: C64,
    window: usize,
    adjoint: bool,
    block: &[Vec<C64>],
) -> Result<(Vec<Vec<C64>>, usize)> {
    let mut ys: Vec<Vec<C64>> = block
        .iter()
        .map(|x| {
            let mut acc = x.clone();
            let mut cur = x.clone();
            for _ in 1..window {
                cur = step(ulam, lambda, adjoint, &cur);
                for (a, c) in acc.iter_mut().zip(&cur) {
                    *a += c;
                }
            }
            acc.into_iter().map(|z| z / window as f64).collect()
        })
        .collect();
    let scale = ys.iter().map(|y| sup(y)).fold(0.0, f64::max).max(1e-300);
    let mut start = 0;
    let mut prev_diff = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..MAX_WINDOWS {
        let next: Vec<Vec<C64>> = ys
            .iter()
            .map(|y| {
                let mut cur = y.clone();
                for _ in 0..window {
                    cur = step(ulam, lambda, adjoint, &cur);
                }
                cur
            })
            .collect();
        start += window;
        let diff = ys
            .iter()
            .zip(&next)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            / scale;
        ys = next;
        if diff < 1e-14 {
            return Ok((ys, start));
        }
        if diff > 0.5 * prev_diff {
            stalls += 1;
        } else {
            stalls = 0;
        }
        if stalls >= 8 && diff < 1e-10 {
            return Ok((ys, start));
        }
        prev_diff = diff;
    }
    Err(Error::numerical(format!(
        "Cesàro average for λ = {lambda} did not settle after {MAX_WINDOWS} windows (last change {prev_diff:e})"
    )))
}

/// Orthonormal basis of the column span by pivoted Gram–Schmidt with one
/// reorthogonalization pass. Columns below `tol` times the largest initial
/// norm are treated as numerically dependent.
fn orthonormal_range(cols: &[Vec<C64>], tol: f64) -> DMatrix<C64> {
    let n = cols[0].len();
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut rest: Vec<Vec<C64>> = cols.to_vec();
    let top = rest.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    while !rest.is_empty() {
        let (k, best) = rest
            .iter()
            .enumerate()
            .map(|(k, c)| (k, norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if best <= tol * top || best == 0.0 {
            break;
        }
        let mut q = rest.swap_remove(k);
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&q).map(|(u, v)| u.conj() * v).sum();
                for (x, u) in q.iter_mut().zip(b) {
                    *x -= c * u;
                }
            }
        }
        let qn = norm(&q);
        for x in q.iter_mut() {
            *x /= qn;
        }
        for r in rest.iter_mut() {
            for _ in 0..2 {
                let c: C64 = q.iter().zip(r.iter()).map(|(u, v)| u.conj() * v).sum();
                for (x, u) in r.iter_mut().zip(&q) {
                    *x -= c * u;
                }
            }
        }
        basis.push(q);
    }
    DMatrix::<C64>::from_fn(n, basis.len(), |i, j| basis[j][i])
}

/// Finite-rank peripheral projector `Φ_λ = V (WᴴV)⁻¹ Wᴴ`.
#[derive(Clone, Debug)]
pub struct SpectralProjector {
    pub eigenvalue: PeripheralEigenvalue,
    left: DMatrix<C64>,
    right: DMatrix<C64>,
    /// Start of the converged Cesàro window.
    pub start: usize,
    pub window: usize,
}

impl SpectralProjector {
    pub fn lambda(&self) -> C64 {
        self.eigenvalue.value
    }

    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let xv = nalgebra::DVector::from_column_slice(x);
        let coeffs = &self.right * xv;
        (&self.left * coeffs).iter().copied().collect()
    }

    /// `Φ_λᵀ` acting on observables, so that `∫φ·Φγ = ∫(Φᵀφ)·γ`.
    pub fn apply_transpose(&self, phi: &[C64]) -> Vec<C64> {
        let pv = nalgebra::DVector::from_column_slice(phi);
        let coeffs = self.left.transpose() * pv;
        (self.right.transpose() * coeffs).iter().copied().collect()
    }

    pub(crate) fn compute(
        ulam: &UlamDiscretization,
        eigenvalue: &PeripheralEigenvalue,
        window: usize,
    ) -> Result<Self> {
        let n = ulam.bin_count();
        let lambda = eigenvalue.value;
        let probes = random_vectors(n, eigenvalue.multiplicity + 3, PROJECTOR_SEED ^ eigenvalue.order as u64);
        let (range, start_r) = cesaro_block(ulam, lambda, window, false, &probes)?;
        let (corange, start_c) = cesaro_block(ulam, lambda, window, true, &probes)?;
        let v = orthonormal_range(&range, 1e-8);
        let w = orthonormal_range(&corange, 1e-8);
        if v.ncols() != w.ncols() || v.ncols() == 0 {
            return Err(Error::numerical(format!(
                "projector for λ = {lambda}: range rank {} and corange rank {} disagree",
                v.ncols(),
                w.ncols()
            )));
        }
        let wh = w.adjoint();
        let gram = &wh * &v;
        let inv = gram
            .try_inverse()
            .ok_or_else(|| Error::numerical(format!("projector for λ = {lambda}: singular pairing")))?;
        Ok(SpectralProjector {
            eigenvalue: eigenvalue.clone(),
            left: v,
            right: inv * wh,
            start: start_r.max(start_c),
            window,
        })
    }
}

/// Residuals of the projector algebra, relative sup norms over random probes.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProjectorResiduals {
    /// `‖C(Cx) − Cx‖` for the windowed Cesàro operator `C` itself.
    pub cesaro_idempotence: f64,
    /// `‖Φ²x − Φx‖`.
    pub idempotence: f64,
    /// `‖LΦx − λΦx‖` and `‖ΦLx − λΦx‖`.
    pub eigen_relation: f64,
    /// `‖Φ_λΦ_μ x‖`, λ ≠ μ.
    pub orthogonality: f64,
    /// `‖KΦx‖` and `‖ΦKx‖`.
    pub tail_annihilation: f64,
}

impl ProjectorResiduals {
    pub fn max(&self) -> f64 {
        [self.cesaro_idempotence, self.idempotence, self.eigen_relation, self.orthogonality, self.tail_annihilation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub(crate) fn tail_apply(ulam: &UlamDiscretization, projectors: &[SpectralProjector], x: &[C64]) -> Vec<C64> {
    let mut y = ulam.push_forward(x);
    for p in projectors {
        let px = p.apply(x);
        for (a, b) in y.iter_mut().zip(px) {
            *a -= b * p.lambda();
        }
    }
    y
}

pub(crate) fn measure_residuals(
    ulam: &UlamDiscretization,
    spectrum: &PeripheralSpectrum,
    projectors: &[SpectralProjector],
) -> Result<ProjectorResiduals> {
    let n = ulam.bin_count();
    let probes = random_vectors(n, 3, PROJECTOR_SEED ^ 0xabc);
    let mut r = ProjectorResiduals::default();
    let diff = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    for x in &probes {
        let sx = sup(x);
        for p in projectors {
            let px = p.apply(x);
            let ppx = p.apply(&px);
            r.idempotence = r.idempotence.max(diff(&ppx, &px) / sx);
            let lpx = ulam.push_forward(&px);
            let lam_px: Vec<C64> = px.iter().map(|z| z * p.lambda()).collect();
            r.eigen_relation = r.eigen_relation.max(diff(&lpx, &lam_px) / sx);
            let plx = p.apply(&ulam.push_forward(x));
            r.eigen_relation = r.eigen_relation.max(diff(&plx, &lam_px) / sx);
            for q in projectors {
                if q.eigenvalue.order != p.eigenvalue.order || q.eigenvalue.k != p.eigenvalue.k {
                    r.orthogonality = r.orthogonality.max(sup(&q.apply(&px)) / sx);
                }
            }
            r.tail_annihilation = r.tail_annihilation.max(sup(&tail_apply(ulam, projectors, &px)) / sx);
            let kx = tail_apply(ulam, projectors, x);
            r.tail_annihilation = r.tail_annihilation.max(sup(&p.apply(&kx)) / sx);
        }
    }
    // The Cesàro operator itself, on one probe per eigenvalue.
    for (p, ev) in projectors.iter().zip(&spectrum.eigenvalues) {
        let x = &probes[0];
        let (cx, _) = cesaro_block(ulam, ev.value, p.window, false, std::slice::from_ref(x))?;
        let (ccx, _) = cesaro_block(ulam, ev.value, p.window, false, &cx)?;
        r.cesaro_idempotence = r.cesaro_idempotence.max(diff(&ccx[0], &cx[0]) / sup(x));
    }
    Ok(r)
}

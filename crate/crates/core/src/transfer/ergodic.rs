use super::decomposition::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use serde::{Deserialize, Serialize};

/// One ergodic absolutely continuous invariant measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErgodicComponent {
    /// Bin values of `ρ_ℓ`, normalized to `∫ρ_ℓ dm = 1`.
    pub density: Vec<f64>,
    /// Support as closed intervals.
    pub support: Vec<(f64, f64)>,
    pub support_bins: Vec<bool>,
    /// `m(A_ℓ)`.
    pub basin_mass: f64,
}

/// Unimodular `s_{λ,ℓ}` with `λ·s∘f = s` on `S_ℓ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeripheralEigenfunction {
    pub lambda: C64,
    pub component: usize,
    pub values: Vec<C64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErgodicStructure {
    pub components: Vec<ErgodicComponent>,
    /// `Φ₁(1)`, the density of the limit of the Cesàro averages of Lebesgue.
    pub invariant_density: Vec<f64>,
    pub eigenfunctions: Vec<PeripheralEigenfunction>,
    pub support_floor: f64,
    bin_edges: Vec<f64>,
}

impl ErgodicStructure {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn basin_masses(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.basin_mass).collect()
    }

    /// `ρ_ℓ` as a bin-constant function.
    pub fn density_fn(&self, l: usize) -> PiecewiseFn {
        lift_real(&self.bin_edges, &self.components[l].density)
    }

    pub fn invariant_density_fn(&self) -> PiecewiseFn {
        lift_real(&self.bin_edges, &self.invariant_density)
    }

    pub fn eigenfunction(&self, lambda: C64, l: usize) -> Option<&PeripheralEigenfunction> {
        self.eigenfunctions
            .iter()
            .find(|e| e.component == l && (e.lambda - lambda).norm() < 1e-9)
    }

    /// Component whose closed support contains `x` (bin test).
    pub fn component_of(&self, x: f64) -> Option<usize> {
        let n = self.bin_edges.len() - 1;
        let (a, b) = (self.bin_edges[0], self.bin_edges[n]);
        let t = (x - a) / (b - a) * n as f64;
        let candidates = [t.floor() as isize - 1, t.floor() as isize, t.ceil() as isize - 1];
        self.components.iter().position(|c| {
            candidates
                .iter()
                .filter(|&&i| i >= 0 && (i as usize) < n)
                .any(|&i| c.support_bins[i as usize])
        })
    }

    /// Inverse CDF of `ρ_ℓ`, for sampling from `μ_ℓ`.
    pub fn quantile(&self, l: usize, u: f64) -> f64 {
        let d = &self.components[l].density;
        let n = d.len();
        let w = (self.bin_edges[n] - self.bin_edges[0]) / n as f64;
        let total: f64 = d.iter().map(|v| v.max(0.0) * w).sum();
        let target = u.clamp(0.0, 1.0) * total;
        let mut acc = 0.0;
        for (i, &v) in d.iter().enumerate() {
            let m = v.max(0.0) * w;
            if m > 0.0 && acc + m >= target {
                return self.bin_edges[i] + (target - acc) / m * w;
            }
            acc += m;
        }
        self.bin_edges[n]
    }
}

fn lift_real(edges: &[f64], v: &[f64]) -> PiecewiseFn {
    let c: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    let pieces = c
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0)
        .map(|(i, &z)| {
            crate::piecewise::Piece::new(edges[i], edges[i + 1], vec![crate::piecewise::Term::new(0, 0.0, z)])
        })
        .collect();
    PiecewiseFn::from_pieces(pieces)
}

fn support_intervals(edges: &[f64], bins: &[bool]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &on) in bins.iter().enumerate() {
        if !on {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1 == edges[i] => last.1 = edges[i + 1],
            _ => out.push((edges[i], edges[i + 1])),
        }
    }
    out
}

/// Splits the fixed densities into ergodic components with disjoint supports.
pub fn ergodic_structure(decomp: &SpectralDecomposition, support_floor: f64) -> Result<ErgodicStructure> {
    let ulam = decomp.ulam();
    let n = ulam.bin_count();
    let w = ulam.bin_width();
    let phi1 = decomp.projector_one();
    let mut e = vec![C64::new(0.0, 0.0); n];
    // Support pattern of Φ₁ e_i for every bin.
    let mut patterns: Vec<(Vec<bool>, Vec<f64>)> = Vec::new();
    for i in 0..n {
        e[i] = C64::new(1.0, 0.0);
        let col = phi1.apply(&e);
        e[i] = C64::new(0.0, 0.0);
        let vals: Vec<f64> = col.iter().map(|z| z.re).collect();
        let max = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pat: Vec<bool> = vals.iter().map(|&v| v > support_floor * max).collect();
        if !patterns.iter().any(|(p, _)| *p == pat) {
            patterns.push((pat, vals));
        }
    }
    let is_subset = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(x, y)| !x || *y);
    let minimal: Vec<&(Vec<bool>, Vec<f64>)> = patterns
        .iter()
        .filter(|(p, _)| !patterns.iter().any(|(q, _)| q != p && is_subset(q, p)))
        .collect();
    for (i, a) in minimal.iter().enumerate() {
        for b in minimal.iter().skip(i + 1) {
            if a.0.iter().zip(&b.0).any(|(x, y)| *x && *y) {
                return Err(Error::numerical(
                    "ambiguous ergodic splitting: candidate supports overlap",
                ));
            }
        }
    }
    for (p, _) in &patterns {
        let covered: Vec<bool> = (0..n).map(|k| minimal.iter().any(|m| m.0[k] && p[k])).collect();
        if covered != *p {
            return Err(Error::numerical(
                "ambiguous ergodic splitting: a fixed density is not a union of minimal supports",
            ));
        }
    }
    if minimal.len() != phi1.rank() {
        return Err(Error::numerical(format!(
            "found {} candidate components but the eigenvalue 1 has multiplicity {}",
            minimal.len(),
            phi1.rank()
        )));
    }
    let ones = vec![C64::new(1.0, 0.0); n];
    let invariant: Vec<f64> = phi1.apply(&ones).iter().map(|z| z.re).collect();
    let mut components: Vec<ErgodicComponent> = minimal
        .iter()
        .map(|(pat, _)| {
            let ind: Vec<C64> = pat.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect();
            let fixed: Vec<f64> = phi1
                .apply(&ind)
                .iter()
                .zip(pat)
                .map(|(z, &on)| if on { z.re.max(0.0) } else { 0.0 })
                .collect();
            let mass: f64 = fixed.iter().sum::<f64>() * w;
            let density: Vec<f64> = fixed.iter().map(|v| v / mass).collect();
            let basin_mass = invariant.iter().zip(pat.iter()).filter(|(_, &on)| on).map(|(v, _)| v * w).sum();
            ErgodicComponent {
                density,
                support: support_intervals(ulam.edges(), pat),
                support_bins: pat.clone(),
                basin_mass,
            }
        })
        .collect();
    components.sort_by(|a, b| a.support[0].0.total_cmp(&b.support[0].0));

    let mut eigenfunctions = Vec::new();
    for proj in decomp.projectors().iter().filter(|p| !p.eigenvalue.is_one()) {
        for (l, comp) in components.iter().enumerate() {
            let reference = comp.support_bins.iter().position(|&b| b).unwrap_or(0);
            let ind: Vec<C64> = comp.support_bins.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect();
            // Pick a probe with a nonzero λ-part on this component.
            let mut best: Option<Vec<C64>> = None;
            for i in (0..n).filter(|&i| comp.support_bins[i]).step_by((n / 64).max(1)) {
                let mut probe = vec![C64::new(0.0, 0.0); n];
                probe[i] = C64::new(1.0, 0.0);
                let v: Vec<C64> = proj.apply(&probe).iter().zip(&ind).map(|(a, b)| a * b).collect();
                let s = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if s > 1e-8 && best.as_ref().is_none_or(|b: &Vec<C64>| {
                    s > b.iter().map(|z| z.norm()).fold(0.0, f64::max)
                }) {
                    best = Some(v);
                }
            }
            let Some(v) = best else { continue };
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let phase = v[reference] / v[reference].norm();
            let values: Vec<C64> = v
                .iter()
                .zip(&comp.support_bins)
                .map(|(z, &on)| {
                    if on && z.norm() > support_floor * max {
                        z / z.norm() / phase
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            eigenfunctions.push(PeripheralEigenfunction { lambda: proj.lambda(), component: l, values });
        }
    }
    Ok(ErgodicStructure {
        components,
        invariant_density: invariant,
        eigenfunctions,
        support_floor,
        bin_edges: ulam.edges().to_vec(),
    })
}

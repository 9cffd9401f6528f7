use super::fourier::SparseFourierDistribution;
use super::lattice;
use super::matrix::Freq;
use super::trig::freq_norm;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use crate::stats::linear_fit;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial bump: 1 on `|x| ≤ 1`, 0 on `|x| ≥ 2`, smooth and non-increasing between.
pub fn bump(x: f64) -> f64 {
    let r = x.abs();
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let (a, b) = (h(2.0 - r), h(r - 1.0));
    a / (a + b)
}

/// `ψ_ℓ(ξ) = ψ₀(ξ/2^ℓ) − ψ₀(ξ/2^{ℓ−1})` for `ℓ ≥ 1`, and `ψ₀` at `ℓ = 0`.
pub fn block_weight(level: u32, xi: f64) -> f64 {
    if level == 0 {
        return bump(xi);
    }
    bump(xi / (level as f64).exp2()) - bump(xi / (level as f64 - 1.0).exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BesovOptions {
    /// Grid points per shortest wavelength.
    pub grid_density: usize,
    pub max_grid_points: usize,
    /// Quasi-random points used instead when the grid would exceed `max_grid_points`.
    pub sample_budget: usize,
    /// Local maxima polished by coordinate search.
    pub refine_candidates: usize,
}

impl Default for BesovOptions {
    fn default() -> Self {
        BesovOptions { grid_density: 8, max_grid_points: 1 << 22, sample_budget: 1 << 16, refine_candidates: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesovClass {
    /// Block sups bounded: `Λ⁰`.
    Zygmund,
    /// At most linear growth in `1+ℓ`: `B^{0,−1}_{∞,∞}`.
    LogBesov,
    Unbounded,
}

/// Growth exponents at or below these separate the classes.
pub const BOUNDED_EXPONENT: f64 = 0.05;
pub const LINEAR_EXPONENT: f64 = 1.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub level: u32,
    pub sup: f64,
    pub frequencies: usize,
    /// Rank of the lattice the block's frequencies span.
    pub rank: usize,
    pub grid_points: usize,
    /// The full grid was scanned; otherwise the sup is a sampled lower estimate.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlockProfile {
    pub blocks: Vec<DyadicBlock>,
    pub grid_density: usize,
    /// Slope of `ln(max_{ℓ'≤ℓ} sup_{ℓ'})` against `ln(1+ℓ)` over `ℓ ≥ ℓ_max/2`.
    pub growth_exponent: Option<f64>,
    pub class: BesovClass,
}

impl DyadicBlockProfile {
    pub fn sups(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.sup).collect()
    }

    /// Slope of `sup_ℓ/(1+ℓ)` against `ℓ` for `ℓ > from`.
    pub fn log_besov_slope(&self, from: u32) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .blocks
            .iter()
            .filter(|b| b.level > from)
            .map(|b| (b.level as f64, b.sup / (1.0 + b.level as f64)))
            .collect();
        (pts.len() >= 2).then(|| linear_fit(&pts).0)
    }
}

fn block_sup(terms: &[(Freq, C64)], opts: &BesovOptions, level: u32) -> Result<(f64, usize, usize, bool)> {
    match terms.len() {
        0 => return Ok((0.0, 0, 0, true)),
        1 => return Ok((terms[0].1.norm(), 1, 0, true)),
        _ => {}
    }
    let ks: Vec<Freq> = terms.iter().map(|t| t.0.clone()).collect();
    let ch = lattice::chart(&ks)
        .ok_or_else(|| Error::numerical(format!("block {level}: frequencies admit no small lattice chart")))?;
    let r = ch.rank;
    let axes: Vec<usize> = (0..r)
        .map(|a| {
            let top = ch.coords.iter().map(|c| c[a].unsigned_abs()).max().unwrap_or(1).max(1);
            (opts.grid_density as u128 * top) as usize
        })
        .collect();
    let total = axes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).unwrap_or(usize::MAX);
    let exhaustive = total <= opts.max_grid_points;
    let coefs: Vec<C64> = terms.iter().map(|t| t.1).collect();
    let value = |theta: &[f64]| -> f64 {
        ch.coords
            .iter()
            .zip(&coefs)
            .map(|(c, a)| {
                let ph: f64 = c.iter().zip(theta).map(|(&ci, &t)| ci as f64 * t).sum();
                a * C64::from_polar(1.0, TAU * ph)
            })
            .sum::<C64>()
            .norm()
    };
    // Kronecker sequence with square roots of primes as rotation numbers.
    let rotations: Vec<f64> = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0]
        .iter()
        .cycle()
        .take(r)
        .enumerate()
        .map(|(i, p)| (p.sqrt() * (1 + i / 8) as f64).fract())
        .collect();
    let point = |mut idx: usize| -> Vec<f64> {
        if !exhaustive {
            return rotations.iter().map(|a| (idx as f64 * a).fract()).collect();
        }
        axes.iter()
            .map(|&n| {
                let i = idx % n;
                idx /= n;
                i as f64 / n as f64
            })
            .collect()
    };
    let count = if exhaustive { total } else { opts.sample_budget.max(1) };
    let mut scored: Vec<(f64, usize)> = (0..count).into_par_iter().map(|i| (value(&point(i)), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;
    for &(_, i) in scored.iter().take(opts.refine_candidates) {
        let mut th = point(i);
        let mut v = value(&th);
        let mut steps: Vec<f64> = axes.iter().map(|&n| 0.5 / n as f64).collect();
        for _ in 0..60 {
            let mut moved = false;
            for a in 0..r {
                for s in [steps[a], -steps[a]] {
                    let mut t = th.clone();
                    t[a] += s;
                    let w = value(&t);
                    if w > v {
                        v = w;
                        th = t;
                        moved = true;
                    }
                }
            }
            if !moved {
                steps.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        best = best.max(v);
    }
    Ok((best, r, count, exhaustive))
}

/// Sup norms of the Littlewood–Paley blocks `u_ℓ = Σ c_k ψ_ℓ(2π|k|) e^{2πi k·x}`
/// for `ℓ = 0..=level_max`.
pub fn besov_profile(u: &SparseFourierDistribution, level_max: u32, opts: &BesovOptions) -> Result<DyadicBlockProfile> {
    if opts.grid_density < 2 {
        return Err(Error::invalid("grid density must be at least 2"));
    }
    match u.provenance.coverage_level {
        Some(c) if c >= level_max as i32 || u.terms.is_empty() => {}
        Some(c) => {
            return Err(Error::precondition(format!(
                "series truncated at j = {} covers blocks up to {c} only, {level_max} requested",
                u.provenance.j_max
            )))
        }
        None if u.terms.is_empty() => {}
        None => return Err(Error::unsupported("no coverage guarantee for this system; blocks would be incomplete")),
    }
    let blocks = (0..=level_max)
        .map(|level| {
            let terms: Vec<(Freq, C64)> = u
                .terms
                .iter()
                .filter_map(|(k, c)| {
                    let w = block_weight(level, TAU * freq_norm(k));
                    (w != 0.0).then(|| (k.clone(), c * w))
                })
                .collect();
            let (sup, rank, grid_points, exhaustive) = block_sup(&terms, opts, level)?;
            Ok(DyadicBlock { level, sup, frequencies: terms.len(), rank, grid_points, exhaustive })
        })
        .collect::<Result<Vec<_>>>()?;
    // The envelope is fitted on the upper half of the levels so that the
    // empty low blocks do not read as growth.
    let mut env = 0.0f64;
    let from = level_max.div_ceil(2);
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .filter_map(|b| {
            env = env.max(b.sup);
            (env > 0.0 && b.level >= from).then(|| ((1.0 + b.level as f64).ln(), env.ln()))
        })
        .collect();
    let growth_exponent = (pts.len() >= 2).then(|| linear_fit(&pts).0);
    let class = match growth_exponent {
        None => BesovClass::Zygmund,
        Some(e) if e <= BOUNDED_EXPONENT => BesovClass::Zygmund,
        Some(e) if e <= LINEAR_EXPONENT => BesovClass::LogBesov,
        Some(_) => BesovClass::Unbounded,
    };
    Ok(DyadicBlockProfile { blocks, grid_density: opts.grid_density, growth_exponent, class })
}

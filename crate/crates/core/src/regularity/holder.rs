use crate::birkhoff::Birkhoff;
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use crate::stats::linear_fit;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderDistance {
    pub n: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderConvergence {
    pub beta: f64,
    pub level: u32,
    pub distances: Vec<HolderDistance>,
    /// `exp` of the slope of `ln(distance)` against `n`.
    pub rate: Option<f64>,
    /// Largest tail bound among the cell pairings.
    pub tail_bound: f64,
}

/// `|ψ − ψ_n|_{C^β}` for `n = 0..=n_max`, where `ψ_n` keeps blocks `0..=n`,
/// estimated on the dyadic grid of the given level: sup norm plus the largest
/// `|Δ|/δ^β` over consecutive points at every dyadic separation.
pub fn holder_convergence(b: &Birkhoff<'_>, beta: f64, n_max: usize, level: u32, tol: f64) -> Result<HolderConvergence> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("β must lie in (0, 1), got {beta}")));
    }
    if level > 16 {
        return Err(Error::invalid("grid level above 16"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let (lo, hi) = b.system().interval();
    let cells = 1usize << level;
    let w = (hi - lo) / cells as f64;
    // Per cell: blocks beyond n, for every n.
    let tails: Vec<(Vec<C64>, f64)> = (0..cells)
        .into_par_iter()
        .map(|j| {
            let gamma = PiecewiseFn::indicator(lo + j as f64 * w, lo + (j + 1) as f64 * w);
            let scale = b.tail_scale(&gamma);
            let p = b.block_length();
            let min_blocks = b.truncation_index(&gamma) / p;
            let mut m = (n_max + 1).max(min_blocks).max(1);
            while b.tail_bound(scale, m) >= tol {
                m += 1;
                if m > b.options().max_blocks {
                    return Err(Error::numerical(format!("cell {j}: tail bound above {tol:.1e} after {m} blocks")));
                }
            }
            let blocks = b.block_sums(&gamma, m)?;
            let mut tail = vec![C64::new(0.0, 0.0); n_max + 1];
            let mut acc = C64::new(0.0, 0.0);
            for k in (0..m).rev() {
                if k <= n_max {
                    tail[k] = acc;
                }
                acc += blocks[k];
            }
            Ok((tail, b.tail_bound(scale, m)))
        })
        .collect::<Result<_>>()?;
    let tail_bound = tails.iter().map(|t| t.1).fold(0.0, f64::max);
    let distances: Vec<HolderDistance> = (0..=n_max)
        .map(|n| {
            let mut e = Vec::with_capacity(cells + 1);
            e.push(C64::new(0.0, 0.0));
            for t in &tails {
                let last = *e.last().unwrap();
                e.push(last + t.0[n]);
            }
            let sup = e.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut semi = 0.0f64;
            for k in 0..=level {
                let stride = 1usize << (level - k);
                let delta = (hi - lo) / (1u64 << k) as f64;
                for i in 0..1usize << k {
                    semi = semi.max((e[(i + 1) * stride] - e[i * stride]).norm() / delta.powf(beta));
                }
            }
            HolderDistance { n, distance: sup + semi }
        })
        .collect();
    let floor = 1e3 * tol;
    let pts: Vec<(f64, f64)> = distances.iter().filter(|d| d.distance > floor).map(|d| (d.n as f64, d.distance.ln())).collect();
    let rate = (pts.len() >= 2).then(|| linear_fit(&pts).0.exp());
    Ok(HolderConvergence { beta, level, distances, rate, tail_bound })
}

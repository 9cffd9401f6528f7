use super::projector::{random_vectors, tail_apply, SpectralProjector};
use super::ulam::UlamDiscretization;
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};

const TAIL_SEED: u64 = 0x5eed_0003;

/// Fitted `‖Kⁿ‖ ≤ C rⁿ` in the discrete BV norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Estimates of `‖Kⁿ‖` for `n = 0, 1, …`.
    pub norms: Vec<f64>,
    pub rate: f64,
    pub constant: f64,
}

impl TailEstimate {
    pub fn bound(&self, n: usize) -> f64 {
        self.constant * self.rate.powi(n as i32)
    }
}

/// Discrete BV norm of bin values: jumps plus the L¹ norm.
pub fn discrete_bv(v: &[C64], width: f64) -> f64 {
    let var: f64 = v.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    var + width * v.iter().map(|z| z.norm()).sum::<f64>()
}

pub(crate) fn estimate_tail(ulam: &UlamDiscretization, projectors: &[SpectralProjector], n_max: usize) -> TailEstimate {
    let n = ulam.bin_count();
    let w = ulam.bin_width();
    let mut norms = vec![0.0f64; n_max + 1];
    for x in random_vectors(n, 4, TAIL_SEED) {
        // Start from K x so that the probe has no peripheral part.
        let mut v = tail_apply(ulam, projectors, &x);
        let base = discrete_bv(&v, w);
        if base == 0.0 {
            continue;
        }
        norms[0] = norms[0].max(1.0);
        for slot in norms.iter_mut().skip(1) {
            v = tail_apply(ulam, projectors, &v);
            *slot = slot.max(discrete_bv(&v, w) / base);
        }
    }
    let floor = 1e-12;
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v > floor)
        .map(|(k, &v)| (k as f64, v.ln()))
        .collect();
    let rate = if pts.len() >= 3 {
        let (slope, _) = crate::stats::linear_fit(&pts);
        slope.exp()
    } else if let Some(&(k, lv)) = pts.last() {
        (lv / k).exp()
    } else {
        floor
    };
    let rate = rate.clamp(1e-6, f64::INFINITY);
    let constant = norms
        .iter()
        .enumerate()
        .map(|(k, &v)| v / rate.powi(k as i32))
        .fold(1.0, f64::max);
    TailEstimate { norms, rate, constant }
}

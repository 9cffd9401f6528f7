use super::tail::discrete_bv;
use super::ulam::UlamDiscretization;
use crate::dynamics::PiecewiseMap;
use crate::error::{Error, Result};
use crate::piecewise::{Piece, PiecewiseFn, Term, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Empirical `|Lⁿγ|_BV ≤ c|γ|_BV + b|γ|_{L¹}` for one iterate `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasotaYorke {
    pub iterate: usize,
    pub c: f64,
    pub b: f64,
    /// `c^{1/n}`, the contraction per step.
    pub per_step: f64,
}

impl LasotaYorke {
    pub fn contracting(&self) -> bool {
        self.c < 1.0
    }
}

/// Norms of one sample before and after `n` steps.
struct Sample {
    var0: f64,
    l1_0: f64,
    var_n: f64,
    l1_n: f64,
}

/// Default test densities: indicators of random intervals and random
/// trigonometric bumps on the map's interval.
pub fn default_samples(map: &PiecewiseMap, count: usize, seed: u64) -> Vec<PiecewiseFn> {
    let (a, b) = map.interval();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let u: f64 = rng.gen_range(a..b);
        let v: f64 = rng.gen_range(a..b);
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        if k % 3 == 2 {
            let q = rng.gen_range(1..6) as f64;
            let amp = rng.gen_range(0.2..1.0);
            out.push(PiecewiseFn::from_pieces(vec![Piece::new(
                lo,
                hi,
                vec![
                    Term::new(0, 0.0, C64::new(1.0, 0.0)),
                    Term::new(0, q, C64::new(0.5 * amp, 0.0)),
                    Term::new(0, -q, C64::new(0.5 * amp, 0.0)),
                ],
            )]));
        } else {
            out.push(PiecewiseFn::indicator(lo, hi));
        }
    }
    out
}

fn sample_norms(map: &PiecewiseMap, ulam: Option<&UlamDiscretization>, gamma: &PiecewiseFn, n: usize) -> Result<Sample> {
    let (a, b) = map.interval();
    let var0 = gamma.variation(a, b);
    let l1_0 = gamma.l1_norm();
    let (var_n, l1_n) = match map.affine_pieces() {
        Some(pieces) => {
            let mut g = gamma.clone();
            for _ in 0..n {
                g = g.transfer_affine(&pieces);
            }
            (g.variation(a, b), g.l1_norm())
        }
        None => {
            let u = ulam.ok_or_else(|| Error::unsupported("non-affine Lasota–Yorke fit needs an Ulam discretization"))?;
            let mut v = u.project(gamma);
            for _ in 0..n {
                v = u.push_forward(&v);
            }
            let w = u.bin_width();
            let l1 = w * v.iter().map(|z| z.norm()).sum::<f64>();
            (discrete_bv(&v, w) - l1, l1)
        }
    };
    Ok(Sample { var0, l1_0, var_n, l1_n })
}

/// Fits `(c, b)` for iterates `1..=n_max`. `c` is the worst variation ratio
/// over samples, `b` the smallest constant making every sample satisfy the
/// inequality given that `c`.
pub fn lasota_yorke_check(
    map: &PiecewiseMap,
    ulam: Option<&UlamDiscretization>,
    samples: &[PiecewiseFn],
    n_max: usize,
) -> Result<Vec<LasotaYorke>> {
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let norms = samples
            .iter()
            .map(|g| sample_norms(map, ulam, g, n))
            .collect::<Result<Vec<_>>>()?;
        let c = norms
            .iter()
            .filter(|s| s.var0 > 0.0)
            .map(|s| s.var_n / s.var0)
            .fold(0.0, f64::max);
        let b = norms
            .iter()
            .filter(|s| s.l1_0 > 0.0)
            .map(|s| ((s.var_n + s.l1_n) - c * (s.var0 + s.l1_0)) / s.l1_0)
            .fold(0.0, f64::max);
        out.push(LasotaYorke { iterate: n, c, b, per_step: c.powf(1.0 / n as f64) });
    }
    Ok(out)
}

/// First contracting iterate with the default sample set.
pub fn lasota_yorke_fit(map: &PiecewiseMap, ulam: Option<&UlamDiscretization>, n_max: usize) -> Result<LasotaYorke> {
    let samples = default_samples(map, 60, 0x5eed_0004);
    let fits = lasota_yorke_check(map, ulam, &samples, n_max)?;
    fits.into_iter()
        .find(LasotaYorke::contracting)
        .ok_or_else(|| Error::numerical(format!("no contracting Lasota–Yorke iterate up to n = {n_max}")))
}

use crate::dynamics::PiecewiseMap;
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseFn;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per RNG stream; streams are indexed, so results do not depend on
/// the thread count.
const CHUNK: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarloOptions {
    pub samples: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        MonteCarloOptions { samples: 100_000, horizon: 1000, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    /// Mean over `x ~ m` of `(1/N) Σ_{n≤N} |S_n φ(x)|²/n`.
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub horizon: usize,
    /// Orbits followed bit by bit rather than in floating point.
    pub exact_orbits: bool,
}

impl MonteCarloEstimate {
    /// Half-width of the 95% interval.
    pub fn half_width(&self) -> f64 {
        1.96 * self.std_error
    }
}

fn is_doubling(map: &PiecewiseMap) -> bool {
    map.affine_pieces().is_some_and(|p| p == PiecewiseMap::doubling().affine_pieces().unwrap())
}

/// Random binary expansion; `window(i)` is `fⁱ(x)` for the doubling map.
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(rng: &mut ChaCha8Rng, bits: usize) -> Self {
        Bits { words: (0..bits / 64 + 2).map(|_| rng.next_u64()).collect() }
    }

    fn window(&self, i: usize) -> f64 {
        let (q, r) = (i / 64, (i % 64) as u32);
        let w = if r == 0 { self.words[q] } else { (self.words[q] << r) | (self.words[q + 1] >> (64 - r)) };
        (w >> 11) as f64 * (-53f64).exp2()
    }
}

fn cesaro_square(values: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut acc, mut n) = (0.0, 0.0, 0usize);
    for v in values {
        s += v;
        n += 1;
        acc += s * s / n as f64;
    }
    acc / n as f64
}

/// Seeded Monte Carlo estimate of `σ²_m(φ)` for real `φ`.
pub fn monte_carlo_sigma2(map: &PiecewiseMap, phi: &PiecewiseFn, opts: &MonteCarloOptions) -> Result<MonteCarloEstimate> {
    if opts.samples < 2 || opts.horizon == 0 {
        return Err(Error::invalid("Monte Carlo needs at least 2 samples and a positive horizon"));
    }
    let exact = is_doubling(map);
    let (a, b) = map.interval();
    let n = opts.horizon;
    let chunks = opts.samples.div_ceil(CHUNK);
    let per_sample: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(opts.samples - c * CHUNK);
            (0..count)
                .map(|_| {
                    if exact {
                        let bits = Bits::new(&mut rng, n);
                        cesaro_square((0..n).map(|i| phi.eval(bits.window(i)).re))
                    } else {
                        let mut x = rng.gen_range(a..b);
                        cesaro_square((0..n).map(|_| {
                            let v = phi.eval(x).re;
                            x = map.eval(x);
                            v
                        }))
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let (mean, sd) = crate::stats::mean_and_sd(&per_sample);
    Ok(MonteCarloEstimate {
        mean,
        std_error: sd / (per_sample.len() as f64).sqrt(),
        samples: per_sample.len(),
        horizon: n,
        exact_orbits: exact,
    })
}

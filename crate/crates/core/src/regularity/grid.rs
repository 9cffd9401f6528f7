use crate::birkhoff::Birkhoff;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};

/// Values of a primitive on the dyadic grid `a + j(b−a)/2^level`, `j = 0..=2^level`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveGrid {
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<C64>,
}

impl PrimitiveGrid {
    pub fn new(lo: f64, hi: f64, values: Vec<C64>) -> Result<Self> {
        let n = values.len().saturating_sub(1);
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("a dyadic grid needs 2^k + 1 values, got {}", values.len())));
        }
        if !(hi > lo) {
            return Err(Error::invalid(format!("empty grid interval [{lo}, {hi}]")));
        }
        Ok(PrimitiveGrid { lo, hi, values })
    }

    pub fn from_fn(lo: f64, hi: f64, level: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = 1usize << level;
        let values = (0..=n).map(|j| C64::new(f(lo + (hi - lo) * j as f64 / n as f64), 0.0)).collect();
        Self::new(lo, hi, values)
    }

    /// Evaluates `ψ` on the grid over the system's interval.
    pub fn sample(b: &Birkhoff<'_>, level: u32) -> Result<Self> {
        let (lo, hi) = b.system().interval();
        let n = 1usize << level;
        let xs: Vec<f64> = (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect();
        let values = b.primitive_grid(&xs)?.into_iter().map(|e| e.value).collect();
        Self::new(lo, hi, values)
    }

    pub fn level(&self) -> u32 {
        (self.values.len() - 1).trailing_zeros()
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.values.len() - 1;
        (0..=n).map(|j| self.lo + (self.hi - self.lo) * j as f64 / n as f64).collect()
    }

    /// Separation and consecutive differences at level `k ≤ level()`.
    fn differences(&self, k: u32) -> (f64, impl Iterator<Item = (usize, f64)> + '_) {
        let stride = 1usize << (self.level() - k);
        let delta = (self.hi - self.lo) / (1u64 << k) as f64;
        let it = (0..1usize << k).map(move |i| (i * stride, (self.values[(i + 1) * stride] - self.values[i * stride]).norm()));
        (delta, it)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLipschitzLevel {
    pub h: f64,
    pub sup_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLipschitzReport {
    /// Coarse to fine.
    pub levels: Vec<LogLipschitzLevel>,
    pub sup_ratio: f64,
    pub argmax: (f64, f64),
    /// The finest third of the levels stays within 25% of the coarser sup.
    pub stable: bool,
}

/// `sup |ψ(x)−ψ(y)| / (|x−y|(1+|ln|x−y||))` over consecutive grid points at
/// every dyadic separation.
pub fn log_lipschitz_ratio(grid: &PrimitiveGrid) -> LogLipschitzReport {
    let mut levels = Vec::new();
    let (mut sup, mut argmax) = (0.0, (grid.lo, grid.lo));
    for k in 0..=grid.level() {
        let (delta, diffs) = grid.differences(k);
        let weight = delta * (1.0 + delta.ln().abs());
        let mut level_sup = 0.0f64;
        for (j, d) in diffs {
            let r = d / weight;
            if r > level_sup {
                level_sup = r;
            }
            if r > sup {
                sup = r;
                let x = grid.lo + (grid.hi - grid.lo) * j as f64 / (grid.values.len() - 1) as f64;
                argmax = (x, x + delta);
            }
        }
        levels.push(LogLipschitzLevel { h: delta, sup_ratio: level_sup });
    }
    let fine = (levels.len() / 3).max(1);
    let split = levels.len() - fine;
    let coarse_sup = levels[..split].iter().map(|l| l.sup_ratio).fold(0.0, f64::max);
    let fine_sup = levels[split..].iter().map(|l| l.sup_ratio).fold(0.0, f64::max);
    let stable = fine_sup <= 1.25 * coarse_sup || fine_sup == 0.0;
    LogLipschitzReport { levels, sup_ratio: sup, argmax, stable }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BvVerdict {
    Bounded,
    Diverging,
}

impl BvVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            BvVerdict::Bounded => "bounded",
            BvVerdict::Diverging => "diverging",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvLevel {
    pub h: f64,
    pub variation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvReport {
    pub levels: Vec<BvLevel>,
    pub verdict: BvVerdict,
}

/// Increments between refinements must shrink at least this fast to count as
/// saturating.
const BV_RATIO: f64 = 0.75;
const BV_CHECKED_LEVELS: usize = 3;

/// Variation sums on nested dyadic grids, which are lower bounds for the total
/// variation, and a ratio test on their increments.
pub fn bv_test(grid: &PrimitiveGrid) -> BvReport {
    let levels: Vec<BvLevel> = (0..=grid.level())
        .map(|k| {
            let (h, diffs) = grid.differences(k);
            BvLevel { h, variation: diffs.map(|(_, d)| d).sum() }
        })
        .collect();
    let inc: Vec<f64> = levels.windows(2).map(|w| (w[1].variation - w[0].variation).max(0.0)).collect();
    let top = levels.last().map_or(0.0, |l| l.variation);
    let saturating = |i: usize| inc[i] <= 1e-6 * top || (i > 0 && inc[i] <= BV_RATIO * inc[i - 1]);
    let checked = inc.len().min(BV_CHECKED_LEVELS);
    let bounded = (inc.len() - checked..inc.len()).all(saturating);
    BvReport { levels, verdict: if bounded { BvVerdict::Bounded } else { BvVerdict::Diverging } }
}

use super::map::PiecewiseMap;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Interval of monotonicity of `fⁿ` together with the branch word used on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub lo: f64,
    pub hi: f64,
    pub word: Vec<usize>,
}

impl Cylinder {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

impl PiecewiseMap {
    /// Open intervals of monotonicity of `fⁿ`, sorted.
    pub fn monotonicity_partition(&self, n: usize) -> Result<Vec<Cylinder>> {
        if n < 1 {
            return Err(Error::invalid("partition depth must be at least 1"));
        }
        let mut cyl: Vec<Cylinder> = self
            .branches()
            .iter()
            .enumerate()
            .map(|(i, b)| Cylinder { lo: b.lo, hi: b.hi, word: vec![i] })
            .collect();
        for _ in 1..n {
            cyl = cyl.iter().flat_map(|c| self.refine(c)).collect();
        }
        Ok(cyl)
    }

    fn refine(&self, c: &Cylinder) -> Vec<Cylinder> {
        let (u, v) = (self.iterate_word(&c.word, c.lo), self.iterate_word(&c.word, c.hi));
        let (ilo, ihi) = if u <= v { (u, v) } else { (v, u) };
        let tol = 1e-13 * self.length();
        let mut cuts: Vec<f64> = self
            .critical_set()
            .iter()
            .filter(|&&cr| cr > ilo + tol && cr < ihi - tol)
            .filter_map(|&cr| self.pull_back(&c.word, cr, c.lo, c.hi))
            .collect();
        cuts.push(c.lo);
        cuts.push(c.hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let y = self.iterate_word(&c.word, mid);
                let mut word = c.word.clone();
                word.push(self.branch_at(y));
                Cylinder { lo: w[0], hi: w[1], word }
            })
            .collect()
    }

    /// Solves `f^word(x) = y` on `[lo, hi]`.
    pub(crate) fn pull_back(&self, word: &[usize], y: f64, lo: f64, hi: f64) -> Option<f64> {
        if let Some((s, o)) = self.affine_word(word) {
            return Some(((y - o) / s).clamp(lo, hi));
        }
        let mut z = y;
        for &i in word.iter().rev() {
            z = self.branches()[i].inverse(z)?;
        }
        Some(z.clamp(lo, hi))
    }

    /// Sup of `Dfⁿ(x)/Dfⁿ(y)` on a sample grid of `J` and the empirical
    /// constant in `|ln|Dfⁿ(x)| − ln|Dfⁿ(y)|| ≤ C|fⁿ(x) − fⁿ(y)|`.
    pub fn distortion_constants(&self, j: &Cylinder) -> (f64, f64) {
        let n = 257;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let x = j.lo + j.len() * k as f64 / (n - 1) as f64;
                (
                    self.derivative_word(&j.word, x).abs().ln(),
                    self.iterate_word(&j.word, x),
                )
            })
            .collect();
        let max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let mut c = 0.0f64;
        for i in 0..n {
            for k in i + 1..n {
                let d = (pts[i].0 - pts[k].0).abs();
                if d > 0.0 {
                    c = c.max(d / (pts[i].1 - pts[k].1).abs());
                }
            }
        }
        ((max - min).exp(), c)
    }
}

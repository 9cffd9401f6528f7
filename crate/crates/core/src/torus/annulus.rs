use super::matrix::HyperbolicMatrix;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Number of `j` in `j_range` with `2^ℓ ≤ |Mʲp| ≤ 2^{ℓ+1}`, decided exactly on
/// squared norms in arbitrary precision.
pub fn annulus_crossings(m: &HyperbolicMatrix, p: &[i64], level: i32, j_range: (i64, i64)) -> Result<usize> {
    Ok(crossing_indices(m, p, level, j_range)?.len())
}

/// The `j` counted by [`annulus_crossings`].
pub fn crossing_indices(m: &HyperbolicMatrix, p: &[i64], level: i32, j_range: (i64, i64)) -> Result<Vec<i64>> {
    if p.len() != m.dim() {
        return Err(Error::invalid(format!("p has length {}, expected {}", p.len(), m.dim())));
    }
    if p.iter().all(|&v| v == 0) {
        return Err(Error::invalid("p must be nonzero"));
    }
    let (lo, hi) = j_range;
    if lo > hi {
        return Err(Error::invalid(format!("empty range [{lo}, {hi}]")));
    }
    let start: Vec<BigInt> = p.iter().map(|&v| BigInt::from(v)).collect();
    // Scaled by 4^{max(−ℓ,0)}: 4^{max(ℓ,0)} ≤ |v|²·4^{max(−ℓ,0)} ≤ 4^{max(ℓ,0)+1}.
    let shift_v = 2 * (-level).max(0) as usize;
    let lower: BigInt = BigInt::one() << (2 * level.max(0) as usize);
    let upper: BigInt = BigInt::one() << (2 * level.max(0) as usize + 2);
    let mut out = Vec::new();
    let mut v = m.power_apply_big(lo, &start);
    for j in lo..=hi {
        let sq: BigInt = v.iter().map(|x| x * x).fold(BigInt::zero(), |a, b| a + b) << shift_v;
        if sq >= lower && sq <= upper {
            out.push(j);
        }
        v = m.power_apply_big(1, &v);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEntry {
    pub p: Vec<i64>,
    pub level: i32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingTable {
    pub entries: Vec<CrossingEntry>,
    /// Brute-force estimate of the uniform constant `L`.
    pub max: usize,
}

/// Counts over every `p` and every level `0..=level_max`.
pub fn crossing_table(m: &HyperbolicMatrix, ps: &[Vec<i64>], level_max: i32, j_range: (i64, i64)) -> Result<CrossingTable> {
    let mut entries = Vec::new();
    for p in ps {
        for level in 0..=level_max {
            entries.push(CrossingEntry { p: p.clone(), level, count: annulus_crossings(m, p, level, j_range)? });
        }
    }
    let max = entries.iter().map(|e| e.count).max().unwrap_or(0);
    Ok(CrossingTable { entries, max })
}

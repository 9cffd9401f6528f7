use super::matrix::Freq;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Integer coordinates of a set of frequencies in a basis of the lattice they span.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct LatticeChart {
    pub rank: usize,
    pub coords: Vec<Vec<i128>>,
}

fn big(k: &Freq) -> Vec<BigInt> {
    k.iter().map(|&v| BigInt::from(v)).collect()
}

/// Row echelon basis of the lattice generated by `rows`, by Euclidean
/// reduction on each column.
fn echelon(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|v| !v.is_zero())).cloned().collect();
    let n = rows.first().map_or(0, |r| r.len());
    let mut top = 0;
    for col in 0..n {
        loop {
            let pivot = (top..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(p) = pivot else { break };
            rows.swap(top, p);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[top]) {
                    *x -= &q * y;
                }
                done &= tail[0][col].is_zero();
            }
            if done {
                top += 1;
                break;
            }
        }
        rows.retain(|r| r.iter().any(|v| !v.is_zero()));
        if top >= rows.len() {
            break;
        }
    }
    rows.truncate(top);
    rows
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<BigInt>> = m[1..].iter().map(|r| [&r[..c], &r[c + 1..]].concat()).collect();
            let t = &m[0][c] * det(&minor);
            if c % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

fn combinations(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact coordinates of every `k` in `basis` by Cramer's rule on a
/// nonsingular square minor, or `None` if some `k` is not an integer
/// combination.
fn coordinates(basis: &[Vec<BigInt>], ks: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    let r = basis.len();
    let n = basis[0].len();
    let mut chosen = None;
    combinations(n, r, |rows| {
        let m: Vec<Vec<BigInt>> = rows.iter().map(|&i| basis.iter().map(|b| b[i].clone()).collect()).collect();
        let d = det(&m);
        if d.is_zero() {
            return true;
        }
        chosen = Some((rows.to_vec(), m, d));
        false
    });
    let (rows, m, d) = chosen?;
    ks.iter()
        .map(|k| {
            let c: Vec<BigInt> = (0..r)
                .map(|a| {
                    let mut ma = m.clone();
                    for (row, &i) in ma.iter_mut().zip(&rows) {
                        row[a] = k[i].clone();
                    }
                    let (q, rem) = det(&ma).div_rem(&d);
                    rem.is_zero().then_some(q)
                })
                .collect::<Option<_>>()?;
            let exact = (0..n).all(|i| (0..r).map(|a| &c[a] * &basis[a][i]).sum::<BigInt>() == k[i]);
            if !exact {
                return None;
            }
            c.iter().map(|v| v.to_i128()).collect()
        })
        .collect()
}

fn box_size(coords: &[Vec<i128>], r: usize) -> u128 {
    (0..r).map(|a| coords.iter().map(|c| c[a].unsigned_abs()).max().unwrap_or(1).max(1)).product()
}

/// A chart with small coordinates: bases drawn from `ks` itself are tried
/// first, then the echelon basis of the spanned lattice.
pub(crate) fn chart(ks: &[Freq]) -> Option<LatticeChart> {
    let bks: Vec<Vec<BigInt>> = ks.iter().map(big).collect();
    let basis = echelon(&bks);
    let r = basis.len();
    if r == 0 {
        return Some(LatticeChart { rank: 0, coords: vec![Vec::new(); ks.len()] });
    }
    let mut best: Option<(u128, Vec<Vec<i128>>)> = coordinates(&basis, &bks).map(|c| (box_size(&c, r), c));
    let mut tried = 0usize;
    combinations(ks.len(), r, |idx| {
        tried += 1;
        let sub: Vec<Vec<BigInt>> = idx.iter().map(|&i| bks[i].clone()).collect();
        if let Some(c) = coordinates(&sub, &bks) {
            let size = box_size(&c, r);
            if best.as_ref().is_none_or(|(s, _)| size < *s) {
                best = Some((size, c));
            }
        }
        tried < 20_000
    });
    best.map(|(_, coords)| LatticeChart { rank: r, coords })
}

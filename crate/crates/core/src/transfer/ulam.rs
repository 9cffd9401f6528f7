use crate::dynamics::{BranchKind, PiecewiseMap};
use crate::error::{Error, Result};
use crate::piecewise::{Piece, PiecewiseFn, Term, C64};
use rayon::prelude::*;

/// Uniform-bin discretization of the transfer operator,
/// `P[i][j] = m(B_i ∩ f⁻¹B_j) / m(B_i)`, stored by rows.
#[derive(Clone, Debug)]
pub struct UlamDiscretization {
    a: f64,
    b: f64,
    edges: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    assembly_error_bound: f64,
}

impl UlamDiscretization {
    pub fn new(map: &PiecewiseMap, n: usize) -> Result<Self> {
        if n < map.branches().len() {
            return Err(Error::invalid(format!(
                "bin count {n} is below the branch count {}",
                map.branches().len()
            )));
        }
        let (a, b) = map.interval();
        let edges: Vec<f64> = (0..=n).map(|i| a + (b - a) * (i as f64 / n as f64)).collect();
        let rows: Vec<(Vec<(usize, f64)>, f64)> =
            (0..n).into_par_iter().map(|i| assemble_row(map, &edges, i)).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut err = 0.0f64;
        row_ptr.push(0);
        for (row, e) in rows {
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            err = err.max(e);
            row_ptr.push(cols.len());
        }
        Ok(UlamDiscretization { a, b, edges, row_ptr, cols, vals, assembly_error_bound: err })
    }

    pub fn bin_count(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bin_width(&self) -> f64 {
        (self.b - self.a) / self.bin_count() as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let n = self.bin_count();
        (((x - self.a) / (self.b - self.a) * n as f64).floor().max(0.0) as usize).min(n - 1)
    }

    /// Largest per-row error from numerical branch inversion (0 for affine maps).
    pub fn assembly_error_bound(&self) -> f64 {
        self.assembly_error_bound
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Densities (bin averages) pushed forward: `d'_j = Σ_i d_i P_ij`.
    pub fn push_forward(&self, d: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.bin_count()];
        for (i, &di) in d.iter().enumerate() {
            if di.re == 0.0 && di.im == 0.0 {
                continue;
            }
            for (j, p) in self.row(i) {
                out[j] += di * p;
            }
        }
        out
    }

    pub fn push_forward_real(&self, d: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.bin_count()];
        for (i, &di) in d.iter().enumerate() {
            if di == 0.0 {
                continue;
            }
            for (j, p) in self.row(i) {
                out[j] += di * p;
            }
        }
        out
    }

    /// Observables pulled back: `(Pφ)_i = Σ_j P_ij φ_j`.
    pub fn pull_back(&self, phi: &[C64]) -> Vec<C64> {
        (0..self.bin_count()).map(|i| self.row(i).map(|(j, p)| phi[j] * p).sum()).collect()
    }

    /// Bin averages of a piecewise function.
    pub fn project(&self, f: &PiecewiseFn) -> Vec<C64> {
        let w = self.bin_width();
        let mut out = vec![C64::new(0.0, 0.0); self.bin_count()];
        for p in f.pieces() {
            let i0 = self.bin_of(p.lo);
            let i1 = self.bin_of(p.hi);
            for (i, o) in out.iter_mut().enumerate().take(i1 + 1).skip(i0) {
                *o += p.integrate(self.edges[i], self.edges[i + 1]) / w;
            }
        }
        out
    }

    /// The bin-constant function with the given bin values.
    pub fn lift(&self, v: &[C64]) -> PiecewiseFn {
        PiecewiseFn::from_pieces(
            v.iter()
                .enumerate()
                .filter(|(_, x)| x.re != 0.0 || x.im != 0.0)
                .map(|(i, &x)| Piece::new(self.edges[i], self.edges[i + 1], vec![Term::new(0, 0.0, x)]))
                .collect(),
        )
    }

    /// `∫ u·v dm` for bin-constant `u`, `v`.
    pub fn pair(&self, u: &[C64], v: &[C64]) -> C64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum::<C64>() * self.bin_width()
    }

    pub fn row_sum_defect(&self) -> f64 {
        (0..self.bin_count())
            .map(|i| (self.row(i).map(|(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn assemble_row(map: &PiecewiseMap, edges: &[f64], i: usize) -> (Vec<(usize, f64)>, f64) {
    let (lo, hi) = (edges[i], edges[i + 1]);
    let n = edges.len() - 1;
    let (a, b) = (edges[0], edges[n]);
    let width = hi - lo;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    let mut err = 0.0;
    for br in map.branches() {
        let (u, v) = (lo.max(br.lo), hi.min(br.hi));
        if v <= u {
            continue;
        }
        let (y0, y1) = (br.eval(u).clamp(a, b), br.eval(v).clamp(a, b));
        let (ylo, yhi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        let j0 = (((ylo - a) / (b - a) * n as f64).floor().max(0.0) as usize).min(n - 1);
        let j1 = (((yhi - a) / (b - a) * n as f64).ceil() as usize).clamp(j0 + 1, n);
        for j in j0..j1 {
            let (s, t) = (ylo.max(edges[j]), yhi.min(edges[j + 1]));
            if t <= s {
                continue;
            }
            let measure = match br.kind {
                BranchKind::Affine { slope, .. } => (t - s) / slope.abs(),
                BranchKind::AffinePlusSine { .. } => {
                    err += 4.0 * f64::EPSILON / width;
                    match (br.inverse(s), br.inverse(t)) {
                        (Some(p), Some(q)) => (q - p).abs(),
                        _ => 0.0,
                    }
                }
            };
            if measure > 0.0 {
                match entries.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += measure / width,
                    None => entries.push((j, measure / width)),
                }
            }
        }
    }
    entries.sort_by_key(|e| e.0);
    (entries, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_two_bins() {
        let u = UlamDiscretization::new(&PiecewiseMap::doubling(), 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(u.entry(i, j), 0.5);
            }
        }
    }

    #[test]
    fn rows_are_stochastic() {
        for map in [PiecewiseMap::swap4(), PiecewiseMap::perturbed_doubling(0.1).unwrap()] {
            let u = UlamDiscretization::new(&map, 500).unwrap();
            assert!(u.row_sum_defect() < 1e-12, "{}", u.row_sum_defect());
            assert!(u.vals.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn mass_is_preserved() {
        let u = UlamDiscretization::new(&PiecewiseMap::perturbed_doubling(0.05).unwrap(), 256).unwrap();
        let d: Vec<C64> = (0..256).map(|i| C64::new((i as f64 * 0.37).sin() + 1.5, 0.0)).collect();
        let e = u.push_forward(&d);
        let s0: C64 = d.iter().sum();
        let s1: C64 = e.iter().sum();
        assert!((s0 - s1).norm() < 1e-10);
    }

    #[test]
    fn too_few_bins() {
        assert!(UlamDiscretization::new(&PiecewiseMap::swap4(), 3).is_err());
    }
}

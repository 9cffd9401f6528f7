use super::ulam::UlamDiscretization;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const SUBSPACE_SEED: u64 = 0x5eed_0001;

/// A peripheral eigenvalue snapped to `exp(2πi k/order)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeripheralEigenvalue {
    pub value: C64,
    pub raw: C64,
    pub k: usize,
    pub order: usize,
    pub multiplicity: usize,
}

impl PeripheralEigenvalue {
    pub fn is_one(&self) -> bool {
        self.order == 1
    }

    pub fn argument(&self) -> f64 {
        TAU * self.k as f64 / self.order as f64
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeripheralSpectrum {
    pub eigenvalues: Vec<PeripheralEigenvalue>,
    pub period: usize,
    /// Ritz values of the dominant block, by decreasing modulus.
    pub ritz: Vec<C64>,
    pub iterations: usize,
}

impl PeripheralSpectrum {
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn values(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }

    pub fn multiplicity_of_one(&self) -> usize {
        self.eigenvalues.iter().find(|e| e.is_one()).map_or(0, |e| e.multiplicity)
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Root of unity of smallest order within `tol` of `z`.
pub fn snap_to_root(z: C64, max_order: usize, tol: f64) -> Option<(usize, usize)> {
    let arg = z.arg().rem_euclid(TAU);
    for d in 1..=max_order {
        let k = ((arg / TAU) * d as f64).round() as usize % d;
        let root = C64::from_polar(1.0, TAU * k as f64 / d as f64);
        if (z - root).norm() < tol {
            return Some((k, d));
        }
    }
    None
}

/// Ritz values of `Pᵀ` on its dominant invariant subspace, by block
/// subspace iteration with Rayleigh–Ritz extraction.
pub fn dominant_ritz_values(ulam: &UlamDiscretization, block: usize, max_iter: usize) -> (Vec<C64>, usize) {
    let n = ulam.bin_count();
    let b = block.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SUBSPACE_SEED);
    let mut q = DMatrix::<f64>::from_fn(n, b, |_, _| rng.gen_range(-1.0..1.0));
    q = q.qr().q();
    let apply = |q: &DMatrix<f64>| -> DMatrix<f64> {
        let mut z = DMatrix::<f64>::zeros(n, q.ncols());
        for c in 0..q.ncols() {
            let col: Vec<f64> = q.column(c).iter().copied().collect();
            let out = ulam.push_forward_real(&col);
            z.set_column(c, &nalgebra::DVector::from_vec(out));
        }
        z
    };
    let mut prev: Vec<C64> = Vec::new();
    let mut iters = 0;
    loop {
        let z = apply(&q);
        iters += 1;
        let check = iters % 5 == 0 || iters >= max_iter || n == b;
        if check {
            let h = q.transpose() * &z;
            let mut ev: Vec<C64> = h.complex_eigenvalues().iter().copied().collect();
            ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.arg().total_cmp(&y.arg())));
            let settled = !prev.is_empty()
                && prev.len() == ev.len()
                && ev.iter().zip(&prev).filter(|(e, _)| e.norm() > 0.5).all(|(e, p)| (e - p).norm() < 1e-13);
            if settled || iters >= max_iter || n == b {
                return (ev, iters);
            }
            prev = ev;
        }
        q = z.qr().q();
    }
}

pub fn peripheral_spectrum(ulam: &UlamDiscretization, gap_tol: f64) -> Result<PeripheralSpectrum> {
    if !(gap_tol > 0.0 && gap_tol < 1.0) {
        return Err(Error::invalid(format!("gap tolerance {gap_tol} not in (0, 1)")));
    }
    let n = ulam.bin_count();
    let (ritz, iterations) = dominant_ritz_values(ulam, 24, 3000);
    let mut eigenvalues: Vec<PeripheralEigenvalue> = Vec::new();
    for &z in ritz.iter().filter(|z| z.norm() > 1.0 - gap_tol) {
        let Some((k, d)) = snap_to_root(z, n, gap_tol) else { continue };
        match eigenvalues.iter_mut().find(|e| e.k == k && e.order == d) {
            Some(e) => e.multiplicity += 1,
            None => eigenvalues.push(PeripheralEigenvalue {
                value: C64::from_polar(1.0, TAU * k as f64 / d as f64),
                raw: z,
                k,
                order: d,
                multiplicity: 1,
            }),
        }
    }
    // Exact values for the real roots.
    for e in &mut eigenvalues {
        if e.order == 1 {
            e.value = C64::new(1.0, 0.0);
        } else if e.order == 2 {
            e.value = C64::new(-1.0, 0.0);
        }
    }
    eigenvalues.sort_by(|x, y| x.argument().total_cmp(&y.argument()));
    if !eigenvalues.first().is_some_and(|e| e.is_one()) {
        return Err(Error::numerical(
            "no eigenvalue near 1 in the Ulam spectrum; refine the discretization",
        ));
    }
    let period = eigenvalues.iter().fold(1, |p, e| lcm(p, e.order));
    Ok(PeripheralSpectrum { eigenvalues, period, ritz, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PiecewiseMap;

    #[test]
    fn snapping() {
        assert_eq!(snap_to_root(C64::new(0.999, 0.001), 100, 0.05), Some((0, 1)));
        assert_eq!(snap_to_root(C64::new(-0.98, 0.01), 100, 0.05), Some((1, 2)));
        assert_eq!(snap_to_root(C64::new(0.0, 1.0), 100, 0.05), Some((1, 4)));
        assert_eq!(lcm(4, 6), 12);
    }

    #[test]
    fn doubling_is_mixing() {
        let u = UlamDiscretization::new(&PiecewiseMap::doubling(), 256).unwrap();
        let s = peripheral_spectrum(&u, 0.05).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.period, 1);
        assert!((s.ritz[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn swap4_four_bins() {
        let u = UlamDiscretization::new(&PiecewiseMap::swap4(), 4).unwrap();
        let s = peripheral_spectrum(&u, 0.05).unwrap();
        let mut all: Vec<f64> = s.ritz.iter().map(|z| z.re).collect();
        all.sort_by(f64::total_cmp);
        let expect = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in all.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{all:?}");
        }
        assert_eq!(s.period, 2);
    }
}

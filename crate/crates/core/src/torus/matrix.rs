use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Integer frequency or lattice vector.
pub type Freq = Vec<i128>;

/// Eigenvalues within this of the unit circle are rejected.
const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Unimodular hyperbolic integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicMatrix {
    n: usize,
    entries: Vec<i64>,
    inverse: Vec<i64>,
    det: i64,
    eigenvalue_moduli: Vec<f64>,
    planar: Option<PlanarSplit>,
}

/// Eigendata of a 2×2 hyperbolic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarSplit {
    pub lambda_s: f64,
    pub lambda_u: f64,
    /// Unit eigenvectors.
    pub v_s: [f64; 2],
    pub v_u: [f64; 2],
}

impl PlanarSplit {
    /// Coordinates `(a, b)` with `w = a·v_s + b·v_u`.
    pub fn coordinates(&self, w: [f64; 2]) -> (f64, f64) {
        let det = self.v_s[0] * self.v_u[1] - self.v_s[1] * self.v_u[0];
        let a = (w[0] * self.v_u[1] - w[1] * self.v_u[0]) / det;
        let b = (self.v_s[0] * w[1] - self.v_s[1] * w[0]) / det;
        (a, b)
    }

    /// `|sin|` of the angle between the eigenlines.
    pub fn sin_angle(&self) -> f64 {
        (self.v_s[0] * self.v_u[1] - self.v_s[1] * self.v_u[0]).abs()
    }
}

fn unit_eigenvector(a: f64, b: f64, c: f64, d: f64, lambda: f64) -> [f64; 2] {
    // Rows of M − λI annihilate v; use the better conditioned one.
    let (x, y) = if b.abs() + (lambda - a).abs() >= c.abs() + (lambda - d).abs() {
        (b, lambda - a)
    } else {
        (lambda - d, c)
    };
    let r = x.hypot(y);
    let s = if x < 0.0 || (x == 0.0 && y < 0.0) { -1.0 } else { 1.0 };
    [s * x / r, s * y / r]
}

fn determinant(n: usize, m: &[i64]) -> i128 {
    if n == 1 {
        return m[0] as i128;
    }
    (0..n)
        .map(|c| {
            let minor: Vec<i64> = (1..n)
                .flat_map(|r| (0..n).filter(move |&cc| cc != c).map(move |cc| (r, cc)))
                .map(|(r, cc)| m[r * n + cc])
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            sign * m[c] as i128 * determinant(n - 1, &minor)
        })
        .sum()
}

impl HyperbolicMatrix {
    pub fn new(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix must be square of size at least 2"));
        }
        let entries: Vec<i64> = rows.iter().flatten().copied().collect();
        let det = determinant(n, &entries);
        if det.abs() != 1 {
            return Err(Error::invalid(format!("|det M| must be 1, got {det}")));
        }
        let inverse: Vec<i64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                // adj(M)[i][j] = (−1)^{i+j} det(minor without row j, column i).
                let minor: Vec<i64> = (0..n)
                    .filter(|&r| r != j)
                    .flat_map(|r| (0..n).filter(move |&c| c != i).map(move |c| (r, c)))
                    .map(|(r, c)| entries[r * n + c])
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let cof = if n == 1 { 1 } else { sign * determinant(n - 1, &minor) };
                i64::try_from(cof * det).map_err(|_| Error::invalid("inverse entries overflow i64"))
            })
            .collect::<Result<_>>()?;
        let fm = DMatrix::from_row_slice(n, n, &entries.iter().map(|&v| v as f64).collect::<Vec<_>>());
        let eig = fm.complex_eigenvalues();
        let moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
        if let Some(z) = eig.iter().find(|z| (z.norm() - 1.0).abs() < UNIT_CIRCLE_TOL) {
            return Err(Error::precondition(format!("eigenvalue {z} lies on the unit circle: M is not hyperbolic")));
        }
        let planar = (n == 2).then(|| {
            let (a, b, c, d) = (entries[0] as f64, entries[1] as f64, entries[2] as f64, entries[3] as f64);
            let tr = a + d;
            let disc = (tr * tr - 4.0 * det as f64).sqrt();
            // Stable root by the product formula, avoiding cancellation.
            let lambda_u = 0.5 * (tr + tr.signum() * disc);
            let lambda_s = det as f64 / lambda_u;
            PlanarSplit {
                lambda_s,
                lambda_u,
                v_s: unit_eigenvector(a, b, c, d, lambda_s),
                v_u: unit_eigenvector(a, b, c, d, lambda_u),
            }
        });
        Ok(HyperbolicMatrix { n, entries, inverse, det: det as i64, eigenvalue_moduli: moduli, planar })
    }

    /// Arnold's cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        Self::new(&[vec![2, 1], vec![1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn inverse_entries(&self) -> &[i64] {
        &self.inverse
    }

    pub fn eigenvalue_moduli(&self) -> &[f64] {
        &self.eigenvalue_moduli
    }

    pub fn planar(&self) -> Option<&PlanarSplit> {
        self.planar.as_ref()
    }

    pub fn require_planar(&self) -> Result<&PlanarSplit> {
        self.planar.as_ref().ok_or_else(|| Error::unsupported(format!("needs a 2×2 matrix, got {0}×{0}", self.n)))
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<Vec<i64>> = (0..self.n).map(|j| (0..self.n).map(|i| self.entries[i * self.n + j]).collect()).collect();
        Self::new(&t).expect("transpose of a hyperbolic matrix is hyperbolic")
    }

    fn apply(&self, m: &[i64], v: &[i128], transpose: bool) -> Result<Freq> {
        if v.len() != self.n {
            return Err(Error::invalid(format!("vector has length {}, expected {}", v.len(), self.n)));
        }
        (0..self.n)
            .map(|i| {
                (0..self.n).try_fold(0i128, |acc, j| {
                    let e = if transpose { m[j * self.n + i] } else { m[i * self.n + j] } as i128;
                    e.checked_mul(v[j]).and_then(|t| acc.checked_add(t))
                })
                .ok_or_else(|| Error::numerical("integer frequency overflowed i128"))
            })
            .collect()
    }

    /// `Mᵏ v` for any integer `k`, in checked `i128`.
    pub fn power_apply(&self, k: i64, v: &[i128]) -> Result<Freq> {
        self.power(k, v, false)
    }

    /// `(Mᵀ)ᵏ v`, the action on frequencies of composition with `fᵏ`.
    pub fn dual_power_apply(&self, k: i64, v: &[i128]) -> Result<Freq> {
        self.power(k, v, true)
    }

    fn power(&self, k: i64, v: &[i128], transpose: bool) -> Result<Freq> {
        let m = if k >= 0 { &self.entries } else { &self.inverse };
        let mut out = v.to_vec();
        for _ in 0..k.unsigned_abs() {
            out = self.apply(m, &out, transpose)?;
        }
        if out.len() != self.n {
            return Err(Error::invalid(format!("vector has length {}, expected {}", v.len(), self.n)));
        }
        Ok(out)
    }

    /// `Mᵏ v` in arbitrary precision.
    pub fn power_apply_big(&self, k: i64, v: &[BigInt]) -> Vec<BigInt> {
        let m = if k >= 0 { &self.entries } else { &self.inverse };
        let mut out = v.to_vec();
        for _ in 0..k.unsigned_abs() {
            out = (0..self.n)
                .map(|i| (0..self.n).map(|j| BigInt::from(m[i * self.n + j]) * &out[j]).sum())
                .collect();
        }
        out
    }

    /// `M x` for real `x`.
    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entries[i * self.n + j] as f64 * x[j]).sum()).collect()
    }
}

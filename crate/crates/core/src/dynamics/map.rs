use crate::error::{Error, Result};
use crate::lateral::{LateralPoint, Side};
use crate::piecewise::AffinePiece;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const IMAGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BranchKind {
    Affine { slope: f64, offset: f64 },
    /// `slope·x + offset + amplitude·sin(2π·frequency·x)`
    AffinePlusSine { slope: f64, offset: f64, amplitude: f64, frequency: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub kind: BranchKind,
}

impl Branch {
    pub fn affine(lo: f64, hi: f64, slope: f64, offset: f64) -> Self {
        Branch { lo, hi, kind: BranchKind::Affine { slope, offset } }
    }

    pub fn affine_plus_sine(lo: f64, hi: f64, slope: f64, offset: f64, amplitude: f64, frequency: f64) -> Self {
        Branch { lo, hi, kind: BranchKind::AffinePlusSine { slope, offset, amplitude, frequency } }
    }

    /// Evaluates the formula of the branch, which extends past its domain.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            BranchKind::Affine { slope, offset } => slope * x + offset,
            BranchKind::AffinePlusSine { slope, offset, amplitude, frequency } => {
                slope * x + offset + amplitude * (TAU * frequency * x).sin()
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            BranchKind::Affine { slope, .. } => slope,
            BranchKind::AffinePlusSine { slope, amplitude, frequency, .. } => {
                slope + TAU * frequency * amplitude * (TAU * frequency * x).cos()
            }
        }
    }

    /// Second derivative, used by distortion estimates.
    pub fn second_derivative(&self, x: f64) -> f64 {
        match self.kind {
            BranchKind::Affine { .. } => 0.0,
            BranchKind::AffinePlusSine { amplitude, frequency, .. } => {
                -(TAU * frequency).powi(2) * amplitude * (TAU * frequency * x).sin()
            }
        }
    }

    pub fn increasing(&self) -> bool {
        self.derivative(0.5 * (self.lo + self.hi)) > 0.0
    }

    pub fn image(&self) -> (f64, f64) {
        let (u, v) = (self.eval(self.lo), self.eval(self.hi));
        if u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn as_affine(&self) -> Option<AffinePiece> {
        match self.kind {
            BranchKind::Affine { slope, offset } => Some(AffinePiece { lo: self.lo, hi: self.hi, slope, offset }),
            BranchKind::AffinePlusSine { .. } => None,
        }
    }

    /// Infimum of `|f'|` on the domain. Exact for affine branches, dense
    /// sampling plus the curvature slack for the sine family.
    pub fn min_abs_derivative(&self) -> f64 {
        match self.kind {
            BranchKind::Affine { slope, .. } => slope.abs(),
            BranchKind::AffinePlusSine { amplitude, frequency, .. } => {
                let n = 4096;
                let h = (self.hi - self.lo) / n as f64;
                let slack = 0.5 * h * (TAU * frequency).powi(2) * amplitude.abs();
                (0..=n)
                    .map(|k| self.derivative(self.lo + k as f64 * h).abs())
                    .fold(f64::INFINITY, f64::min)
                    - slack
            }
        }
    }

    /// Preimage of `y` inside the domain; `None` if `y` is off the image.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        let (ilo, ihi) = self.image();
        if y < ilo - IMAGE_TOL || y > ihi + IMAGE_TOL {
            return None;
        }
        let y = y.clamp(ilo, ihi);
        match self.kind {
            BranchKind::Affine { slope, offset } => Some(((y - offset) / slope).clamp(self.lo, self.hi)),
            BranchKind::AffinePlusSine { .. } => {
                let inc = self.increasing();
                let (mut l, mut r) = (self.lo, self.hi);
                for _ in 0..200 {
                    let m = 0.5 * (l + r);
                    if m <= l || m >= r {
                        break;
                    }
                    if (self.eval(m) < y) == inc {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                // One Newton polish.
                let m = 0.5 * (l + r);
                let x = m - (self.eval(m) - y) / self.derivative(m);
                Some(if x >= self.lo && x <= self.hi { x } else { m })
            }
        }
    }
}

/// Piecewise monotone expanding map of `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMap {
    name: String,
    a: f64,
    b: f64,
    critical: Vec<f64>,
    branches: Vec<Branch>,
    theta: f64,
}

impl PiecewiseMap {
    pub fn new(name: impl Into<String>, branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("map needs at least one branch"));
        }
        for w in branches.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::invalid(format!(
                    "branches must tile the interval: {} != {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        let a = branches[0].lo;
        let b = branches[branches.len() - 1].hi;
        let mut theta = f64::INFINITY;
        for (i, br) in branches.iter().enumerate() {
            if !(br.hi > br.lo) {
                return Err(Error::invalid(format!("branch {i} has empty domain")));
            }
            let d = br.min_abs_derivative();
            if !(d > 1.0) {
                return Err(Error::invalid(format!(
                    "branch {i} on [{}, {}] is not expanding: inf |Df| = {d} <= 1",
                    br.lo, br.hi
                )));
            }
            if let BranchKind::AffinePlusSine { slope, .. } = br.kind {
                // Monotone iff the derivative keeps the sign of the slope.
                let n = 4096;
                let h = (br.hi - br.lo) / n as f64;
                if (0..=n).any(|k| br.derivative(br.lo + k as f64 * h) * slope <= 0.0) {
                    return Err(Error::invalid(format!("branch {i} is not monotone")));
                }
            }
            let (ilo, ihi) = br.image();
            if ilo < a - IMAGE_TOL || ihi > b + IMAGE_TOL {
                return Err(Error::invalid(format!(
                    "branch {i} maps outside [{a}, {b}]: image [{ilo}, {ihi}]"
                )));
            }
            theta = theta.min(d);
        }
        let mut critical: Vec<f64> = branches.iter().map(|br| br.lo).collect();
        critical.push(b);
        Ok(PiecewiseMap { name: name.into(), a, b, critical, branches, theta })
    }

    pub fn doubling() -> Self {
        Self::new("doubling", vec![Branch::affine(0.0, 0.5, 2.0, 0.0), Branch::affine(0.5, 1.0, 2.0, -1.0)])
            .expect("doubling map is valid")
    }

    /// Quarters swap halves: `[0,½)` goes to `[½,1)` and back.
    pub fn swap4() -> Self {
        Self::new(
            "swap4",
            vec![
                Branch::affine(0.0, 0.25, 2.0, 0.5),
                Branch::affine(0.25, 0.5, 2.0, 0.0),
                Branch::affine(0.5, 0.75, 2.0, -1.0),
                Branch::affine(0.75, 1.0, 2.0, -1.5),
            ],
        )
        .expect("swap4 map is valid")
    }

    /// Doubling acting separately on each half.
    pub fn two_component() -> Self {
        Self::new(
            "two-component",
            vec![
                Branch::affine(0.0, 0.25, 2.0, 0.0),
                Branch::affine(0.25, 0.5, 2.0, -0.5),
                Branch::affine(0.5, 0.75, 2.0, -0.5),
                Branch::affine(0.75, 1.0, 2.0, -1.0),
            ],
        )
        .expect("two-component map is valid")
    }

    /// `2x + ε sin(2πx) mod 1`, expanding for `|ε| < 1/(2π)`.
    pub fn perturbed_doubling(eps: f64) -> Result<Self> {
        if eps == 0.0 {
            let mut m = Self::doubling();
            m.name = "perturbed-doubling(0)".into();
            return Ok(m);
        }
        Self::new(
            format!("perturbed-doubling({eps})"),
            vec![
                Branch::affine_plus_sine(0.0, 0.5, 2.0, 0.0, eps, 1.0),
                Branch::affine_plus_sine(0.5, 1.0, 2.0, -1.0, eps, 1.0),
            ],
        )
    }

    /// `k·x mod 1` with `k` full branches.
    pub fn multiply(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("multiplier must be at least 2"));
        }
        let kf = k as f64;
        let branches = (0..k)
            .map(|i| Branch::affine(i as f64 / kf, (i + 1) as f64 / kf, kf, -(i as f64)))
            .collect();
        Self::new(format!("multiply({k})"), branches)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn critical_set(&self) -> &[f64] {
        &self.critical
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn expansion_floor(&self) -> f64 {
        self.theta
    }

    pub fn is_affine(&self) -> bool {
        self.branches.iter().all(|b| b.as_affine().is_some())
    }

    pub fn affine_pieces(&self) -> Option<Vec<AffinePiece>> {
        self.branches.iter().map(Branch::as_affine).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn check_point(&self, p: LateralPoint) -> Result<()> {
        if !self.contains(p.position) || p.position.is_nan() {
            return Err(Error::OutsideInterval { x: p.position, a: self.a, b: self.b });
        }
        if p.position == self.a && p.side == Side::Minus {
            return Err(Error::invalid(format!("{}- is not a point of the doubled interval", self.a)));
        }
        if p.position == self.b && p.side == Side::Plus {
            return Err(Error::invalid(format!("{}+ is not a point of the doubled interval", self.b)));
        }
        Ok(())
    }

    /// Branch used for the one-sided limit at `p`.
    pub fn branch_index(&self, p: LateralPoint) -> Result<usize> {
        self.check_point(p)?;
        let x = p.position;
        let i = match p.side {
            Side::Plus => self.critical.partition_point(|&c| c <= x) - 1,
            Side::Minus => self.critical.partition_point(|&c| c < x) - 1,
        };
        Ok(i.min(self.branches.len() - 1))
    }

    /// Branch containing a generic (non-lateral) point.
    pub fn branch_at(&self, x: f64) -> usize {
        let i = self.critical.partition_point(|&c| c <= x);
        i.saturating_sub(1).min(self.branches.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.branches[self.branch_at(x)].eval(x).clamp(self.a, self.b)
    }

    pub fn eval_lateral(&self, p: LateralPoint) -> Result<LateralPoint> {
        let br = &self.branches[self.branch_index(p)?];
        let y = br.eval(p.position).clamp(self.a, self.b);
        let mut side = p.side.through(br.increasing());
        if y == self.a {
            side = Side::Plus;
        } else if y == self.b {
            side = Side::Minus;
        }
        Ok(LateralPoint::new(y, side))
    }

    pub fn derivative_lateral(&self, p: LateralPoint) -> Result<f64> {
        let br = &self.branches[self.branch_index(p)?];
        Ok(br.derivative(p.position))
    }

    /// `p, f(p), …, fⁿ(p)`.
    pub fn orbit(&self, p: LateralPoint, n: usize) -> Result<Vec<LateralPoint>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(p);
        let mut q = p;
        for _ in 0..n {
            q = self.eval_lateral(q)?;
            out.push(q);
        }
        Ok(out)
    }

    /// `Dfⁿ` along the lateral orbit of `p`.
    pub fn derivative_n(&self, p: LateralPoint, n: usize) -> Result<f64> {
        let mut q = p;
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.derivative_lateral(q)?;
            q = self.eval_lateral(q)?;
        }
        Ok(d)
    }

    /// `fⁿ` along a fixed branch word, using the branch formulas as extensions.
    pub fn iterate_word(&self, word: &[usize], x: f64) -> f64 {
        word.iter().fold(x, |y, &i| self.branches[i].eval(y))
    }

    pub fn derivative_word(&self, word: &[usize], x: f64) -> f64 {
        let mut y = x;
        let mut d = 1.0;
        for &i in word {
            d *= self.branches[i].derivative(y);
            y = self.branches[i].eval(y);
        }
        d
    }

    pub fn is_critical(&self, x: f64) -> bool {
        self.critical.contains(&x)
    }

    /// Composition along a word as `(slope, offset)`, affine maps only.
    pub fn affine_word(&self, word: &[usize]) -> Option<(f64, f64)> {
        let mut s = 1.0;
        let mut o = 0.0;
        for &i in word {
            let br = self.branches[i].as_affine()?;
            s *= br.slope;
            o = br.slope * o + br.offset;
        }
        Some((s, o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_lateral_images() {
        let f = PiecewiseMap::doubling();
        assert_eq!(f.eval_lateral(LateralPoint::minus(0.5)).unwrap(), LateralPoint::minus(1.0));
        assert_eq!(f.eval_lateral(LateralPoint::plus(0.5)).unwrap(), LateralPoint::plus(0.0));
        assert_eq!(f.eval_lateral(LateralPoint::plus(0.0)).unwrap(), LateralPoint::plus(0.0));
        assert_eq!(f.eval_lateral(LateralPoint::minus(1.0)).unwrap(), LateralPoint::minus(1.0));
    }

    #[test]
    fn rejects_points_off_the_doubled_interval() {
        let f = PiecewiseMap::doubling();
        assert!(f.eval_lateral(LateralPoint::minus(0.0)).is_err());
        assert!(f.eval_lateral(LateralPoint::plus(1.0)).is_err());
        assert!(matches!(
            f.eval_lateral(LateralPoint::plus(1.5)),
            Err(Error::OutsideInterval { .. })
        ));
    }

    #[test]
    fn decreasing_branch_flips_side() {
        let f = PiecewiseMap::new(
            "tent",
            vec![Branch::affine(0.0, 0.5, 2.0, 0.0), Branch::affine(0.5, 1.0, -2.0, 2.0)],
        )
        .unwrap();
        assert_eq!(f.eval_lateral(LateralPoint::plus(0.75)).unwrap(), LateralPoint::minus(0.5));
        assert_eq!(f.eval_lateral(LateralPoint::plus(0.5)).unwrap(), LateralPoint::minus(1.0));
    }

    #[test]
    fn validation() {
        assert!(PiecewiseMap::new("x", vec![Branch::affine(0.0, 1.0, 1.0, 0.0)]).is_err());
        assert!(PiecewiseMap::new("x", vec![Branch::affine(0.0, 0.5, 3.0, 0.0)]).is_err());
        assert!(PiecewiseMap::perturbed_doubling(0.2).is_err());
        let f = PiecewiseMap::perturbed_doubling(0.1).unwrap();
        assert!(f.expansion_floor() > 1.0);
        assert!(!f.is_affine());
    }

    #[test]
    fn sine_branch_inverse() {
        let f = PiecewiseMap::perturbed_doubling(0.1).unwrap();
        let br = f.branches()[1];
        for k in 0..=10 {
            let y = k as f64 / 10.0;
            let x = br.inverse(y).unwrap();
            assert!((br.eval(x) - y).abs() < 1e-14);
        }
    }
}

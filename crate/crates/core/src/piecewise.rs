//! Piecewise sums of `c · x^k · exp(2πiνx)`.
//!
//! This family is closed under products, sums, composition with affine maps and
//! the transfer operator of a piecewise affine map, and every member integrates
//! in closed form. Frequencies are stored in cycles per unit length so that the
//! phase `ν·o` of a dyadic offset is reduced modulo one without rounding.

use crate::lateral::Side;
use num_complex::Complex64;
use std::f64::consts::TAU;

pub type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Two breakpoints closer than this (relative to `1 + |x|`) are identified.
pub const BREAKPOINT_TOL: f64 = 1e-14;

/// `exp(2πi t)`, reducing `t` modulo one first and hitting quarter turns exactly.
pub fn cis_cycles(t: f64) -> C64 {
    let r = t - t.round();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else if r.abs() == 0.5 {
        C64::new(-1.0, 0.0)
    } else if r == 0.25 {
        C64::new(0.0, 1.0)
    } else if r == -0.25 {
        C64::new(0.0, -1.0)
    } else {
        let (s, c) = (TAU * r).sin_cos();
        C64::new(c, s)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `∫_0^Δ t^m e^{iωt} dt` for `m = 0..=k`.
fn shifted_moments(k: u32, omega: f64, delta: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let w = omega * delta;
    if w.abs() <= 1.0 {
        let iw = C64::new(0.0, omega);
        for m in 0..=k {
            let mut sum = ZERO;
            let mut pow = C64::new(delta.powi(m as i32 + 1), 0.0);
            let mut fact = 1.0;
            for n in 0..60u32 {
                if n > 0 {
                    pow *= iw * delta;
                    fact *= n as f64;
                }
                let term = pow / (fact * (m + n + 1) as f64);
                sum += term;
                if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
                    break;
                }
            }
            out.push(sum);
        }
    } else {
        let e = C64::new(w.cos(), w.sin());
        let half = 0.5 * w;
        let em1 = C64::new(-2.0 * half.sin() * half.sin(), w.sin());
        let inv_iw = C64::new(0.0, -1.0 / omega);
        let mut prev = em1 * inv_iw;
        out.push(prev);
        for m in 1..=k {
            let next = (e * delta.powi(m as i32) - prev * m as f64) * inv_iw;
            out.push(next);
            prev = next;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub power: u32,
    pub nu: f64,
    pub coef: C64,
}

impl Term {
    pub fn new(power: u32, nu: f64, coef: C64) -> Self {
        Term { power, nu, coef }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coef * x.powi(self.power as i32) * cis_cycles(self.nu * x)
    }

    pub fn integrate(&self, lo: f64, hi: f64) -> C64 {
        if hi <= lo {
            return ZERO;
        }
        let k = self.power;
        let delta = hi - lo;
        let moments = shifted_moments(k, TAU * self.nu, delta);
        let mut acc = ZERO;
        for m in 0..=k {
            acc += moments[m as usize] * (binomial(k, m) * lo.powi((k - m) as i32));
        }
        self.coef * cis_cycles(self.nu * lo) * acc
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.power == other.power && nu_eq(self.nu, other.nu)
    }

    fn is_constant(&self) -> bool {
        self.power == 0 && self.nu == 0.0
    }
}

fn nu_eq(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-13 * a.abs().max(b.abs())
}

/// Combine terms of equal shape; sums that cancel to rounding level become 0.
fn normalize_terms(mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| a.power.cmp(&b.power).then(a.nu.total_cmp(&b.nu)));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    let mut mags: Vec<f64> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(last) = out.last_mut() {
            if last.same_shape(&t) {
                last.coef += t.coef;
                *mags.last_mut().unwrap() += t.coef.norm();
                continue;
            }
        }
        mags.push(t.coef.norm());
        out.push(t);
    }
    out.into_iter()
        .zip(mags)
        .filter_map(|(mut t, mag)| {
            let eps = 8.0 * f64::EPSILON * mag;
            if t.coef.re.abs() <= eps {
                t.coef.re = 0.0;
            }
            if t.coef.im.abs() <= eps {
                t.coef.im = 0.0;
            }
            if t.coef.re == 0.0 && t.coef.im == 0.0 {
                None
            } else {
                Some(t)
            }
        })
        .collect()
}

fn terms_match(a: &[Term], b: &[Term]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(s, t)| {
            s.same_shape(t)
                && (s.coef - t.coef).norm() <= 1e-13 * s.coef.norm().max(t.coef.norm())
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, terms: Vec<Term>) -> Self {
        Piece { lo, hi, terms }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn integrate(&self, lo: f64, hi: f64) -> C64 {
        let (l, h) = (lo.max(self.lo), hi.min(self.hi));
        if h <= l {
            return ZERO;
        }
        self.terms.iter().map(|t| t.integrate(l, h)).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(Term::is_constant)
    }

    /// Variation inside the open piece, exact for constants and sampled otherwise.
    fn inner_variation(&self) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let width = self.hi - self.lo;
        let max_nu = self.terms.iter().map(|t| t.nu.abs()).fold(0.0, f64::max);
        let max_pow = self.terms.iter().map(|t| t.power).max().unwrap_or(0);
        let n = (64.0 + 64.0 * max_nu * width + 16.0 * max_pow as f64).min(8192.0) as usize;
        let mut prev = self.eval(self.lo);
        let mut total = 0.0;
        for i in 1..=n {
            let x = self.lo + width * i as f64 / n as f64;
            let v = self.eval(x);
            total += (v - prev).norm();
            prev = v;
        }
        total
    }
}

/// Finite sum of pieces with disjoint interiors, sorted by position.
/// Outside the pieces the function is zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PiecewiseFn {
    pieces: Vec<Piece>,
}

impl PiecewiseFn {
    pub fn zero() -> Self {
        PiecewiseFn { pieces: Vec::new() }
    }

    pub fn constant(lo: f64, hi: f64, value: C64) -> Self {
        Self::from_pieces(vec![Piece::new(lo, hi, vec![Term::new(0, 0.0, value)])])
    }

    pub fn indicator(lo: f64, hi: f64) -> Self {
        Self::constant(lo, hi, C64::new(1.0, 0.0))
    }

    /// Builds from pieces that may overlap; overlapping parts are summed.
    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        let pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.hi > p.lo).collect();
        if pieces.is_empty() {
            return Self::zero();
        }
        let mut cuts: Vec<f64> = pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        cuts.sort_by(f64::total_cmp);
        let mut grid: Vec<f64> = Vec::with_capacity(cuts.len());
        for c in cuts {
            match grid.last() {
                Some(&last) if c - last <= BREAKPOINT_TOL * (1.0 + c.abs()) => {}
                _ => grid.push(c),
            }
        }
        let locate = |x: f64| -> usize {
            let i = grid.partition_point(|&g| g < x);
            if i == grid.len() {
                return i - 1;
            }
            if i > 0 && (x - grid[i - 1]).abs() < (grid[i] - x).abs() {
                i - 1
            } else {
                i
            }
        };
        let mut buckets: Vec<Vec<Term>> = vec![Vec::new(); grid.len().saturating_sub(1)];
        for p in &pieces {
            let (i, j) = (locate(p.lo), locate(p.hi));
            for bucket in buckets.iter_mut().take(j).skip(i) {
                bucket.extend(p.terms.iter().cloned());
            }
        }
        let raw = buckets
            .into_iter()
            .enumerate()
            .map(|(e, terms)| Piece::new(grid[e], grid[e + 1], normalize_terms(terms)))
            .collect();
        let mut f = PiecewiseFn { pieces: raw };
        f.compact();
        f
    }

    /// Drops empty pieces and fuses neighbours carrying the same terms.
    fn compact(&mut self) {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            if p.terms.is_empty() {
                continue;
            }
            if let Some(last) = out.last_mut() {
                if last.hi == p.lo && terms_match(&last.terms, &p.terms) {
                    last.hi = p.hi;
                    continue;
                }
            }
            out.push(p);
        }
        self.pieces = out;
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn support_hull(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    pub fn eval_side(&self, x: f64, side: Side) -> C64 {
        let idx = match side {
            Side::Plus => {
                let i = self.pieces.partition_point(|p| p.lo <= x);
                if i == 0 {
                    return ZERO;
                }
                let p = &self.pieces[i - 1];
                if x < p.hi {
                    Some(i - 1)
                } else {
                    None
                }
            }
            Side::Minus => {
                let i = self.pieces.partition_point(|p| p.lo < x);
                if i == 0 {
                    return ZERO;
                }
                let p = &self.pieces[i - 1];
                if x <= p.hi {
                    Some(i - 1)
                } else {
                    None
                }
            }
        };
        idx.map_or(ZERO, |i| self.pieces[i].eval(x))
    }

    /// Value with the right-continuous convention, falling back to the left
    /// limit at the right end of the support.
    pub fn eval(&self, x: f64) -> C64 {
        if let Some(last) = self.pieces.last() {
            if x == last.hi {
                return self.eval_side(x, Side::Minus);
            }
        }
        self.eval_side(x, Side::Plus)
    }

    pub fn integral(&self) -> C64 {
        self.pieces.iter().map(|p| p.integrate(p.lo, p.hi)).sum()
    }

    pub fn integral_over(&self, lo: f64, hi: f64) -> C64 {
        self.pieces
            .iter()
            .filter(|p| p.hi > lo && p.lo < hi)
            .map(|p| p.integrate(lo, hi))
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == ZERO {
            return Self::zero();
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Piece::new(
                    p.lo,
                    p.hi,
                    p.terms.iter().map(|t| Term::new(t.power, t.nu, t.coef * c)).collect(),
                )
            })
            .collect();
        PiecewiseFn { pieces }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut all = self.pieces.clone();
        all.extend(other.pieces.iter().cloned());
        Self::from_pieces(all)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn conj(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Piece::new(
                    p.lo,
                    p.hi,
                    normalize_terms(
                        p.terms.iter().map(|t| Term::new(t.power, -t.nu, t.coef.conj())).collect(),
                    ),
                )
            })
            .collect();
        PiecewiseFn { pieces }
    }

    /// Piecewise derivative, ignoring jumps.
    pub fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut terms = Vec::new();
                for t in &p.terms {
                    if t.power > 0 {
                        terms.push(Term::new(t.power - 1, t.nu, t.coef * t.power as f64));
                    }
                    if t.nu != 0.0 {
                        terms.push(Term::new(t.power, t.nu, t.coef * C64::new(0.0, TAU * t.nu)));
                    }
                }
                Piece::new(p.lo, p.hi, normalize_terms(terms))
            })
            .collect();
        Self::from_pieces(pieces)
    }

    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let (l, h) = (p.lo.max(lo), p.hi.min(hi));
                (h > l).then(|| Piece::new(l, h, p.terms.clone()))
            })
            .collect();
        let mut f = PiecewiseFn { pieces };
        f.compact();
        f
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (p, q) = (&self.pieces[i], &other.pieces[j]);
            let (lo, hi) = (p.lo.max(q.lo), p.hi.min(q.hi));
            if hi > lo {
                let mut terms = Vec::with_capacity(p.terms.len() * q.terms.len());
                for s in &p.terms {
                    for t in &q.terms {
                        terms.push(Term::new(s.power + t.power, s.nu + t.nu, s.coef * t.coef));
                    }
                }
                out.push(Piece::new(lo, hi, normalize_terms(terms)));
            }
            if p.hi <= q.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        let mut f = PiecewiseFn { pieces: out };
        f.compact();
        f
    }

    /// `∫ self · other dm` without building the product.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (p, q) = (&self.pieces[i], &other.pieces[j]);
            let (lo, hi) = (p.lo.max(q.lo), p.hi.min(q.hi));
            if hi > lo {
                for s in &p.terms {
                    for t in &q.terms {
                        acc += Term::new(s.power + t.power, s.nu + t.nu, s.coef * t.coef)
                            .integrate(lo, hi);
                    }
                }
            }
            if p.hi <= q.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                if p.is_constant() {
                    p.eval(p.lo).norm() * (p.hi - p.lo)
                } else {
                    let n = 256;
                    let h = (p.hi - p.lo) / n as f64;
                    (0..n).map(|k| p.eval(p.lo + (k as f64 + 0.5) * h).norm() * h).sum::<f64>()
                }
            })
            .sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                if p.is_constant() {
                    p.eval(p.lo).norm()
                } else {
                    let n = 256;
                    (0..=n)
                        .map(|k| p.eval(p.lo + (p.hi - p.lo) * k as f64 / n as f64).norm())
                        .fold(0.0, f64::max)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Total variation on `[a, b]`, counting jumps to zero at support edges
    /// strictly inside the interval.
    pub fn variation(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let mut prev_hi: Option<(f64, C64)> = None;
        for p in &self.pieces {
            let left = p.eval(p.lo);
            match prev_hi {
                Some((h, v)) if h == p.lo => total += (left - v).norm(),
                Some((h, v)) => {
                    if h < b {
                        total += v.norm();
                    }
                    if p.lo > a {
                        total += left.norm();
                    }
                }
                None => {
                    if p.lo > a {
                        total += left.norm();
                    }
                }
            }
            total += p.inner_variation();
            prev_hi = Some((p.hi, p.eval(p.hi)));
        }
        if let Some((h, v)) = prev_hi {
            if h < b {
                total += v.norm();
            }
        }
        total
    }

    pub fn bv_norm(&self, a: f64, b: f64) -> f64 {
        self.variation(a, b) + self.l1_norm()
    }

    /// Transfer operator of a piecewise affine map given as
    /// `(lo, hi, slope, offset)` branches.
    pub fn transfer_affine(&self, branches: &[AffinePiece]) -> Self {
        let mut out = Vec::new();
        for br in branches {
            let inv = 1.0 / br.slope;
            let weight = inv.abs();
            for p in &self.pieces {
                let (u, v) = (p.lo.max(br.lo), p.hi.min(br.hi));
                if v <= u {
                    continue;
                }
                let (y0, y1) = (br.apply(u), br.apply(v));
                let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
                let mut terms = Vec::new();
                for t in &p.terms {
                    let nu = t.nu * inv;
                    let base = t.coef * cis_cycles(-nu * br.offset) * weight * inv.powi(t.power as i32);
                    for m in 0..=t.power {
                        let c = base * binomial(t.power, m) * (-br.offset).powi((t.power - m) as i32);
                        terms.push(Term::new(m, nu, c));
                    }
                }
                out.push(Piece::new(lo, hi, normalize_terms(terms)));
            }
        }
        Self::from_pieces(out)
    }

    /// `self ∘ f` for a piecewise affine `f`.
    pub fn compose_affine(&self, branches: &[AffinePiece]) -> Self {
        let mut out = Vec::new();
        for br in branches {
            let (y0, y1) = (br.apply(br.lo), br.apply(br.hi));
            let (ilo, ihi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            for p in &self.pieces {
                let (u, v) = (p.lo.max(ilo), p.hi.min(ihi));
                if v <= u {
                    continue;
                }
                let (x0, x1) = (br.invert(u), br.invert(v));
                let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
                let (lo, hi) = (lo.max(br.lo), hi.min(br.hi));
                if hi <= lo {
                    continue;
                }
                let mut terms = Vec::new();
                for t in &p.terms {
                    let nu = t.nu * br.slope;
                    let base = t.coef * cis_cycles(t.nu * br.offset);
                    for m in 0..=t.power {
                        let c = base
                            * binomial(t.power, m)
                            * br.slope.powi(m as i32)
                            * br.offset.powi((t.power - m) as i32);
                        terms.push(Term::new(m, nu, c));
                    }
                }
                out.push(Piece::new(lo, hi, normalize_terms(terms)));
            }
        }
        Self::from_pieces(out)
    }
}

/// Affine branch `x ↦ slope·x + offset` on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffinePiece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub offset: f64,
}

impl AffinePiece {
    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.offset
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.offset) / self.slope
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn cos_fn(lo: f64, hi: f64, q: f64) -> PiecewiseFn {
        PiecewiseFn::from_pieces(vec![Piece::new(
            lo,
            hi,
            vec![Term::new(0, q, c(0.5)), Term::new(0, -q, c(0.5))],
        )])
    }

    fn doubling() -> Vec<AffinePiece> {
        vec![
            AffinePiece { lo: 0.0, hi: 0.5, slope: 2.0, offset: 0.0 },
            AffinePiece { lo: 0.5, hi: 1.0, slope: 2.0, offset: -1.0 },
        ]
    }

    #[test]
    fn integrates_cosine_quarter() {
        let f = cos_fn(0.0, 1.0, 1.0);
        assert!((f.integral_over(0.0, 0.25).re - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(f.integral().norm() < 1e-16);
    }

    #[test]
    fn integrates_polynomial_with_frequency() {
        // ∫_0^1 x e^{2πix} dx = 1/(2πi)
        let t = Term::new(1, 1.0, c(1.0));
        let v = t.integrate(0.0, 1.0);
        assert!((v - C64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-15);
        // short interval far from the origin
        let t = Term::new(2, 3.0, c(1.0));
        let (lo, hi) = (0.7, 0.7 + 1e-9);
        let expect = t.eval(0.5 * (lo + hi)) * (hi - lo);
        let got = t.integrate(lo, hi);
        assert!((got - expect).norm() < 1e-12 * expect.norm(), "{got} vs {expect}");
    }

    #[test]
    fn transfer_kills_first_harmonic() {
        let lf = cos_fn(0.0, 1.0, 1.0).transfer_affine(&doubling());
        assert!(lf.is_zero(), "{lf:?}");
    }

    #[test]
    fn transfer_halves_frequency() {
        let lf = cos_fn(0.0, 1.0, 2.0).transfer_affine(&doubling());
        let want = cos_fn(0.0, 1.0, 1.0);
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert!((lf.eval(x) - want.eval(x)).norm() < 1e-15);
        }
        assert_eq!(lf.piece_count(), 1);
    }

    #[test]
    fn compose_doubles_frequency() {
        let g = cos_fn(0.0, 1.0, 1.0).compose_affine(&doubling());
        assert_eq!(g.piece_count(), 1);
        assert!((g.eval(0.1).re - (4.0 * PI * 0.1).cos()).abs() < 1e-15);
    }

    #[test]
    fn lateral_evaluation_at_piece_boundary() {
        let f = PiecewiseFn::from_pieces(vec![
            Piece::new(0.0, 0.5, vec![Term::new(0, 0.0, c(1.0))]),
            Piece::new(0.5, 1.0, vec![Term::new(0, 0.0, c(-1.0))]),
        ]);
        assert_eq!(f.eval_side(0.5, Side::Minus).re, 1.0);
        assert_eq!(f.eval_side(0.5, Side::Plus).re, -1.0);
        assert_eq!(f.eval(1.0).re, -1.0);
        assert_eq!(f.variation(0.0, 1.0), 2.0);
    }

    #[test]
    fn overlapping_pieces_sum() {
        let f = PiecewiseFn::indicator(0.0, 0.75).add(&PiecewiseFn::indicator(0.25, 1.0));
        assert_eq!(f.piece_count(), 3);
        assert_eq!(f.eval(0.5).re, 2.0);
        assert!((f.integral().re - 1.5).abs() < 1e-15);
    }

    #[test]
    fn variation_of_interior_indicator() {
        let f = PiecewiseFn::indicator(0.25, 0.5);
        assert_eq!(f.variation(0.0, 1.0), 2.0);
        assert_eq!(PiecewiseFn::indicator(0.0, 0.5).variation(0.0, 1.0), 1.0);
        assert_eq!(PiecewiseFn::indicator(0.0, 1.0).variation(0.0, 1.0), 0.0);
    }

    #[test]
    fn product_and_inner_agree() {
        let f = cos_fn(0.0, 1.0, 1.0);
        let g = cos_fn(0.0, 1.0, 1.0).add(&PiecewiseFn::indicator(0.0, 0.3));
        let a = f.mul(&g).integral();
        let b = f.inner(&g);
        assert!((a - b).norm() < 1e-15);
        let expect = 0.5 + (2.0 * PI * 0.3).sin() / (2.0 * PI);
        assert!((a.re - expect).abs() < 1e-14);
    }
}

use super::routes::{CorrelationStream, PreparedRoute, RouteRegistry};
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use crate::system::{IntervalSystem, ORTHOGONALITY_TOL};
use crate::transfer::discrete_bv;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BirkhoffOptions {
    /// Route name in the registry, or `"auto"`.
    pub route: String,
    /// Target for the tail bound.
    pub tol: f64,
    pub max_blocks: usize,
    pub orthogonality_tol: f64,
    /// Block length; `0` means the period of the map.
    pub block: usize,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        BirkhoffOptions {
            route: "auto".into(),
            tol: 1e-8,
            max_blocks: 10_000,
            orthogonality_tol: ORTHOGONALITY_TOL,
            block: 0,
        }
    }
}

/// `Σ_k ∫γ·(Σ_{j<p} φ∘f^{kp+j}) dm`, summed until the tail bound is met.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub value: C64,
    /// Truncation index `i₀`, a multiple of `p`.
    pub i0: usize,
    pub blocks: usize,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveEvaluation {
    pub x: f64,
    pub value: C64,
    pub i0: usize,
    pub blocks: usize,
    pub tail_bound: f64,
}

/// The Birkhoff sum distribution of one observable over one system.
pub struct Birkhoff<'a> {
    sys: &'a IntervalSystem,
    phi: PiecewiseFn,
    route: Box<dyn PreparedRoute + 'a>,
    p: usize,
    phi_sup: f64,
    opts: BirkhoffOptions,
}

impl<'a> Birkhoff<'a> {
    /// An infinite `orthogonality_tol` skips the precondition check.
    pub fn new(sys: &'a IntervalSystem, phi: &PiecewiseFn, registry: &RouteRegistry, opts: &BirkhoffOptions) -> Result<Self> {
        if opts.orthogonality_tol.is_finite() {
            sys.check_orthogonal(phi, opts.orthogonality_tol)?;
        }
        let period = sys.period();
        let p = if opts.block == 0 { period } else { opts.block };
        if p % period != 0 {
            return Err(Error::invalid(format!("block length {p} is not a multiple of the period {period}")));
        }
        if !(opts.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        let route = registry.resolve(&opts.route, sys)?.prepare(sys, phi)?;
        Ok(Birkhoff { sys, phi: phi.clone(), route, p, phi_sup: phi.sup_norm(), opts: opts.clone() })
    }

    /// Block length 1 regardless of the period; for raw correlation sums.
    pub(crate) fn new_unblocked(
        sys: &'a IntervalSystem,
        phi: &PiecewiseFn,
        registry: &RouteRegistry,
        opts: &BirkhoffOptions,
    ) -> Result<Self> {
        let route = registry.resolve(&opts.route, sys)?.prepare(sys, phi)?;
        Ok(Birkhoff { sys, phi: phi.clone(), route, p: 1, phi_sup: phi.sup_norm(), opts: opts.clone() })
    }

    pub fn system(&self) -> &'a IntervalSystem {
        self.sys
    }

    pub fn observable(&self) -> &PiecewiseFn {
        &self.phi
    }

    pub fn block_length(&self) -> usize {
        self.p
    }

    pub fn route_name(&self) -> &'static str {
        self.route.route_name()
    }

    pub fn options(&self) -> &BirkhoffOptions {
        &self.opts
    }

    /// `(ln|γ|_BV − ln|γ|_{L¹}) / (−ln c)` with `c` the per-step contraction.
    pub fn truncation_formula(&self, gamma: &PiecewiseFn) -> f64 {
        let (a, b) = self.sys.interval();
        let l1 = gamma.l1_norm();
        let bv = gamma.bv_norm(a, b);
        if l1 == 0.0 || bv <= l1 {
            return 0.0;
        }
        (bv.ln() - l1.ln()) / -self.sys.lasota_yorke().per_step.ln()
    }

    /// Smallest multiple of `p` at which `c^{i₀}|γ|_BV ≤ |γ|_{L¹}`.
    pub fn truncation_index(&self, gamma: &PiecewiseFn) -> usize {
        let t = self.truncation_formula(gamma);
        let p = self.p as f64;
        ((t / p).ceil() * p) as usize
    }

    /// BV size of `γ` as seen by `K`: its own norm plus that of its discrete
    /// `Φ₁` part.
    pub fn tail_scale(&self, gamma: &PiecewiseFn) -> f64 {
        let (a, b) = self.sys.interval();
        let u = self.sys.ulam();
        let fixed = self.sys.decomposition().projector_one().apply(&u.project(gamma));
        gamma.bv_norm(a, b) + discrete_bv(&fixed, u.bin_width())
    }

    /// Bound on everything after `blocks` blocks.
    pub fn tail_bound(&self, gamma_scale: f64, blocks: usize) -> f64 {
        self.phi_sup * gamma_scale * self.sys.tail_sum_from(blocks * self.p)
    }

    /// The raw sequence `c_i = ∫φ·Lⁱγ dm`.
    pub fn stream(&self, gamma: &PiecewiseFn) -> Result<Box<dyn CorrelationStream + '_>> {
        self.route.stream(gamma)
    }

    pub fn observable_sup(&self) -> f64 {
        self.phi_sup
    }

    /// `c_i = ∫φ·Lⁱγ dm` for `i < count`.
    pub fn correlations(&self, gamma: &PiecewiseFn, count: usize) -> Result<Vec<C64>> {
        let mut s = self.route.stream(gamma)?;
        (0..count).map(|_| s.next_term()).collect()
    }

    /// The first `count` block sums.
    pub fn block_sums(&self, gamma: &PiecewiseFn, count: usize) -> Result<Vec<C64>> {
        let c = self.correlations(gamma, count * self.p)?;
        Ok(c.chunks(self.p).map(|w| w.iter().sum()).collect())
    }

    pub fn pair_with_bv(&self, gamma: &PiecewiseFn) -> Result<Pairing> {
        self.pair_with_tol(gamma, self.opts.tol)
    }

    pub fn pair_with_tol(&self, gamma: &PiecewiseFn, tol: f64) -> Result<Pairing> {
        let i0 = self.truncation_index(gamma);
        if gamma.is_zero() || self.phi.is_zero() {
            return Ok(Pairing { value: C64::new(0.0, 0.0), i0, blocks: 0, tail_bound: 0.0 });
        }
        let scale = self.tail_scale(gamma);
        let mut s = self.route.stream(gamma)?;
        let mut value = C64::new(0.0, 0.0);
        let mut blocks = 0;
        loop {
            let mut block = C64::new(0.0, 0.0);
            for _ in 0..self.p {
                block += s.next_term()?;
            }
            value += block;
            blocks += 1;
            let bound = self.tail_bound(scale, blocks);
            if blocks * self.p >= i0 && bound < tol {
                return Ok(Pairing { value, i0, blocks, tail_bound: bound });
            }
            if blocks >= self.opts.max_blocks {
                return Err(Error::numerical(format!(
                    "tail bound {bound:.3e} still above {tol:.1e} after {blocks} blocks"
                )));
            }
        }
    }

    /// `ψ(x) = Σ_k ∫1_{[a,x]}·(block k) dm`.
    pub fn primitive(&self, x: f64) -> Result<PrimitiveEvaluation> {
        let gamma = self.segment(x)?;
        let r = self.pair_with_bv(&gamma)?;
        Ok(PrimitiveEvaluation { x, value: r.value, i0: r.i0, blocks: r.blocks, tail_bound: r.tail_bound })
    }

    pub fn primitive_grid(&self, xs: &[f64]) -> Result<Vec<PrimitiveEvaluation>> {
        xs.par_iter().map(|&x| self.primitive(x)).collect()
    }

    /// `ψ_n(x)`: blocks `0..=n` only.
    pub fn primitive_partial(&self, x: f64, n: usize) -> Result<C64> {
        let gamma = self.segment(x)?;
        Ok(self.block_sums(&gamma, n + 1)?.into_iter().sum())
    }

    /// `ψ(y) − ψ(x)` for `x < y`, as one pairing.
    pub fn increment(&self, x: f64, y: f64, tol: f64) -> Result<C64> {
        if y <= x {
            return Err(Error::invalid(format!("increment needs x < y, got [{x}, {y}]")));
        }
        self.check_in(x)?;
        self.check_in(y)?;
        Ok(self.pair_with_tol(&PiecewiseFn::indicator(x, y), tol)?.value)
    }

    /// `Σᵢ γ(mᵢ)(ψ(xᵢ₊₁) − ψ(xᵢ))` over `2^level` dyadic cells, a Riemann–Stieltjes
    /// stand-in for `∫γ dψ`.
    pub fn stieltjes_pairing(&self, gamma: &PiecewiseFn, level: u32) -> Result<C64> {
        let (a, b) = self.sys.interval();
        let n = 1usize << level;
        let h = (b - a) / n as f64;
        let terms: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let lo = a + i as f64 * h;
                let d = self.pair_with_bv(&PiecewiseFn::indicator(lo, lo + h))?.value;
                Ok(gamma.eval(lo + 0.5 * h) * d)
            })
            .collect::<Result<_>>()?;
        Ok(terms.into_iter().sum())
    }

    fn check_in(&self, x: f64) -> Result<()> {
        let (a, b) = self.sys.interval();
        if x < a || x > b {
            return Err(Error::OutsideInterval { x, a, b });
        }
        Ok(())
    }

    fn segment(&self, x: f64) -> Result<PiecewiseFn> {
        self.check_in(x)?;
        let a = self.sys.interval().0;
        Ok(PiecewiseFn::indicator(a, x))
    }
}

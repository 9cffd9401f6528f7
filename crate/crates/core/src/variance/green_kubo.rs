use crate::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};
use crate::system::{IntervalSystem, ORTHOGONALITY_TOL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VarianceOptions {
    pub route: String,
    /// The `K`-series stops once its tail bound is below this.
    pub tail_tol: f64,
    pub orthogonality_tol: f64,
    pub max_terms: usize,
}

impl Default for VarianceOptions {
    fn default() -> Self {
        VarianceOptions { route: "auto".into(), tail_tol: 1e-10, orthogonality_tol: ORTHOGONALITY_TOL, max_terms: 100_000 }
    }
}

/// `Σ_{λ≠1} a_λ/(1−λ) + Σᵢ (cᵢ − Σ_λ λⁱ a_λ)`, the regularized value of
/// `Σᵢ ∫φ·Lⁱγ dm`, with `a_λ = ∫φ·Φ_λγ dm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSum {
    pub projector_part: C64,
    pub tail_part: C64,
    pub terms: usize,
    pub tail_bound: f64,
}

impl RegularizedSum {
    pub fn value(&self) -> C64 {
        self.projector_part + self.tail_part
    }
}

/// The three pieces of one variance, for auditing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenKuboLedger {
    /// `2Re Σ_{λ≠1} a_λ/(1−λ)`.
    pub projector_terms: f64,
    /// `2Re Σᵢ ∫φKⁱ(φ̄ρ) dm`.
    pub tail_terms: f64,
    /// `−∫|φ|²ρ dm`.
    pub square_term: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

impl GreenKuboLedger {
    pub fn total(&self) -> f64 {
        self.projector_terms + self.tail_terms + self.square_term
    }
}

pub(crate) fn regularized_sum(
    sys: &IntervalSystem,
    phi: &PiecewiseFn,
    gamma: &PiecewiseFn,
    opts: &VarianceOptions,
) -> Result<RegularizedSum> {
    let zero = C64::new(0.0, 0.0);
    if phi.is_zero() || gamma.is_zero() {
        return Ok(RegularizedSum { projector_part: zero, tail_part: zero, terms: 0, tail_bound: 0.0 });
    }
    let bopts = BirkhoffOptions {
        route: opts.route.clone(),
        orthogonality_tol: f64::INFINITY,
        block: 1,
        ..Default::default()
    };
    let b = Birkhoff::new_unblocked(sys, phi, &RouteRegistry::default(), &bopts)?;
    let peripheral = sys.peripheral_pairings(phi, gamma);
    let one = C64::new(1.0, 0.0);
    let projector_part: C64 = peripheral.iter().map(|(l, a)| a / (one - l)).sum();
    let scale = b.tail_scale(gamma);
    let mut s = b.stream(gamma)?;
    let mut powers: Vec<C64> = vec![one; peripheral.len()];
    let mut tail = zero;
    for i in 0..opts.max_terms {
        let mut t = s.next_term()?;
        for ((l, a), pw) in peripheral.iter().zip(powers.iter_mut()) {
            t -= *pw * a;
            *pw *= l;
        }
        tail += t;
        let bound = b.observable_sup() * scale * sys.tail_sum_from(i + 1);
        if bound < opts.tail_tol {
            return Ok(RegularizedSum { projector_part, tail_part: tail, terms: i + 1, tail_bound: bound });
        }
    }
    Err(Error::numerical(format!("K-series did not reach tail bound {:.1e} in {} terms", opts.tail_tol, opts.max_terms)))
}

fn check_component_mean(sys: &IntervalSystem, phi: &PiecewiseFn, l: usize, tol: f64) -> Result<()> {
    let m = sys.component_means(phi)[l];
    if m.norm() > tol {
        return Err(Error::precondition(format!(
            "observable is not centered on component {}: ∫φρ dm = {:.3e}",
            l + 1,
            m.re
        )));
    }
    Ok(())
}

/// Green–Kubo variance against the density `ρ`.
fn sigma2_with_density(sys: &IntervalSystem, phi: &PiecewiseFn, rho: &PiecewiseFn, opts: &VarianceOptions) -> Result<GreenKuboLedger> {
    let gamma = phi.conj().mul(rho);
    let s = regularized_sum(sys, phi, &gamma, opts)?;
    Ok(GreenKuboLedger {
        projector_terms: 2.0 * s.projector_part.re,
        tail_terms: 2.0 * s.tail_part.re,
        square_term: -phi.inner(&gamma).re,
        terms: s.terms,
        tail_bound: s.tail_bound,
    })
}

/// `σ²_{μ_ℓ}(φ)`.
pub fn sigma2_component(sys: &IntervalSystem, phi: &PiecewiseFn, l: usize, opts: &VarianceOptions) -> Result<GreenKuboLedger> {
    if l >= sys.ergodic().count() {
        return Err(Error::invalid(format!("component {} does not exist; there are {}", l + 1, sys.ergodic().count())));
    }
    check_component_mean(sys, phi, l, opts.orthogonality_tol)?;
    sigma2_with_density(sys, phi, &sys.ergodic().density_fn(l), opts)
}

/// `σ²_m(φ)`, computed against `Φ₁(1)` independently of the components.
pub fn sigma2_m(sys: &IntervalSystem, phi: &PiecewiseFn, opts: &VarianceOptions) -> Result<GreenKuboLedger> {
    sys.check_orthogonal(phi, opts.orthogonality_tol)?;
    sigma2_with_density(sys, phi, &sys.ergodic().invariant_density_fn(), opts)
}

/// `σ_ρ(φ, ψ) = Σᵢ ∫ψ̄Lⁱ(φρ) + Σᵢ ∫φLⁱ(ψ̄ρ) − ∫φψ̄ρ`, both sums regularized.
fn form_with_density(sys: &IntervalSystem, phi: &PiecewiseFn, psi: &PiecewiseFn, rho: &PiecewiseFn, opts: &VarianceOptions) -> Result<C64> {
    let psi_bar = psi.conj();
    let a = regularized_sum(sys, &psi_bar, &phi.mul(rho), opts)?;
    let b = regularized_sum(sys, phi, &psi_bar.mul(rho), opts)?;
    Ok(a.value() + b.value() - phi.inner(&psi_bar.mul(rho)))
}

/// The hermitian form `σ_m(φ, ψ)`, linear in `φ`.
pub fn sigma_m(sys: &IntervalSystem, phi: &PiecewiseFn, psi: &PiecewiseFn, opts: &VarianceOptions) -> Result<C64> {
    sys.check_orthogonal(phi, opts.orthogonality_tol)?;
    sys.check_orthogonal(psi, opts.orthogonality_tol)?;
    form_with_density(sys, phi, psi, &sys.ergodic().invariant_density_fn(), opts)
}

/// `σ_m(φ, ψ)` rebuilt from four variances by polarization.
pub fn sigma_m_polarized(sys: &IntervalSystem, phi: &PiecewiseFn, psi: &PiecewiseFn, opts: &VarianceOptions) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut unit = C64::new(1.0, 0.0);
    for _ in 0..4 {
        let v = sigma2_m(sys, &phi.add(&psi.scale(unit)), opts)?.total();
        acc += unit * v;
        unit *= C64::new(0.0, 1.0);
    }
    Ok(acc / 4.0)
}

/// `Θ_φ(g) = σ_m(g, φ̄)`, with `g` centered on every component first.
pub fn theta_functional(sys: &IntervalSystem, phi: &PiecewiseFn, g: &PiecewiseFn, opts: &VarianceOptions) -> Result<C64> {
    sys.check_orthogonal(phi, opts.orthogonality_tol)?;
    let g = sys.center(g);
    form_with_density(sys, &g, &phi.conj(), &sys.ergodic().invariant_density_fn(), opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentVariance {
    pub component: usize,
    pub basin_mass: f64,
    pub sigma2: f64,
    pub ledger: GreenKuboLedger,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub components: Vec<ComponentVariance>,
    pub sigma2_m: f64,
    pub ledger_m: GreenKuboLedger,
    /// `|σ²_m − Σ_ℓ m(A_ℓ)σ²_{μ_ℓ}|`.
    pub identity_residual: f64,
    pub monte_carlo: Option<super::MonteCarloEstimate>,
}

pub fn variance_report(sys: &IntervalSystem, phi: &PiecewiseFn, opts: &VarianceOptions) -> Result<VarianceReport> {
    let ledger_m = sigma2_m(sys, phi, opts)?;
    let components = (0..sys.ergodic().count())
        .map(|l| {
            let ledger = sigma2_component(sys, phi, l, opts)?;
            Ok(ComponentVariance {
                component: l,
                basin_mass: sys.ergodic().components[l].basin_mass,
                sigma2: ledger.total(),
                ledger,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let weighted: f64 = components.iter().map(|c| c.basin_mass * c.sigma2).sum();
    let sigma2_m = ledger_m.total();
    if sigma2_m < -1e-8 {
        return Err(Error::numerical(format!("negative asymptotic variance {sigma2_m:.3e}")));
    }
    Ok(VarianceReport { components, sigma2_m, ledger_m, identity_residual: (sigma2_m - weighted).abs(), monte_carlo: None })
}

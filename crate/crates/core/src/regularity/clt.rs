use super::zygmund::check_scales;
use crate::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use crate::dynamics::PiecewiseMap;
use crate::error::{Error, Result};
use crate::lateral::LateralPoint;
use crate::piecewise::{PiecewiseFn, C64};
use crate::stats::ks_distance_normal;
use crate::system::IntervalSystem;
use crate::variance::{sigma2_component, VarianceOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `N` with `|Dfᴺ(x)| ≤ 1/h`, so that `1/|Df^{N+1}(x)| < h ≤ 1/|Dfᴺ(x)|`.
pub fn n_scale(map: &PiecewiseMap, x: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("scale must be positive, got {h}")));
    }
    let (a, b) = map.interval();
    if x < a || x > b {
        return Err(Error::OutsideInterval { x, a, b });
    }
    let limit = (1.0 / h) * (1.0 + 1e-12);
    let mut p = if x == b { LateralPoint::minus(x) } else { LateralPoint::plus(x) };
    let mut d = 1.0f64;
    for k in 0.. {
        if k > 0 && map.is_critical(p.position) {
            return Err(Error::precondition(format!(
                "orbit of {x} reaches the critical point {} after {k} steps",
                p.position
            )));
        }
        let next = d * map.derivative_lateral(p)?.abs();
        if next > limit {
            return Ok(k);
        }
        if k > 100_000 {
            break;
        }
        d = next;
        p = map.eval_lateral(p)?;
    }
    Err(Error::numerical(format!("no bracketing iterate for h = {h}")))
}

/// `Λ_ℓ = ∫ ln|Df| dμ_ℓ`, with `μ_ℓ` from the Ulam density.
pub fn lyapunov_exponent(sys: &IntervalSystem, l: usize) -> Result<f64> {
    if l >= sys.ergodic().count() {
        return Err(Error::invalid(format!("component {l} does not exist")));
    }
    const NODES: [(f64, f64); 3] = [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];
    let map = sys.map();
    let rho = sys.ergodic().density_fn(l);
    let crit = map.critical_set();
    let (mut num, mut mass) = (0.0, 0.0);
    for piece in rho.pieces() {
        let v = piece.eval(0.5 * (piece.lo + piece.hi)).re;
        let mut cuts = vec![piece.lo];
        cuts.extend(crit.iter().copied().filter(|&c| c > piece.lo && c < piece.hi));
        cuts.push(piece.hi);
        for w in cuts.windows(2) {
            let (m, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            let br = &map.branches()[map.branch_at(m)];
            num += v * r * NODES.iter().map(|&(t, wt)| wt * br.derivative(m + r * t).abs().ln()).sum::<f64>();
        }
        mass += v * (piece.hi - piece.lo);
    }
    if !(mass > 0.0) {
        return Err(Error::numerical(format!("density of component {l} has no mass")));
    }
    Ok(num / mass)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CltOptions {
    pub samples: usize,
    pub seed: u64,
    /// Increment tolerance relative to `h`.
    pub rel_tol: f64,
    /// `σ²` at or below this is degenerate.
    pub sigma2_floor: f64,
    pub route: String,
    pub variance: VarianceOptions,
}

impl Default for CltOptions {
    fn default() -> Self {
        CltOptions {
            samples: 2000,
            seed: 0x5eed,
            rel_tol: 1e-6,
            sigma2_floor: 1e-8,
            route: "auto".into(),
            variance: VarianceOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltSample {
    pub x: f64,
    pub h: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltLevel {
    pub h: f64,
    pub ks: f64,
    pub samples: Vec<CltSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub component: usize,
    pub sigma2: f64,
    pub lyapunov: f64,
    pub levels: Vec<CltLevel>,
}

/// Normalized increments `Z = (ψ(x+h)−ψ(x)) / (h·σ·√(ln(1/h)/Λ_ℓ))` for
/// `x ~ μ_ℓ`, and their KS distance to the standard normal. The same points
/// are reused at every scale.
pub fn clt_modulus(sys: &IntervalSystem, phi: &PiecewiseFn, l: usize, hs: &[f64], opts: &CltOptions) -> Result<CltReport> {
    check_scales(hs)?;
    if opts.samples == 0 {
        return Err(Error::invalid("no samples requested"));
    }
    if hs[0] >= 1.0 {
        return Err(Error::invalid("scales must be below 1"));
    }
    let lyapunov = lyapunov_exponent(sys, l)?;
    // Work with φ/|φ|∞ so that the statistic does not see the scale of φ.
    let sup = phi.sup_norm();
    if sup == 0.0 {
        return Err(Error::precondition("σ = 0: the observable vanishes"));
    }
    let unit = phi.scale(C64::new(1.0 / sup, 0.0));
    let sigma2 = sigma2_component(sys, &unit, l, &opts.variance)?.total();
    if sigma2 <= opts.sigma2_floor {
        return Err(Error::precondition(format!(
            "σ² = {:.3e} on component {l}: the limit law is degenerate",
            sigma2 * sup * sup
        )));
    }
    let bopts = BirkhoffOptions {
        route: opts.route.clone(),
        orthogonality_tol: opts.variance.orthogonality_tol,
        ..Default::default()
    };
    let b = Birkhoff::new(sys, &unit, &RouteRegistry::default(), &bopts)?;
    let (_, hi) = sys.interval();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut xs = Vec::with_capacity(opts.samples);
    while xs.len() < opts.samples {
        let x = sys.ergodic().quantile(l, rng.gen::<f64>());
        if x + hs[0] <= hi {
            xs.push(x);
        }
    }
    let sigma = sigma2.sqrt();
    let levels = hs
        .iter()
        .map(|&h| {
            let norm = h * sigma * ((1.0 / h).ln() / lyapunov).sqrt();
            let samples: Vec<CltSample> = xs
                .par_iter()
                .map(|&x| Ok(CltSample { x, h, z: b.increment(x, x + h, opts.rel_tol * h)?.re / norm }))
                .collect::<Result<_>>()?;
            let z: Vec<f64> = samples.iter().map(|s| s.z).collect();
            Ok(CltLevel { h, ks: ks_distance_normal(&z), samples })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CltReport { component: l, sigma2: sigma2 * sup * sup, lyapunov, levels })
}

use crate::birkhoff::Birkhoff;
use crate::dynamics::PiecewiseMap;
use crate::error::{Error, Result};
use crate::lateral::{LateralPoint, Side};
use crate::piecewise::PiecewiseFn;
use crate::stats::{linear_fit_full, LinearFit};
use serde::{Deserialize, Serialize};

/// `|slope|` below this is read as a bounded second difference.
pub const ZYGMUND_SLOPE: f64 = 0.05;
/// Forward iterates of the critical points checked for separation.
const POSTCRITICAL_DEPTH: usize = 16;
/// Pairing tolerance relative to `h`.
const D2_REL_TOL: f64 = 1e-8;

/// Second differences of `ψ` at a probe over dyadic scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub probe: f64,
    /// Strictly decreasing.
    pub scales: Vec<f64>,
    /// `ψ(x+h) + ψ(x−h) − 2ψ(x)`.
    pub second_differences: Vec<f64>,
    /// Least squares of `D₂(h)/h` against `ln(1/h)`.
    pub fit: LinearFit,
    /// Slope expected from the lateral periodic data at the probe, when the
    /// lateral orbits are eventually periodic or coincide.
    pub predicted: Option<f64>,
    pub zygmund: bool,
}

impl ModulusProfile {
    pub fn fit_points(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.second_differences)
            .map(|(&h, &d)| ((1.0 / h).ln(), d / h))
            .collect()
    }

    pub fn refit(&self) -> LinearFit {
        linear_fit_full(&self.fit_points())
    }
}

pub fn is_dyadic(h: f64) -> bool {
    h > 0.0 && h.is_finite() && h.log2().fract() == 0.0
}

/// `2^{-k}` for `k` in `k_min..=k_max`, coarse to fine.
pub fn dyadic_scales(k_min: i32, k_max: i32) -> Vec<f64> {
    (k_min..=k_max).map(|k| (-k as f64).exp2()).collect()
}

pub(crate) fn check_scales(hs: &[f64]) -> Result<()> {
    if hs.is_empty() {
        return Err(Error::invalid("no scales given"));
    }
    if let Some(h) = hs.iter().find(|&&h| !is_dyadic(h)) {
        return Err(Error::invalid(format!("scale {h} is not a power of two")));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("scales must be strictly decreasing"));
    }
    Ok(())
}

/// Critical points and their lateral forward images.
fn postcritical_set(map: &PiecewiseMap) -> Vec<f64> {
    let (a, b) = map.interval();
    let mut pts = map.critical_set().to_vec();
    for &c in map.critical_set() {
        for side in [Side::Plus, Side::Minus] {
            if (c == a && side == Side::Minus) || (c == b && side == Side::Plus) {
                continue;
            }
            if let Ok(orbit) = map.orbit(LateralPoint::new(c, side), POSTCRITICAL_DEPTH) {
                pts.extend(orbit.iter().skip(1).map(|p| p.position));
            }
        }
    }
    pts
}

/// Half the distance from the post-critical points outside `Ĉ` to `Ĉ`.
pub fn critical_separation(map: &PiecewiseMap) -> f64 {
    let crit = map.critical_set();
    let dist = |x: f64| crit.iter().map(|c| (x - c).abs()).fold(f64::INFINITY, f64::min);
    let d = postcritical_set(map)
        .into_iter()
        .filter(|&x| !map.is_critical(x))
        .map(dist)
        .fold(f64::INFINITY, f64::min);
    0.5 * d.min(map.length())
}

/// `Σφ / ln|Dfᴹ|` over the cycle the lateral orbit of `p` falls into.
fn cycle_ratio(map: &PiecewiseMap, phi: &PiecewiseFn, p: LateralPoint) -> Option<f64> {
    let orbit = map.orbit(p, 40).ok()?;
    for i in 0..24 {
        for m in 1..=16 {
            let (q, r) = (orbit[i], orbit[i + m]);
            if q.side == r.side && (q.position - r.position).abs() <= 1e-9 {
                let cycle = &orbit[i..i + m];
                let sum: f64 = cycle.iter().map(|q| phi.eval_side(q.position, q.side).re).sum();
                let log_d: f64 = cycle.iter().map(|&q| map.derivative_lateral(q).map(|d| d.abs().ln())).sum::<Result<f64>>().ok()?;
                return Some(sum / log_d);
            }
        }
    }
    None
}

/// Expected slope of `D₂(h)/h` against `ln(1/h)`.
fn predicted_slope(map: &PiecewiseMap, phi: &PiecewiseFn, x: f64) -> Option<f64> {
    let plus = map.orbit(LateralPoint::plus(x), 40).ok()?;
    let minus = map.orbit(LateralPoint::minus(x), 40).ok()?;
    if plus.iter().zip(&minus).all(|(p, q)| p.position == q.position) {
        return Some(0.0);
    }
    Some(cycle_ratio(map, phi, LateralPoint::plus(x))? - cycle_ratio(map, phi, LateralPoint::minus(x))?)
}

/// Regresses `D₂(h)/h` on `ln(1/h)` at `probe` over the dyadic `hs`.
pub fn zygmund_profile(b: &Birkhoff<'_>, probe: f64, hs: &[f64]) -> Result<ModulusProfile> {
    check_scales(hs)?;
    let sys = b.system();
    let map = sys.map();
    let (lo, hi) = sys.interval();
    let h_max = hs[0];
    if probe - h_max < lo || probe + h_max > hi {
        return Err(Error::invalid(format!("[{probe} ± {h_max}] is not inside [{lo}, {hi}]")));
    }
    let d = critical_separation(map);
    if h_max >= d {
        return Err(Error::precondition(format!("largest scale {h_max} is not below the critical separation {d}")));
    }
    if let Some(c) = postcritical_set(map).into_iter().find(|&c| c != probe && (c - probe).abs() < h_max) {
        return Err(Error::precondition(format!(
            "probe {probe} is within {h_max} of the critical orbit point {c}"
        )));
    }
    let phi = b.observable();
    let second_differences = hs
        .iter()
        .map(|&h| {
            let gamma = PiecewiseFn::indicator(probe, probe + h).sub(&PiecewiseFn::indicator(probe - h, probe));
            Ok(b.pair_with_tol(&gamma, D2_REL_TOL * h * b.observable_sup().max(1.0))?.value.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = ModulusProfile {
        probe,
        scales: hs.to_vec(),
        second_differences,
        fit: linear_fit_full(&[]),
        predicted: predicted_slope(map, phi, probe),
        zygmund: false,
    };
    profile.fit = profile.refit();
    profile.zygmund = profile.fit.slope.abs() < ZYGMUND_SLOPE;
    Ok(profile)
}

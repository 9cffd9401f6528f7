use super::map::PiecewiseMap;
use super::observable::PiecewiseObservable;
use crate::error::{Error, Result};
use crate::lateral::{LateralPoint, Side};
use serde::{Deserialize, Serialize};

const ROOT_TOL: f64 = 1e-12;
const REVERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub point: LateralPoint,
    pub period: usize,
    pub multiplier: f64,
}

impl PiecewiseMap {
    /// Lateral fixed points of `f^m`, one candidate per cylinder of depth `m`.
    pub fn periodic_points(&self, m: usize) -> Result<Vec<PeriodicOrbit>> {
        if m < 1 {
            return Err(Error::invalid("period must be at least 1"));
        }
        let mut out = Vec::new();
        for c in self.monotonicity_partition(m)? {
            let g = |x: f64| self.iterate_word(&c.word, x) - x;
            let (gl, gh) = (g(c.lo), g(c.hi));
            let scale = ROOT_TOL * self.length();
            let candidate = if gl.abs() <= scale {
                Some(LateralPoint::plus(c.lo))
            } else if gh.abs() <= scale {
                Some(LateralPoint::minus(c.hi))
            } else if gl.signum() != gh.signum() {
                let x = match self.affine_word(&c.word) {
                    Some((s, o)) => o / (1.0 - s),
                    None => bisect(&g, c.lo, c.hi, gl),
                };
                Some(LateralPoint::plus(x))
            } else {
                None
            };
            let Some(p) = candidate else { continue };
            if self.verify_return(p, m).is_err() {
                continue;
            }
            let multiplier = self.derivative_n(p, m)?;
            out.push(PeriodicOrbit { point: p, period: m, multiplier });
        }
        Ok(out)
    }

    /// Checks that `m` lateral steps bring `p` back to itself.
    fn verify_return(&self, p: LateralPoint, m: usize) -> Result<LateralPoint> {
        let mut q = p;
        for _ in 0..m {
            q = self.eval_lateral(q)?;
        }
        let interior = p.position > self.interval().0 && p.position < self.interval().1;
        let side_ok = q.side == p.side || (interior && !self.is_critical(p.position));
        if (q.position - p.position).abs() <= REVERIFY_TOL * self.length() && side_ok {
            Ok(q)
        } else {
            Err(Error::numerical(format!("{p} does not return after {m} steps (got {q})")))
        }
    }

    /// Smallest period dividing `orbit.period` that already closes the orbit.
    pub fn minimal_period(&self, orbit: &PeriodicOrbit) -> usize {
        (1..=orbit.period)
            .filter(|d| orbit.period.is_multiple_of(*d))
            .find(|&d| self.verify_return(orbit.point, d).is_ok())
            .unwrap_or(orbit.period)
    }

    /// The lateral points visited by the orbit in one period.
    pub fn cycle(&self, orbit: &PeriodicOrbit) -> Result<Vec<LateralPoint>> {
        self.verify_return(orbit.point, orbit.period)?;
        let mut pts = self.orbit(orbit.point, orbit.period - 1)?;
        for p in &mut pts {
            if p.position == self.interval().0 {
                p.side = Side::Plus;
            }
        }
        Ok(pts)
    }
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, glo: f64) -> f64 {
    let sign_lo = glo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Σ_{j<m} φ(f^j q)` with lateral evaluation.
pub fn birkhoff_orbit_sum(obs: &PiecewiseObservable, map: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<f64> {
    Ok(map.cycle(orbit)?.iter().map(|&p| obs.eval_lateral(p)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_fixed_points() {
        let f = PiecewiseMap::doubling();
        let p = f.periodic_points(1).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].point, LateralPoint::plus(0.0));
        assert_eq!(p[1].point, LateralPoint::minus(1.0));
        assert!(p.iter().all(|o| o.multiplier == 2.0));
    }

    #[test]
    fn doubling_two_cycle() {
        let f = PiecewiseMap::doubling();
        let p = f.periodic_points(2).unwrap();
        let xs: Vec<f64> = p.iter().map(|o| o.point.position).collect();
        assert_eq!(xs.len(), 4);
        assert!((xs[1] - 1.0 / 3.0).abs() < 1e-15 && (xs[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!(p.iter().all(|o| o.multiplier == 4.0));
        assert_eq!(f.minimal_period(&p[0]), 1);
        assert_eq!(f.minimal_period(&p[1]), 2);
    }

    #[test]
    fn swap4_has_no_fixed_points() {
        assert!(PiecewiseMap::swap4().periodic_points(1).unwrap().is_empty());
    }
}

use crate::dynamics::{birkhoff_orbit_sum, PeriodicOrbit, PiecewiseObservable};
use crate::error::{Error, Result};
use crate::system::IntervalSystem;
use serde::{Deserialize, Serialize};

pub const OBSTRUCTION_FLAG: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionRecord {
    pub orbit: PeriodicOrbit,
    pub component: usize,
    pub sum: f64,
    pub flagged: bool,
}

/// Birkhoff sums over every periodic cycle of minimal period `≤ m_max` that
/// meets a support, one record per cycle.
pub fn obstruction_scan(sys: &IntervalSystem, phi: &PiecewiseObservable, m_max: usize) -> Result<Vec<ObstructionRecord>> {
    if m_max < 1 {
        return Err(Error::invalid("m_max must be at least 1"));
    }
    let map = sys.map();
    let mut out = Vec::new();
    for m in 1..=m_max {
        for orbit in map.periodic_points(m)? {
            if map.minimal_period(&orbit) != m {
                continue;
            }
            let cycle = map.cycle(&orbit)?;
            let first = cycle
                .iter()
                .min_by(|p, q| p.position.total_cmp(&q.position).then((p.side as u8).cmp(&(q.side as u8))))
                .expect("cycle is nonempty");
            if *first != orbit.point {
                continue;
            }
            let Some(component) = sys.ergodic().component_of(orbit.point.position) else { continue };
            let sum = birkhoff_orbit_sum(phi, map, &orbit)?;
            out.push(ObstructionRecord { orbit, component, sum, flagged: sum.abs() > OBSTRUCTION_FLAG });
        }
    }
    Ok(out)
}

//! Piecewise expanding interval maps, observables, partitions and periodic points.

mod map;
mod observable;
mod partition;
mod periodic;

pub use map::{Branch, BranchKind, PiecewiseMap};
pub use observable::{ObservablePiece, ObservableTerm, PiecewiseObservable};
pub use partition::Cylinder;
pub use periodic::{birkhoff_orbit_sum, PeriodicOrbit};

//! Primitives of Birkhoff sums and their pairings with BV test functions.

mod cesaro;
mod routes;
mod series;

pub use cesaro::{AlphaEvaluation, CesaroPrimitive};
pub use routes::{
    CorrelationRoute, CorrelationStream, ExactRoute, OrbitRoute, PreparedRoute, RouteRegistry, UlamRoute,
    ORBIT_PIECE_CAP,
};
pub use series::{Birkhoff, BirkhoffOptions, Pairing, PrimitiveEvaluation};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PiecewiseMap, PiecewiseObservable};
    use crate::piecewise::PiecewiseFn;
    use crate::system::IntervalSystem;
    use crate::transfer::SpectralOptions;
    use std::f64::consts::PI;

    fn doubling() -> IntervalSystem {
        IntervalSystem::build(PiecewiseMap::doubling(), &SpectralOptions { bins: 512, ..Default::default() }).unwrap()
    }

    fn with_route<'a>(sys: &'a IntervalSystem, phi: &PiecewiseFn, route: &str) -> Birkhoff<'a> {
        let opts = BirkhoffOptions { route: route.into(), ..Default::default() };
        Birkhoff::new(sys, phi, &RouteRegistry::default(), &opts).unwrap()
    }

    #[test]
    fn cos_quarter_on_every_route() {
        let sys = doubling();
        let phi = PiecewiseObservable::cos(1.0, 1.0).function().clone();
        for (route, tol) in [("orbit", 1e-12), ("exact", 1e-10), ("ulam", 1e-6)] {
            let b = with_route(&sys, &phi, route);
            let v = b.primitive(0.25).unwrap();
            assert!((v.value.re - 1.0 / (2.0 * PI)).abs() < tol, "{route}: {v:?}");
            assert!(v.tail_bound < 1e-8);
            assert!(b.primitive(0.5).unwrap().value.norm() < tol);
        }
    }

    #[test]
    fn primitive_vanishes_at_left_end() {
        let sys = doubling();
        let phi = PiecewiseObservable::cos(3.0, 1.0).function().clone();
        let b = with_route(&sys, &phi, "auto");
        assert_eq!(b.primitive(0.0).unwrap().value.norm(), 0.0);
    }

    #[test]
    fn rejects_non_centered_observable() {
        let sys = doubling();
        let phi = PiecewiseFn::indicator(0.0, 0.5);
        let err = Birkhoff::new(&sys, &phi, &RouteRegistry::default(), &BirkhoffOptions::default()).err().unwrap();
        assert!(matches!(err, crate::Error::Precondition(_)), "{err}");
    }

    #[test]
    fn alpha_is_minus_psi_without_peripheral_part() {
        let sys = doubling();
        let phi = PiecewiseObservable::cos(1.0, 1.0).function().clone();
        let b = with_route(&sys, &phi, "exact");
        let a = b.alpha_primitive(0.3, 1024).unwrap();
        let psi = b.primitive(0.3).unwrap().value;
        assert!((a.value + psi).norm() < 1e-8);
        assert!(a.residual < 1e-6, "{a:?}");
    }

    #[test]
    fn unknown_route_is_reported() {
        let sys = doubling();
        let phi = PiecewiseObservable::cos(1.0, 1.0).function().clone();
        let opts = BirkhoffOptions { route: "spline".into(), ..Default::default() };
        assert!(Birkhoff::new(&sys, &phi, &RouteRegistry::default(), &opts).is_err());
    }
}

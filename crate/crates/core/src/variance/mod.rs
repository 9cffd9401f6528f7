//! Asymptotic variance: Green–Kubo sums, the hermitian form, coboundary
//! recovery, periodic obstructions and the invariant functional.

mod coboundary;
mod green_kubo;
mod monte_carlo;
mod obstruction;

pub use coboundary::{coboundary_solve, CoboundaryOptions, CoboundaryReport, CoboundaryVerdict};
pub use green_kubo::{
    sigma2_component, sigma2_m, sigma_m, sigma_m_polarized, theta_functional, variance_report, ComponentVariance,
    GreenKuboLedger, RegularizedSum, VarianceOptions, VarianceReport,
};
pub use monte_carlo::{monte_carlo_sigma2, MonteCarloEstimate, MonteCarloOptions};
pub use obstruction::{obstruction_scan, ObstructionRecord, OBSTRUCTION_FLAG};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PiecewiseMap, PiecewiseObservable};
    use crate::piecewise::PiecewiseFn;
    use crate::system::IntervalSystem;
    use crate::transfer::SpectralOptions;

    fn doubling() -> IntervalSystem {
        IntervalSystem::build(PiecewiseMap::doubling(), &SpectralOptions { bins: 256, ..Default::default() }).unwrap()
    }

    #[test]
    fn zero_observable_has_zero_variance() {
        let sys = doubling();
        let z = PiecewiseFn::zero();
        let opts = VarianceOptions::default();
        assert_eq!(sigma2_m(&sys, &z, &opts).unwrap().total(), 0.0);
        assert_eq!(sigma_m(&sys, PiecewiseObservable::cos(1.0, 1.0).function(), &z, &opts).unwrap().norm(), 0.0);
    }

    #[test]
    fn non_centered_is_refused() {
        let sys = doubling();
        let phi = PiecewiseFn::indicator(0.0, 0.3);
        let err = sigma2_component(&sys, &phi, 0, &VarianceOptions::default()).unwrap_err();
        assert!(matches!(err, crate::Error::Precondition(_)));
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let map = PiecewiseMap::doubling();
        let phi = PiecewiseObservable::cos(1.0, 1.0).function().clone();
        let opts = MonteCarloOptions { samples: 2500, horizon: 64, seed: 7 };
        let a = monte_carlo_sigma2(&map, &phi, &opts).unwrap();
        let b = monte_carlo_sigma2(&map, &phi, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.exact_orbits);
    }
}

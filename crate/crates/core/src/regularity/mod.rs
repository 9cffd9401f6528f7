//! Regularity of primitives: log-Lipschitz ratios, Zygmund second
//! differences, Hölder convergence of partial primitives, variation tests and
//! the limit law of normalized increments.

mod clt;
mod grid;
mod holder;
mod zygmund;

pub use clt::{clt_modulus, lyapunov_exponent, n_scale, CltLevel, CltOptions, CltReport, CltSample};
pub use grid::{bv_test, log_lipschitz_ratio, BvLevel, BvReport, BvVerdict, LogLipschitzLevel, LogLipschitzReport, PrimitiveGrid};
pub use holder::{holder_convergence, HolderConvergence, HolderDistance};
pub(crate) use zygmund::check_scales;
pub use zygmund::{critical_separation, dyadic_scales, is_dyadic, zygmund_profile, ModulusProfile, ZYGMUND_SLOPE};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PiecewiseMap;

    #[test]
    fn zero_primitive_diagnostics() {
        let g = PrimitiveGrid::from_fn(0.0, 1.0, 8, |_| 0.0).unwrap();
        assert_eq!(log_lipschitz_ratio(&g).sup_ratio, 0.0);
        assert_eq!(bv_test(&g).verdict, BvVerdict::Bounded);
    }

    #[test]
    fn identity_primitive() {
        let g = PrimitiveGrid::from_fn(0.0, 1.0, 12, |x| x).unwrap();
        let r = log_lipschitz_ratio(&g);
        assert!(r.sup_ratio <= 1.0 && r.stable);
        assert_eq!(r.argmax, (0.0, 1.0));
        let bv = bv_test(&g);
        assert!(bv.levels.iter().all(|l| (l.variation - 1.0).abs() < 1e-12));
        assert_eq!(bv.verdict, BvVerdict::Bounded);
    }

    #[test]
    fn square_root_is_not_log_lipschitz() {
        let g = PrimitiveGrid::from_fn(0.0, 1.0, 20, f64::sqrt).unwrap();
        assert!(!log_lipschitz_ratio(&g).stable);
    }

    #[test]
    fn n_scale_examples() {
        let f = PiecewiseMap::doubling();
        assert_eq!(n_scale(&f, 0.3, (-10f64).exp2()).unwrap(), 10);
        assert_eq!(n_scale(&f, 0.3, 1.0).unwrap(), 0);
        let g = PiecewiseMap::multiply(3).unwrap();
        assert_eq!(n_scale(&g, 0.1, 3f64.powi(-7)).unwrap(), 7);
        assert!(n_scale(&f, 0.375, (-10f64).exp2()).is_err());
    }

    #[test]
    fn scales_must_be_dyadic() {
        assert!(is_dyadic(0.125) && !is_dyadic(0.3));
        assert_eq!(dyadic_scales(2, 4), vec![0.25, 0.125, 0.0625]);
    }
}

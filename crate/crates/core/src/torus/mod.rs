//! Hyperbolic automorphisms of the torus and expanding circle maps acting on
//! trigonometric polynomials: Birkhoff sums as sparse Fourier series, their
//! Littlewood–Paley blocks, derivatives, deformations and advection.

mod advect;
mod annulus;
mod besov;
mod correlation;
mod deformation;
mod derivative;
mod fourier;
mod lattice;
mod matrix;
mod trig;

pub use advect::{advect, evolve, transfer, AdvectionReport, AdvectionStep};
pub use annulus::{annulus_crossings, crossing_indices, crossing_table, CrossingEntry, CrossingTable};
pub use besov::{
    besov_profile, block_weight, bump, BesovClass, BesovOptions, DyadicBlock, DyadicBlockProfile, BOUNDED_EXPONENT,
    LINEAR_EXPONENT,
};
pub use correlation::{correlation_decay_fit, DecayFit, DecayVerdict};
pub use deformation::{
    deformation_second_differences, infinitesimal_deformation, Deformation, DeformationField, SecondDifferenceLevel,
    SecondDifferenceScan,
};
pub use derivative::{directional_derivative, DirectionalDerivative, Eigendirection};
pub use fourier::{birkhoff_fourier, Direction, FourierSystem, Provenance, SparseFourierDistribution, MEAN_TOL};
pub use matrix::{Freq, HyperbolicMatrix, PlanarSplit};
pub use trig::{freq_norm, phase, TrigPolynomial};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_is_exact_for_large_frequencies() {
        let k = vec![1i128 << 80];
        assert_eq!(phase(&k, &[0.5]), 0.0);
        assert_eq!(phase(&[3], &[0.25]), 0.75);
        assert_eq!(phase(&[-1], &[0.25]), 0.75);
        assert_eq!(phase(&[(1i128 << 60) + 1], &[0.5f64.powi(61)]), 0.5 + 0.5f64.powi(61));
    }

    #[test]
    fn cat_inverse_and_transpose() {
        let m = HyperbolicMatrix::cat();
        assert_eq!(m.inverse_entries(), &[1, -1, -1, 2]);
        assert_eq!(m.power_apply(-1, &[1, 1]).unwrap(), vec![0, 1]);
        assert_eq!(m.power_apply(3, &[1, 0]).unwrap(), m.power_apply_big(3, &[1.into(), 0.into()]).iter().map(|b| i128::try_from(b).unwrap()).collect::<Vec<_>>());
        assert_eq!(m.transpose(), m);
    }

    #[test]
    fn trig_helpers() {
        let c = TrigPolynomial::cos(&[1, 1], 1.0);
        assert!((c.eval(&[0.0, 0.0]).re - 1.0).abs() < 1e-15);
        let s = TrigPolynomial::sin(&[1, 0], 2.0);
        assert!((s.eval(&[0.25, 0.3]).re - 2.0).abs() < 1e-15);
        assert!(s.is_real(0.0) && c.mean() == crate::piecewise::C64::new(0.0, 0.0));
        assert!((c.integral_product(&c).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn omega_refused_on_circle() {
        let sys = FourierSystem::circle(2).unwrap();
        let r = TrigPolynomial::cos(&[1], 1.0);
        assert!(birkhoff_fourier(&sys, &r, Direction::Omega, 3).is_err());
        assert!(FourierSystem::circle(1).is_err());
    }
}

//! Transfer operator: exact branchwise action, Ulam discretization and the
//! peripheral spectral decomposition.

mod decomposition;
mod ergodic;
mod lasota_yorke;
mod operator;
mod projector;
mod spectrum;
mod tail;
mod ulam;

pub use decomposition::{SpectralDecomposition, SpectralOptions};
pub use ergodic::{ergodic_structure, ErgodicComponent, ErgodicStructure, PeripheralEigenfunction};
pub use lasota_yorke::{default_samples, lasota_yorke_check, lasota_yorke_fit, LasotaYorke};
pub use operator::{apply_transfer, transfer_at, Density};
pub use projector::{ProjectorResiduals, SpectralProjector};
pub use spectrum::{dominant_ritz_values, gcd, lcm, peripheral_spectrum, snap_to_root, PeripheralEigenvalue, PeripheralSpectrum};
pub use tail::{discrete_bv, TailEstimate};
pub use ulam::UlamDiscretization;

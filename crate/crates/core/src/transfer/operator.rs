use super::ulam::UlamDiscretization;
use crate::dynamics::PiecewiseMap;
use crate::error::{Error, Result};
use crate::piecewise::{PiecewiseFn, C64};

/// A density either in the exact engine or as Ulam bin averages.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Exact(PiecewiseFn),
    Grid(Vec<C64>),
}

/// One application of the transfer operator. Exact for piecewise affine maps
/// acting on exact densities; otherwise the density is binned and pushed
/// through the Ulam matrix.
pub fn apply_transfer(map: &PiecewiseMap, ulam: Option<&UlamDiscretization>, density: &Density) -> Result<Density> {
    match (density, map.affine_pieces()) {
        (Density::Exact(f), Some(pieces)) => Ok(Density::Exact(f.transfer_affine(&pieces))),
        (Density::Exact(f), None) => {
            let u = ulam.ok_or_else(|| Error::unsupported("non-affine transfer needs an Ulam discretization"))?;
            Ok(Density::Grid(u.push_forward(&u.project(f))))
        }
        (Density::Grid(v), _) => {
            let u = ulam.ok_or_else(|| Error::unsupported("grid densities need an Ulam discretization"))?;
            if v.len() != u.bin_count() {
                return Err(Error::invalid("grid density size does not match the bin count"));
            }
            Ok(Density::Grid(u.push_forward(v)))
        }
    }
}

/// Pointwise formula `(Lγ)(x) = Σ_b γ(b⁻¹x)/|Df(b⁻¹x)|`.
pub fn transfer_at(map: &PiecewiseMap, gamma: &PiecewiseFn, x: f64) -> C64 {
    map.branches()
        .iter()
        .filter_map(|br| {
            let (ilo, ihi) = br.image();
            if x < ilo || x > ihi {
                return None;
            }
            let y = br.inverse(x)?;
            Some(gamma.eval(y) / br.derivative(y).abs())
        })
        .sum()
}

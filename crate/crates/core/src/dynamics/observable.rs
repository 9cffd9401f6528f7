use crate::error::{Error, Result};
use crate::lateral::LateralPoint;
use crate::piecewise::{Piece, PiecewiseFn, Term, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObservableTerm {
    /// `coef · x^power`
    Poly { coef: f64, power: u32 },
    /// `coef · cos(2π·freq·x + phase)`
    Cos {
        coef: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `coef · sin(2π·freq·x + phase)`
    Sin {
        coef: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl ObservableTerm {
    fn expand(&self) -> Vec<Term> {
        match *self {
            ObservableTerm::Poly { coef, power } => vec![Term::new(power, 0.0, C64::new(coef, 0.0))],
            ObservableTerm::Cos { coef, freq, phase } => {
                if freq == 0.0 {
                    return vec![Term::new(0, 0.0, C64::new(coef * phase.cos(), 0.0))];
                }
                let e = if phase == 0.0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, phase) };
                vec![Term::new(0, freq, e * (0.5 * coef)), Term::new(0, -freq, e.conj() * (0.5 * coef))]
            }
            ObservableTerm::Sin { coef, freq, phase } => {
                if freq == 0.0 {
                    return vec![Term::new(0, 0.0, C64::new(coef * phase.sin(), 0.0))];
                }
                let e = if phase == 0.0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, phase) };
                // (e^{iθ} - e^{-iθ}) / 2i
                let half = C64::new(0.0, -0.5 * coef);
                vec![Term::new(0, freq, e * half), Term::new(0, -freq, -(e.conj() * half))]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservablePiece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<ObservableTerm>,
}

/// Real piecewise observable with polynomial and trigonometric terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseObservable {
    pieces: Vec<ObservablePiece>,
    holder_exponent: f64,
    function: PiecewiseFn,
}

impl PiecewiseObservable {
    pub fn new(mut pieces: Vec<ObservablePiece>, holder_exponent: f64) -> Result<Self> {
        if !(holder_exponent > 0.0 && holder_exponent <= 1.0) {
            return Err(Error::invalid(format!("Hölder exponent {holder_exponent} not in (0, 1]")));
        }
        pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        for (i, p) in pieces.iter().enumerate() {
            if !(p.hi > p.lo) {
                return Err(Error::invalid(format!("observable piece {i} is empty")));
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::invalid(format!(
                    "observable pieces overlap at [{}, {}]",
                    w[1].lo, w[0].hi
                )));
            }
        }
        let function = PiecewiseFn::from_pieces(
            pieces
                .iter()
                .map(|p| Piece::new(p.lo, p.hi, p.terms.iter().flat_map(ObservableTerm::expand).collect()))
                .collect(),
        );
        Ok(PiecewiseObservable { pieces, holder_exponent, function })
    }

    /// One piece covering `[lo, hi]`.
    pub fn single(lo: f64, hi: f64, terms: Vec<ObservableTerm>) -> Self {
        Self::new(vec![ObservablePiece { lo, hi, terms }], 1.0).expect("single piece observable")
    }

    pub fn zero(lo: f64, hi: f64) -> Self {
        Self::single(lo, hi, Vec::new())
    }

    /// `coef·cos(2πqx)` on `[0, 1]`.
    pub fn cos(q: f64, coef: f64) -> Self {
        Self::single(0.0, 1.0, vec![ObservableTerm::Cos { coef, freq: q, phase: 0.0 }])
    }

    /// `coef·sin(2πqx)` on `[0, 1]`.
    pub fn sin(q: f64, coef: f64) -> Self {
        Self::single(0.0, 1.0, vec![ObservableTerm::Sin { coef, freq: q, phase: 0.0 }])
    }

    pub fn pieces(&self) -> &[ObservablePiece] {
        &self.pieces
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    /// The same function in the exact engine representation.
    pub fn function(&self) -> &PiecewiseFn {
        &self.function
    }

    pub fn eval_lateral(&self, p: LateralPoint) -> f64 {
        self.function.eval_side(p.position, p.side).re
    }

    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        self.function.integral_over(lo, hi).re
    }

    pub fn scaled(&self, c: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| ObservablePiece {
                lo: p.lo,
                hi: p.hi,
                terms: p
                    .terms
                    .iter()
                    .map(|t| match *t {
                        ObservableTerm::Poly { coef, power } => ObservableTerm::Poly { coef: coef * c, power },
                        ObservableTerm::Cos { coef, freq, phase } => ObservableTerm::Cos { coef: coef * c, freq, phase },
                        ObservableTerm::Sin { coef, freq, phase } => ObservableTerm::Sin { coef: coef * c, freq, phase },
                    })
                    .collect(),
            })
            .collect();
        Self::new(pieces, self.holder_exponent).expect("scaling keeps validity")
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut cuts: Vec<f64> = self.pieces.iter().chain(&other.pieces).flat_map(|p| [p.lo, p.hi]).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut terms = Vec::new();
            for p in self.pieces.iter().chain(&other.pieces) {
                if p.lo <= mid && mid < p.hi {
                    terms.extend(p.terms.iter().copied());
                }
            }
            if !terms.is_empty() {
                pieces.push(ObservablePiece { lo: w[0], hi: w[1], terms });
            }
        }
        Self::new(pieces, self.holder_exponent.min(other.holder_exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lateral_values_of_sawtooth_piece() {
        let phi = PiecewiseObservable::new(
            vec![
                ObservablePiece {
                    lo: 0.0,
                    hi: 0.5,
                    terms: vec![ObservableTerm::Poly { coef: 1.0, power: 1 }, ObservableTerm::Poly { coef: -0.5, power: 0 }],
                },
                ObservablePiece {
                    lo: 0.5,
                    hi: 1.0,
                    terms: vec![ObservableTerm::Poly { coef: 1.0, power: 1 }, ObservableTerm::Poly { coef: -0.5, power: 0 }],
                },
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(phi.eval_lateral(LateralPoint::minus(0.5)), 0.0);
        assert_eq!(phi.eval_lateral(LateralPoint::minus(1.0)), 0.5);
        assert_eq!(phi.integrate(0.0, 1.0), 0.0);
    }

    #[test]
    fn integrals() {
        let c = PiecewiseObservable::cos(1.0, 1.0);
        assert!(c.integrate(0.0, 1.0).abs() < 1e-16);
        assert!((c.integrate(0.0, 0.25) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let s = PiecewiseObservable::sin(1.0, 1.0);
        assert!((s.integrate(0.0, 0.5) - 1.0 / PI).abs() < 1e-15);
        assert!((s.eval_lateral(LateralPoint::plus(0.25)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_shifted_cosine() {
        let c = PiecewiseObservable::single(0.0, 1.0, vec![ObservableTerm::Cos { coef: 2.0, freq: 3.0, phase: 0.4 }]);
        let x = 0.37;
        let want = 2.0 * (2.0 * PI * 3.0 * x + 0.4).cos();
        assert!((c.eval_lateral(LateralPoint::plus(x)) - want).abs() < 1e-14);
    }

    #[test]
    fn rejects_overlaps() {
        let p = |lo, hi| ObservablePiece { lo, hi, terms: vec![] };
        assert!(PiecewiseObservable::new(vec![p(0.0, 0.6), p(0.5, 1.0)], 1.0).is_err());
        assert!(PiecewiseObservable::new(vec![p(0.0, 1.0)], 0.0).is_err());
    }
}

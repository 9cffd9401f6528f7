use serde::{Deserialize, Serialize};
use std::fmt;

/// Which one-sided limit a point stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// Side after a branch of the given orientation acts on the point.
    pub fn through(self, increasing: bool) -> Side {
        if increasing {
            self
        } else {
            self.flip()
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }
}

/// A point `x⁺` or `x⁻` of the doubled interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LateralPoint {
    pub position: f64,
    pub side: Side,
}

impl LateralPoint {
    pub fn plus(position: f64) -> Self {
        LateralPoint { position, side: Side::Plus }
    }

    pub fn minus(position: f64) -> Self {
        LateralPoint { position, side: Side::Minus }
    }

    pub fn new(position: f64, side: Side) -> Self {
        LateralPoint { position, side }
    }
}

impl fmt::Display for LateralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.position, self.side.symbol())
    }
}

use super::matrix::Freq;
use crate::error::{Error, Result};
use crate::piecewise::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// `x·k mod 1`, reduced exactly in integer arithmetic when `k` is small
/// enough for `i128`, so that large frequencies keep their phase.
pub fn phase(k: &[i128], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&ki, &xi) in k.iter().zip(x) {
        total += fract_product(ki, xi);
    }
    total.rem_euclid(1.0)
}

fn fract_product(k: i128, x: f64) -> f64 {
    if k == 0 || x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    // x = sign · m · 2^e with m < 2^53.
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i128 << 52), exp - 1075) };
    if e >= 0 {
        return 0.0;
    }
    let s = (-e) as u32;
    match (sign * m).checked_mul(k) {
        Some(p) if s < 127 => {
            let modulus = 1i128 << s;
            let r = p.rem_euclid(modulus);
            (r as f64) * (-(s as f64)).exp2()
        }
        _ => (k as f64 * x).rem_euclid(1.0),
    }
}

/// Finite Fourier series `Σ b_k e^{2πi k·x}` on `𝕋ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    dim: usize,
    terms: BTreeMap<Freq, C64>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        TrigPolynomial { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Freq, C64)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            if k.len() != dim {
                return Err(Error::invalid(format!("frequency {k:?} is not in dimension {dim}")));
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    /// `coef·cos(2π k·x)`.
    pub fn cos(k: &[i128], coef: f64) -> Self {
        let neg: Freq = k.iter().map(|v| -v).collect();
        let mut p = Self::zero(k.len());
        p.add_term(k.to_vec(), C64::new(0.5 * coef, 0.0));
        p.add_term(neg, C64::new(0.5 * coef, 0.0));
        p
    }

    /// `coef·sin(2π k·x)`.
    pub fn sin(k: &[i128], coef: f64) -> Self {
        let neg: Freq = k.iter().map(|v| -v).collect();
        let mut p = Self::zero(k.len());
        p.add_term(k.to_vec(), C64::new(0.0, -0.5 * coef));
        p.add_term(neg, C64::new(0.0, 0.5 * coef));
        p
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], C64::new(c, 0.0));
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, k: &[i128]) -> C64 {
        self.terms.get(k).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `k`, dropping exact zeros.
    pub fn add_term(&mut self, k: Freq, c: C64) {
        let v = self.coefficient(&k) + c;
        if v == C64::new(0.0, 0.0) {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, v);
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::invalid("dimension mismatch"));
        }
        let mut p = self.clone();
        for (k, c) in &other.terms {
            p.add_term(k.clone(), *c);
        }
        Ok(p)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, c) in &self.terms {
            p.add_term(k.clone(), c * s);
        }
        p
    }

    /// `∫ p dm`.
    pub fn mean(&self) -> C64 {
        self.coefficient(&vec![0; self.dim])
    }

    /// `Σ|b_k|`.
    pub fn l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_frequency_norm(&self) -> f64 {
        self.terms.keys().map(|k| freq_norm(k)).fold(0.0, f64::max)
    }

    /// Real-valued, that is `b_{−k} = conj(b_k)` up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(k, c)| {
            let neg: Freq = k.iter().map(|v| -v).collect();
            (self.coefficient(&neg) - c.conj()).norm() <= tol
        })
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.terms.iter().map(|(k, c)| c * C64::from_polar(1.0, TAU * phase(k, x))).sum()
    }

    /// `∫ p·q dm = Σ p̂(k) q̂(−k)`.
    pub fn integral_product(&self, other: &Self) -> C64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let neg: Freq = k.iter().map(|v| -v).collect();
                c * other.coefficient(&neg)
            })
            .sum()
    }

    /// Applies `g` to every frequency, adding coefficients that collide.
    pub fn map_frequencies(&self, mut g: impl FnMut(&[i128]) -> Result<Freq>) -> Result<Self> {
        let mut p = Self::zero(self.dim);
        for (k, c) in &self.terms {
            p.add_term(g(k)?, *c);
        }
        Ok(p)
    }

    /// Gradient `∂p/∂x · v` as a trigonometric polynomial.
    pub fn directional_derivative(&self, v: &[f64]) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, c) in &self.terms {
            let kv: f64 = k.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum();
            p.add_term(k.clone(), c * C64::new(0.0, TAU * kv));
        }
        p
    }
}

pub fn freq_norm(k: &[i128]) -> f64 {
    k.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
}

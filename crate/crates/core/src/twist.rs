//! Exact rational twist exponents `h_λ` with `ω_λ = exp(2πi h_λ)`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fusion_ring::FusionRing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistError {
    #[error("twist vector has {got} entries, ring has {expected} labels")]
    Length { got: usize, expected: usize },
    #[error("unit twist must be 0, got {0}")]
    UnitNotTrivial(Rational64),
    #[error("twist of label {label} ({h}) differs from twist of its dual {dual} ({h_dual})")]
    DualMismatch {
        label: usize,
        dual: usize,
        h: Rational64,
        h_dual: Rational64,
    },
}

/// Reduces a rational into `[0, 1)`.
pub fn frac(x: Rational64) -> Rational64 {
    let r = x - x.floor();
    if r >= Rational64::one() {
        r - Rational64::one()
    } else {
        r
    }
}

/// `exp(2πi x)` for rational `x`, evaluated on the reduced argument in
/// `[-1/2, 1/2)`.
pub fn phase(x: Rational64) -> Complex64 {
    let mut r = frac(x);
    if r >= Rational64::new(1, 2) {
        r -= Rational64::one();
    }
    match (*r.numer(), *r.denom()) {
        (0, _) => return Complex64::new(1.0, 0.0),
        (1, 4) => return Complex64::new(0.0, 1.0),
        (-1, 4) => return Complex64::new(0.0, -1.0),
        (-1, 2) => return Complex64::new(-1.0, 0.0),
        _ => {}
    }
    let (s, c) = (std::f64::consts::TAU * (*r.numer() as f64 / *r.denom() as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Twist exponents, always stored reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistData {
    h: Vec<Rational64>,
}

impl TwistData {
    pub fn new(h: impl IntoIterator<Item = Rational64>) -> Self {
        Self {
            h: h.into_iter().map(frac).collect(),
        }
    }

    /// All twists zero.
    pub fn trivial(n: usize) -> Self {
        Self {
            h: vec![Rational64::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self, label: usize) -> Rational64 {
        self.h[label]
    }

    pub fn exponents(&self) -> &[Rational64] {
        &self.h
    }

    pub fn omega(&self, label: usize) -> Complex64 {
        phase(self.h[label])
    }

    pub fn check_against(&self, ring: &FusionRing) -> Result<(), TwistError> {
        if self.h.len() != ring.rank() {
            return Err(TwistError::Length {
                got: self.h.len(),
                expected: ring.rank(),
            });
        }
        let h0 = self.h[ring.unit()];
        if !h0.is_zero() {
            return Err(TwistError::UnitNotTrivial(h0));
        }
        for label in 0..ring.rank() {
            let dual = ring.dual(label);
            if self.h[label] != self.h[dual] {
                return Err(TwistError::DualMismatch {
                    label,
                    dual,
                    h: self.h[label],
                    h_dual: self.h[dual],
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_reduces() {
        assert_eq!(frac(Rational64::new(5, 4)), Rational64::new(1, 4));
        assert_eq!(frac(Rational64::new(-1, 4)), Rational64::new(3, 4));
        assert_eq!(frac(Rational64::new(1, 1)), Rational64::zero());
    }

    #[test]
    fn phase_values() {
        let i = phase(Rational64::new(1, 4));
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-16);
        let m = phase(Rational64::new(1, 2));
        assert!((m + 1.0).norm() < 1e-16);
        let w = phase(Rational64::new(7, 3));
        let expected = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((w - expected).norm() < 1e-15);
    }
}

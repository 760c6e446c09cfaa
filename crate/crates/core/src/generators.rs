//! Built-in fixtures: SU(2)_k, pointed cyclic models and a few named models.
//!
//! Twist convention: SU(2)_k uses `h_a = a(a+2) / (4(k+2))`, the positive
//! conformal weights. A source with the opposite chirality corresponds to
//! `h ↦ -h`, which conjugates `S` and transposes mass matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::fusion_ring::FusionRing;
use crate::twist::TwistData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("unknown model id '{0}' (expected trivial, fibonacci or ising)")]
    UnknownModel(String),
    #[error("unknown family '{0}' (expected su2, cyclic or named)")]
    UnknownFamily(String),
    #[error("parameter {name} must be >= 1, got {value}")]
    Parameter { name: &'static str, value: i64 },
}

/// Address of a catalog model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Su2 { level: u32 },
    Cyclic { order: u32, q: i64 },
    Named(String),
}

impl ModelSpec {
    pub fn build(&self) -> Result<(FusionRing, TwistData), GeneratorError> {
        match self {
            Self::Su2 { level } if *level >= 1 => Ok(su2_level(*level)),
            Self::Su2 { level } => Err(GeneratorError::Parameter {
                name: "level",
                value: i64::from(*level),
            }),
            Self::Cyclic { order, q } if *order >= 1 => Ok(cyclic_model(*order, *q)),
            Self::Cyclic { order, .. } => Err(GeneratorError::Parameter {
                name: "order",
                value: i64::from(*order),
            }),
            Self::Named(id) => named_model(id),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Su2 { level } => write!(f, "su2_{level}"),
            Self::Cyclic { order, q } => write!(f, "cyclic_{order}_{q}"),
            Self::Named(id) => f.write_str(id),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = GeneratorError;

    /// Parses the names produced by `Display`, e.g. `su2_4`, `cyclic_3_2`, `ising`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('_').collect();
        let bad = || GeneratorError::UnknownModel(s.to_string());
        match parts.as_slice() {
            ["su2", k] => Ok(Self::Su2 {
                level: k.parse().map_err(|_| bad())?,
            }),
            ["cyclic", n, q] => Ok(Self::Cyclic {
                order: n.parse().map_err(|_| bad())?,
                q: q.parse().map_err(|_| bad())?,
            }),
            [id] if NAMED.contains(id) => Ok(Self::Named(id.to_string())),
            _ => Err(bad()),
        }
    }
}

pub const NAMED: [&str; 3] = ["trivial", "fibonacci", "ising"];

/// The registry of fixtures used by tests and the catalog sweeps.
pub fn catalog() -> Vec<ModelSpec> {
    let mut out: Vec<ModelSpec> = NAMED
        .iter()
        .map(|s| ModelSpec::Named(s.to_string()))
        .collect();
    out.extend((1..=24).map(|level| ModelSpec::Su2 { level }));
    for order in 1..=6 {
        // q·n odd breaks h_j = h_{-j}.
        for q in (0..order as i64 * 2).filter(|q| q * order as i64 % 2 == 0) {
            out.push(ModelSpec::Cyclic { order, q });
        }
    }
    out
}

/// SU(2) at level `k`: labels `0..=k`, truncated Clebsch-Gordan fusion.
pub fn su2_level(k: u32) -> (FusionRing, TwistData) {
    assert!(k >= 1, "level must be positive");
    let n = k as usize + 1;
    let kk = k as i64;
    let labels = (0..n).map(|a| a.to_string()).collect();
    let ring = FusionRing::from_fn(labels, 0, (0..n).collect(), |a, b, c| {
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let lo = (a - b).abs();
        let hi = (a + b).min(2 * kk - a - b);
        u32::from(c >= lo && c <= hi && (c - lo) % 2 == 0)
    })
    .expect("su2 fusion is structurally valid");
    let twists = TwistData::new((0..n as i64).map(|a| Rational64::new(a * (a + 2), 4 * (kk + 2))));
    (ring, twists)
}

/// Closed-form SU(2)_k S-matrix `√(2/(k+2)) sin(π(a+1)(b+1)/(k+2))`.
pub fn su2_s_closed_form(k: u32) -> DMatrix<Complex64> {
    let n = k as usize + 1;
    let kp = f64::from(k + 2);
    let norm = (2.0 / kp).sqrt();
    DMatrix::from_fn(n, n, |a, b| {
        let x = std::f64::consts::PI * ((a + 1) * (b + 1)) as f64 / kp;
        Complex64::new(norm * x.sin(), 0.0)
    })
}

/// Pointed model on `Z_n` with `h_j = q j² / (2n)`.
pub fn cyclic_model(n: u32, q: i64) -> (FusionRing, TwistData) {
    assert!(n >= 1, "order must be positive");
    let nn = n as usize;
    let labels = (0..nn).map(|j| j.to_string()).collect();
    let dual = (0..nn).map(|j| (nn - j) % nn).collect();
    let ring = FusionRing::from_fn(labels, 0, dual, |a, b, c| u32::from((a + b) % nn == c))
        .expect("cyclic fusion is structurally valid");
    let twists =
        TwistData::new((0..nn as i64).map(|j| Rational64::new(q * j * j, 2 * i64::from(n))));
    (ring, twists)
}

pub fn named_model(id: &str) -> Result<(FusionRing, TwistData), GeneratorError> {
    let r = Rational64::new;
    match id {
        "trivial" => {
            let ring =
                FusionRing::new(vec!["0".into()], 0, vec![0], [(0, 0, 0, 1)]).expect("valid");
            Ok((ring, TwistData::trivial(1)))
        }
        "fibonacci" => {
            let ring = FusionRing::new(
                vec!["1".into(), "tau".into()],
                0,
                vec![0, 1],
                [
                    (0, 0, 0, 1),
                    (0, 1, 1, 1),
                    (1, 0, 1, 1),
                    (1, 1, 0, 1),
                    (1, 1, 1, 1),
                ],
            )
            .expect("valid");
            Ok((ring, TwistData::new([r(0, 1), r(2, 5)])))
        }
        "ising" => {
            let ring = FusionRing::new(
                vec!["1".into(), "sigma".into(), "psi".into()],
                0,
                vec![0, 1, 2],
                [
                    (0, 0, 0, 1),
                    (0, 1, 1, 1),
                    (0, 2, 2, 1),
                    (1, 0, 1, 1),
                    (1, 1, 0, 1),
                    (1, 1, 2, 1),
                    (1, 2, 1, 1),
                    (2, 0, 2, 1),
                    (2, 1, 1, 1),
                    (2, 2, 0, 1),
                ],
            )
            .expect("valid");
            Ok((ring, TwistData::new([r(0, 1), r(1, 16), r(1, 2)])))
        }
        other => Err(GeneratorError::UnknownModel(other.to_string())),
    }
}

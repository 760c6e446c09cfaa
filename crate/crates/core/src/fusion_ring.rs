//! Finite fusion rings: labels, unit, conjugation and the non-negative
//! integer fusion tensor `N_{λμ}^ν`.
//!
//! A [`FusionRing`] is only *structurally* checked on construction (indices in
//! range, non-negative multiplicities, no duplicate keys). The ring axioms are
//! checked by [`FusionRing::validate`], which collects every violation instead
//! of stopping at the first one.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Structural problems with raw ring data. These are distinct from axiom
/// violations, which are reported through [`ValidationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("ring has no labels")]
    Empty,
    #[error("{what} index {index} out of range for {len} labels")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("dual map has length {got}, expected {expected}")]
    DualLength { got: usize, expected: usize },
    #[error("negative multiplicity {value} at {key:?}")]
    NegativeMultiplicity {
        key: (usize, usize, usize),
        value: i64,
    },
    #[error("multiplicity {value} at {key:?} does not fit in u32")]
    MultiplicityOverflow {
        key: (usize, usize, usize),
        value: i64,
    },
    #[error("duplicate fusion key {0:?}")]
    DuplicateKey((usize, usize, usize)),
}

/// Numerical failure while computing dimensions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimensionError {
    #[error("Perron-Frobenius iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("dimension residual {residual:e} exceeds tolerance at ({lambda}, {mu})")]
    Residual {
        lambda: usize,
        mu: usize,
        residual: f64,
    },
}

/// A finite fusion ring with a distinguished unit and a conjugation map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    entries: BTreeMap<(usize, usize, usize), u32>,
    dense: Vec<u32>,
}

impl FusionRing {
    /// Builds a ring from sparse `(λ, μ, ν, multiplicity)` entries. Zero
    /// multiplicities are accepted and dropped.
    pub fn new<I>(
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        entries: I,
    ) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (usize, usize, usize, i64)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        if unit >= n {
            return Err(StructureError::IndexOutOfRange {
                what: "unit",
                index: unit,
                len: n,
            });
        }
        if dual.len() != n {
            return Err(StructureError::DualLength {
                got: dual.len(),
                expected: n,
            });
        }
        if let Some(&bad) = dual.iter().find(|&&d| d >= n) {
            return Err(StructureError::IndexOutOfRange {
                what: "dual",
                index: bad,
                len: n,
            });
        }
        let mut map = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (a, b, c, m) in entries {
            for idx in [a, b, c] {
                if idx >= n {
                    return Err(StructureError::IndexOutOfRange {
                        what: "fusion",
                        index: idx,
                        len: n,
                    });
                }
            }
            let key = (a, b, c);
            if !seen.insert(key) {
                return Err(StructureError::DuplicateKey(key));
            }
            if m < 0 {
                return Err(StructureError::NegativeMultiplicity { key, value: m });
            }
            let m32 = u32::try_from(m)
                .map_err(|_| StructureError::MultiplicityOverflow { key, value: m })?;
            if m32 > 0 {
                map.insert(key, m32);
            }
        }
        let mut dense = vec![0u32; n * n * n];
        for (&(a, b, c), &m) in &map {
            dense[(a * n + b) * n + c] = m;
        }
        Ok(Self {
            labels,
            unit,
            dual,
            entries: map,
            dense,
        })
    }

    /// Builds a ring from a dense closure `N(λ, μ, ν)`.
    pub fn from_fn(
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        mut n_fn: impl FnMut(usize, usize, usize) -> u32,
    ) -> Result<Self, StructureError> {
        let n = labels.len();
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let m = n_fn(a, b, c);
                    if m > 0 {
                        entries.push((a, b, c, i64::from(m)));
                    }
                }
            }
        }
        Self::new(labels, unit, dual, entries)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, label: usize) -> usize {
        self.dual[label]
    }

    pub fn dual_map(&self) -> &[usize] {
        &self.dual
    }

    /// `N_{λμ}^ν`.
    #[inline]
    pub fn n(&self, lambda: usize, mu: usize, nu: usize) -> u32 {
        let r = self.rank();
        self.dense[(lambda * r + mu) * r + nu]
    }

    /// Non-zero entries in canonical `(λ, μ, ν)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), u32)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Copy of this ring with one coefficient replaced. Used to build
    /// corrupted fixtures.
    pub fn with_entry(&self, key: (usize, usize, usize), value: u32) -> Self {
        let mut out = self.clone();
        let r = self.rank();
        if value == 0 {
            out.entries.remove(&key);
        } else {
            out.entries.insert(key, value);
        }
        out.dense[(key.0 * r + key.1) * r + key.2] = value;
        out
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank();
        (0..r).all(|a| (0..r).all(|b| (0..r).all(|c| self.n(a, b, c) == self.n(b, a, c))))
    }

    /// Checks every ring axiom and returns all violations found.
    pub fn validate(&self) -> ValidationReport {
        let r = self.rank();
        let u = self.unit;
        let mut violations = Vec::new();

        if self.dual[u] != u {
            violations.push(AxiomViolation::UnitNotSelfDual { dual: self.dual[u] });
        }
        for a in 0..r {
            if self.dual[self.dual[a]] != a {
                violations.push(AxiomViolation::DualNotInvolution { label: a });
            }
        }
        for mu in 0..r {
            for nu in 0..r {
                let expected = u32::from(mu == nu);
                let left = self.n(u, mu, nu);
                if left != expected {
                    violations.push(AxiomViolation::Unit {
                        side: Side::Left,
                        mu,
                        nu,
                        found: left,
                    });
                }
                let right = self.n(mu, u, nu);
                if right != expected {
                    violations.push(AxiomViolation::Unit {
                        side: Side::Right,
                        mu,
                        nu,
                        found: right,
                    });
                }
            }
        }
        for lambda in 0..r {
            for mu in 0..r {
                let expected = u32::from(mu == self.dual[lambda]);
                let found = self.n(lambda, mu, u);
                if found != expected {
                    violations.push(AxiomViolation::ConjugateMultiplicity { lambda, mu, found });
                }
            }
        }
        for lambda in 0..r {
            for mu in 0..r {
                for nu in 0..r {
                    let base = self.n(lambda, mu, nu);
                    let first = self.n(self.dual[lambda], nu, mu);
                    let second = self.n(nu, self.dual[mu], lambda);
                    if base != first || base != second {
                        violations.push(AxiomViolation::FrobeniusReciprocity {
                            lambda,
                            mu,
                            nu,
                            values: [base, first, second],
                        });
                    }
                }
            }
        }
        for lambda in 0..r {
            for rho in 0..r {
                for sigma in 0..r {
                    for nu in 0..r {
                        let lhs: u64 = (0..r)
                            .map(|mu| {
                                u64::from(self.n(lambda, mu, nu))
                                    * u64::from(self.n(rho, sigma, mu))
                            })
                            .sum();
                        let rhs: u64 = (0..r)
                            .map(|tau| {
                                u64::from(self.n(lambda, rho, tau))
                                    * u64::from(self.n(tau, sigma, nu))
                            })
                            .sum();
                        if lhs != rhs {
                            violations.push(AxiomViolation::Associativity {
                                lambda,
                                rho,
                                sigma,
                                nu,
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Fusion matrices `(N_μ)_{λν} = N_{λμ}^ν`, one per label.
    pub fn fusion_matrices(&self) -> Vec<DMatrix<i64>> {
        let r = self.rank();
        (0..r)
            .map(|mu| DMatrix::from_fn(r, r, |lambda, nu| i64::from(self.n(lambda, mu, nu))))
            .collect()
    }

    /// Perron-Frobenius dimensions, normalized so that `d_unit = 1`.
    pub fn quantum_dimensions(&self) -> Result<DimensionVector, DimensionError> {
        quantum_dimensions(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A single failed axiom instance with its witnessing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    UnitNotSelfDual {
        dual: usize,
    },
    DualNotInvolution {
        label: usize,
    },
    Unit {
        side: Side,
        mu: usize,
        nu: usize,
        found: u32,
    },
    ConjugateMultiplicity {
        lambda: usize,
        mu: usize,
        found: u32,
    },
    /// `[N_{λμ}^ν, N_{λ̄ν}^μ, N_{νμ̄}^λ]` were not all equal.
    FrobeniusReciprocity {
        lambda: usize,
        mu: usize,
        nu: usize,
        values: [u32; 3],
    },
    Associativity {
        lambda: usize,
        rho: usize,
        sigma: usize,
        nu: usize,
        lhs: u64,
        rhs: u64,
    },
}

impl AxiomViolation {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::UnitNotSelfDual { .. } | Self::DualNotInvolution { .. } => "involution",
            Self::Unit { .. } => "unit",
            Self::ConjugateMultiplicity { .. } => "conjugate-multiplicity",
            Self::FrobeniusReciprocity { .. } => "frobenius-reciprocity",
            Self::Associativity { .. } => "associativity",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnitNotSelfDual { dual } => write!(f, "involution: dual(unit) = {dual}"),
            Self::DualNotInvolution { label } => {
                write!(f, "involution: dual(dual({label})) != {label}")
            }
            Self::Unit {
                side,
                mu,
                nu,
                found,
            } => write!(f, "unit ({side:?}): N[0,{mu}->{nu}] = {found}"),
            Self::ConjugateMultiplicity { lambda, mu, found } => {
                write!(f, "conjugate-multiplicity: N[{lambda},{mu}->0] = {found}")
            }
            Self::FrobeniusReciprocity {
                lambda,
                mu,
                nu,
                values,
            } => write!(
                f,
                "frobenius-reciprocity at ({lambda},{mu},{nu}): {values:?}"
            ),
            Self::Associativity {
                lambda,
                rho,
                sigma,
                nu,
                lhs,
                rhs,
            } => write!(
                f,
                "associativity at ({lambda},{rho},{sigma},{nu}): {lhs} != {rhs}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a AxiomViolation> + 'a {
        self.violations.iter().filter(move |v| v.kind() == kind)
    }
}

/// Statistical dimensions and the global index `w = Σ d²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionVector {
    pub d: Vec<f64>,
    pub w: f64,
}

const PF_THRESHOLD: f64 = 1e-12;
const PF_BUDGET: usize = 100_000;
const DIMENSION_TOL: f64 = 1e-9;

fn quantum_dimensions(ring: &FusionRing) -> Result<DimensionVector, DimensionError> {
    let r = ring.rank();
    // Σ_μ N_μ plus the identity: same Perron-Frobenius vector, strictly
    // dominant eigenvalue.
    let mut m = DMatrix::<f64>::identity(r, r);
    for ((a, _, c), mult) in ring.entries() {
        m[(a, c)] += f64::from(mult);
    }
    let mut v = DVector::from_element(r, 1.0 / (r as f64).sqrt());
    let mut converged = false;
    for _ in 0..PF_BUDGET {
        let mut next = &m * &v;
        let norm = next.norm();
        next /= norm;
        let delta = (&next - &v).amax();
        v = next;
        if delta < PF_THRESHOLD {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DimensionError::NoConvergence {
            iterations: PF_BUDGET,
        });
    }

    // Rayleigh refinement: one inverse-iteration step at the Rayleigh
    // quotient polishes the last digits.
    let rq = v.dot(&(&m * &v));
    let shifted = &m - DMatrix::identity(r, r) * (rq * (1.0 + 1e-13) + 1e-13);
    if let Some(sol) = shifted.lu().solve(&v) {
        let norm = sol.norm();
        if norm.is_finite() && norm > 0.0 {
            let mut refined = sol / norm;
            if refined[0] < 0.0 || refined.iter().any(|x| *x < 0.0) {
                refined = -refined;
            }
            if refined.iter().all(|x| *x > 0.0) {
                v = refined;
            }
        }
    }

    let unit = v[ring.unit()];
    let d: Vec<f64> = v.iter().map(|x| x / unit).collect();
    for lambda in 0..r {
        for mu in 0..r {
            let lhs: f64 = (0..r)
                .map(|nu| f64::from(ring.n(lambda, mu, nu)) * d[nu])
                .sum();
            let residual = (lhs - d[lambda] * d[mu]).abs();
            if residual > DIMENSION_TOL * (1.0 + d[lambda] * d[mu]) {
                return Err(DimensionError::Residual {
                    lambda,
                    mu,
                    residual,
                });
            }
        }
    }
    let w = d.iter().map(|x| x * x).sum();
    Ok(DimensionVector { d, w })
}

//! Verification of α-induction certificates.
//!
//! A certificate supplies, for a braided N-N system, an M-M fusion algebra
//! and the branching multiplicities `A±_{λβ} = ⟨β, α±_λ⟩`. Nothing here
//! constructs α-induction; the sector-level identities it must satisfy are
//! checked instead:
//!
//! * `α_0 = id` and `Σ_β A±_{λβ} d_β = d_λ`,
//! * `v_λ v_μ = Σ_ν N_{λμ}^ν v_ν` for `v_λ = Σ_β A_{λβ} [β]` (both signs),
//! * `Z = A⁺ ᵗA⁻` is a modular invariant with `Z_00 = 1`,
//! * `Σ_{λ,μ} d_λ d_μ v⁺_λ v⁻_μ = w Σ_β d_β [β]` (generating property),
//! * `tr Z` and `tr Z ᵗZ` against the declared sector counts.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fusion_ring::FusionRing;
use crate::modular::{is_nondegenerate, modular_matrices, ModularData, ModularError};
use crate::repdecomp::BasedAlgebra;
use crate::search::{invariant_violations, MassMatrix, GRAM_NODE_BUDGET, INTEGER_TOL};
use crate::twist::TwistData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+",
            Self::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("structure: {0}")]
    Structure(String),
    #[error("unit row of A{sign} is {row:?}, expected the M-M unit")]
    UnitRow { sign: Chirality, row: Vec<u32> },
    #[error("dimension preservation fails for A{sign} at {lambda}: sum A d = {lhs}, d = {rhs}")]
    DimensionPreservation {
        sign: Chirality,
        lambda: usize,
        lhs: f64,
        rhs: f64,
    },
    #[error(
        "homomorphism fails for A{sign} at ({lambda}, {mu}), coefficient of {beta}: {lhs} != {rhs}"
    )]
    Homomorphism {
        sign: Chirality,
        lambda: usize,
        mu: usize,
        beta: usize,
        lhs: i64,
        rhs: i64,
    },
    #[error("Z00 = {z00}; the two inductions must share exactly the vacuum")]
    VacuumMultiplicity { z00: u32 },
    #[error("braiding is degenerate (degenerate labels {witnesses:?}); non-degeneracy required")]
    NondegeneracyRequired { witnesses: Vec<usize> },
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("Z is not a modular invariant: {0:?}")]
    ModularInvariance(Vec<String>),
    #[error("generating identity fails at {beta}: residual {residual:e}")]
    Generating { beta: usize, residual: f64 },
    #[error("M-M sector {beta} does not occur in any product of induced sectors")]
    NotGenerated { beta: usize },
    #[error("tr Z = {tr} but {declared} N-M sectors were declared")]
    NmCount { tr: u64, declared: u64 },
    #[error("tr Z tZ = {tr} but the M-M system has {mm} sectors")]
    MmCount { tr: u64, mm: u64 },
    #[error("<a{sign}_{lambda}, a{sign}_{mu}> = {lhs} exceeds <theta {lambda}, {mu}> = {rhs}")]
    ThetaInequality {
        sign: Chirality,
        lambda: usize,
        mu: usize,
        lhs: u64,
        rhs: u64,
    },
}

impl CertificateError {
    /// Stable short name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Structure(_) => "structure",
            Self::UnitRow { .. } => "unit-row",
            Self::DimensionPreservation { .. } => "dimension-preservation",
            Self::Homomorphism { .. } => "homomorphism",
            Self::VacuumMultiplicity { .. } => "vacuum-multiplicity",
            Self::NondegeneracyRequired { .. } => "nondegeneracy-required",
            Self::Modular(_) => "modular-data",
            Self::ModularInvariance(_) => "modular-invariance",
            Self::Generating { .. } => "generating",
            Self::NotGenerated { .. } => "not-generated",
            Self::NmCount { .. } => "nm-count",
            Self::MmCount { .. } => "mm-count",
            Self::ThetaInequality { .. } => "theta-inequality",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InductionCertificate {
    pub nn: FusionRing,
    pub twists: TwistData,
    /// Must carry a dimension vector.
    pub mm: BasedAlgebra,
    /// `nn.rank() × mm.dim()`.
    pub a_plus: DMatrix<u32>,
    pub a_minus: DMatrix<u32>,
    /// Optional `⟨λ, θ⟩` for every N-N label.
    pub theta: Option<Vec<u32>>,
    /// Optional declared number of N-M sectors.
    pub nm_count: Option<u64>,
}

impl InductionCertificate {
    /// `mm = nn`, `A± = 1`.
    pub fn trivial(nn: &FusionRing, twists: &TwistData) -> Result<Self, ModularError> {
        let dims = nn.quantum_dimensions()?;
        let n = nn.rank();
        Ok(Self {
            nn: nn.clone(),
            twists: twists.clone(),
            mm: BasedAlgebra::from_ring(nn, Some(dims.d)),
            a_plus: DMatrix::identity(n, n),
            a_minus: DMatrix::identity(n, n),
            theta: None,
            nm_count: None,
        })
    }

    /// `mm = nn`, `A⁺ = 1`, `A⁻ = C`.
    pub fn conjugation(nn: &FusionRing, twists: &TwistData) -> Result<Self, ModularError> {
        let mut cert = Self::trivial(nn, twists)?;
        let n = nn.rank();
        cert.a_minus = DMatrix::from_fn(n, n, |l, b| u32::from(b == nn.dual(l)));
        Ok(cert)
    }

    fn branching(&self, sign: Chirality) -> &DMatrix<u32> {
        match sign {
            Chirality::Plus => &self.a_plus,
            Chirality::Minus => &self.a_minus,
        }
    }

    fn mm_dims(&self) -> Result<&[f64], CertificateError> {
        self.mm
            .dims()
            .ok_or_else(|| CertificateError::Structure("M-M system has no dimension vector".into()))
    }

    fn induced(&self, sign: Chirality, lambda: usize) -> Vec<i64> {
        self.branching(sign)
            .row(lambda)
            .iter()
            .map(|&x| i64::from(x))
            .collect()
    }
}

/// Index bookkeeping between `nn`, `mm` and the branching matrices.
pub fn check_structure(cert: &InductionCertificate) -> Result<(), CertificateError> {
    let n = cert.nn.rank();
    let m = cert.mm.dim();
    for (name, a) in [("A+", &cert.a_plus), ("A-", &cert.a_minus)] {
        if a.nrows() != n || a.ncols() != m {
            return Err(CertificateError::Structure(format!(
                "{name} is {}x{}, expected {n}x{m}",
                a.nrows(),
                a.ncols()
            )));
        }
    }
    if cert.mm.unit().is_none() {
        return Err(CertificateError::Structure("M-M system has no unit".into()));
    }
    cert.mm_dims()?;
    if let Some(theta) = &cert.theta {
        if theta.len() != n {
            return Err(CertificateError::Structure(format!(
                "theta has {} entries, expected {n}",
                theta.len()
            )));
        }
    }
    cert.twists
        .check_against(&cert.nn)
        .map_err(|e| CertificateError::Structure(e.to_string()))?;
    let nn_report = cert.nn.validate();
    if let Some(v) = nn_report.violations.first() {
        return Err(CertificateError::Structure(format!("N-N ring: {v}")));
    }
    let mm_report = cert.mm.validate();
    if let Some(v) = mm_report.violations.first() {
        return Err(CertificateError::Structure(format!("M-M algebra: {v}")));
    }
    Ok(())
}

/// `α_0 = id_M` for the given sign.
pub fn verify_unit_row(
    cert: &InductionCertificate,
    sign: Chirality,
) -> Result<(), CertificateError> {
    check_structure(cert)?;
    let mu = cert.mm.unit().expect("checked");
    let row: Vec<u32> = cert
        .branching(sign)
        .row(cert.nn.unit())
        .iter()
        .copied()
        .collect();
    if row
        .iter()
        .enumerate()
        .all(|(b, &x)| x == u32::from(b == mu))
    {
        Ok(())
    } else {
        Err(CertificateError::UnitRow { sign, row })
    }
}

/// `Σ_β A_{λβ} d_β = d_λ` for every `λ`.
pub fn verify_dimensions(
    cert: &InductionCertificate,
    sign: Chirality,
    tol: f64,
) -> Result<(), CertificateError> {
    check_structure(cert)?;
    let d_nn = cert.nn.quantum_dimensions().map_err(ModularError::from)?;
    let d_mm = cert.mm_dims()?;
    let a = cert.branching(sign);
    for lambda in 0..cert.nn.rank() {
        let lhs: f64 = (0..cert.mm.dim())
            .map(|b| f64::from(a[(lambda, b)]) * d_mm[b])
            .sum();
        let rhs = d_nn.d[lambda];
        if (lhs - rhs).abs() > tol.max(1e-12) * rhs.max(1.0) * 10.0 {
            return Err(CertificateError::DimensionPreservation {
                sign,
                lambda,
                lhs,
                rhs,
            });
        }
    }
    Ok(())
}

/// `v_λ v_μ = Σ_ν N_{λμ}^ν v_ν`, exactly.
pub fn verify_homomorphism(
    cert: &InductionCertificate,
    sign: Chirality,
) -> Result<(), CertificateError> {
    check_structure(cert)?;
    let n = cert.nn.rank();
    let m = cert.mm.dim();
    let v: Vec<Vec<i64>> = (0..n).map(|l| cert.induced(sign, l)).collect();
    for lambda in 0..n {
        for mu in 0..n {
            let lhs = cert.mm.multiply(&v[lambda], &v[mu]);
            for beta in 0..m {
                let rhs: i64 = (0..n)
                    .map(|nu| i64::from(cert.nn.n(lambda, mu, nu)) * v[nu][beta])
                    .sum();
                if lhs[beta] != rhs {
                    return Err(CertificateError::Homomorphism {
                        sign,
                        lambda,
                        mu,
                        beta,
                        lhs: lhs[beta],
                        rhs,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `Z = A⁺ ᵗA⁻`, required to have `Z_00 = 1`.
pub fn branching_mass_matrix(
    cert: &InductionCertificate,
) -> Result<DMatrix<u32>, CertificateError> {
    check_structure(cert)?;
    let z = &cert.a_plus * cert.a_minus.transpose();
    let u = cert.nn.unit();
    if z[(u, u)] != 1 {
        return Err(CertificateError::VacuumMultiplicity { z00: z[(u, u)] });
    }
    Ok(z)
}

pub fn compute_z_from_branching(
    cert: &InductionCertificate,
    tol: f64,
) -> Result<MassMatrix, CertificateError> {
    let z = branching_mass_matrix(cert)?;
    let md = modular_matrices(&cert.nn, &cert.twists, tol)?;
    Ok(MassMatrix::new(z, &md, GRAM_NODE_BUDGET))
}

fn nondegenerate_data(
    cert: &InductionCertificate,
    tol: f64,
) -> Result<ModularData, CertificateError> {
    let md = modular_matrices(&cert.nn, &cert.twists, tol)?;
    let nd = is_nondegenerate(&md, tol);
    if !nd.nondegenerate {
        return Err(CertificateError::NondegeneracyRequired {
            witnesses: nd.witnesses,
        });
    }
    Ok(md)
}

/// Outcome of the generating check: the largest coefficient residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingReport {
    pub max_residual: f64,
}

/// `Σ_{λ,μ} d_λ d_μ v⁺_λ v⁻_μ = w Σ_β d_β [β]`, and every `β` occurs in
/// some `v⁺_λ v⁻_μ`.
pub fn verify_generating(
    cert: &InductionCertificate,
    tol: f64,
) -> Result<GeneratingReport, CertificateError> {
    check_structure(cert)?;
    let md = nondegenerate_data(cert, tol)?;
    let n = cert.nn.rank();
    let m = cert.mm.dim();
    let d_mm = cert.mm_dims()?;
    let plus: Vec<Vec<i64>> = (0..n).map(|l| cert.induced(Chirality::Plus, l)).collect();
    let minus: Vec<Vec<i64>> = (0..n).map(|l| cert.induced(Chirality::Minus, l)).collect();
    let mut total = vec![0.0f64; m];
    let mut occurs = vec![false; m];
    for (vp, dp) in plus.iter().zip(&md.dims) {
        for (vm, dm) in minus.iter().zip(&md.dims) {
            let prod = cert.mm.multiply(vp, vm);
            let weight = dp * dm;
            for (beta, &c) in prod.iter().enumerate() {
                total[beta] += weight * c as f64;
                occurs[beta] |= c != 0;
            }
        }
    }
    let mut max_residual = 0.0f64;
    for beta in 0..m {
        let residual = (total[beta] - md.w * d_mm[beta]).abs() / (md.w * d_mm[beta]).max(1.0);
        max_residual = max_residual.max(residual);
        if residual >= INTEGER_TOL {
            return Err(CertificateError::Generating { beta, residual });
        }
    }
    if let Some(beta) = occurs.iter().position(|o| !o) {
        return Err(CertificateError::NotGenerated { beta });
    }
    Ok(GeneratingReport { max_residual })
}

/// `⟨α_λ, α_μ⟩ ≤ ⟨θλ, μ⟩`, checked only when θ data is present.
pub fn verify_theta_inequality(
    cert: &InductionCertificate,
    sign: Chirality,
) -> Result<(), CertificateError> {
    check_structure(cert)?;
    let Some(theta) = &cert.theta else {
        return Ok(());
    };
    let n = cert.nn.rank();
    let a = cert.branching(sign);
    for lambda in 0..n {
        for mu in 0..n {
            let lhs: u64 = (0..cert.mm.dim())
                .map(|b| u64::from(a[(lambda, b)]) * u64::from(a[(mu, b)]))
                .sum();
            let rhs: u64 = (0..n)
                .map(|nu| u64::from(theta[nu]) * u64::from(cert.nn.n(nu, lambda, mu)))
                .sum();
            if lhs > rhs {
                return Err(CertificateError::ThetaInequality {
                    sign,
                    lambda,
                    mu,
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub result: Result<(), CertificateError>,
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub checks: Vec<CheckOutcome>,
    pub z: Option<MassMatrix>,
    /// `(tr Z, tr Z ᵗZ)`.
    pub counts: Option<(u64, u64)>,
}

impl CertificateReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.result.is_ok())
    }

    pub fn errors(&self) -> impl Iterator<Item = &CertificateError> {
        self.checks.iter().filter_map(|c| c.result.as_ref().err())
    }

    pub fn has_error(&self, name: &str) -> bool {
        self.errors().any(|e| e.name() == name)
    }
}

/// Runs every check and aggregates the outcomes.
pub fn full_report(cert: &InductionCertificate, tol: f64) -> CertificateReport {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, result: Result<(), CertificateError>| {
        checks.push(CheckOutcome { name, result });
    };
    let structure = check_structure(cert);
    let structural_ok = structure.is_ok();
    push("structure", structure);
    if !structural_ok {
        return CertificateReport {
            checks,
            z: None,
            counts: None,
        };
    }
    for sign in [Chirality::Plus, Chirality::Minus] {
        push(
            match sign {
                Chirality::Plus => "unit-row+",
                Chirality::Minus => "unit-row-",
            },
            verify_unit_row(cert, sign),
        );
        push(
            match sign {
                Chirality::Plus => "dimensions+",
                Chirality::Minus => "dimensions-",
            },
            verify_dimensions(cert, sign, tol),
        );
        push(
            match sign {
                Chirality::Plus => "homomorphism+",
                Chirality::Minus => "homomorphism-",
            },
            verify_homomorphism(cert, sign),
        );
        if cert.theta.is_some() {
            push(
                match sign {
                    Chirality::Plus => "theta+",
                    Chirality::Minus => "theta-",
                },
                verify_theta_inequality(cert, sign),
            );
        }
    }

    let mut z_out = None;
    let mut counts = None;
    match compute_z_from_branching(cert, tol) {
        Ok(mass) => {
            push("vacuum", Ok(()));
            let md = modular_matrices(&cert.nn, &cert.twists, tol);
            let invariance = match md {
                Ok(md) => {
                    let v = invariant_violations(&mass.z, &md, tol);
                    if v.is_empty() {
                        Ok(())
                    } else {
                        Err(CertificateError::ModularInvariance(v))
                    }
                }
                Err(e) => Err(e.into()),
            };
            push("modular-invariance", invariance);
            let (tr, trzz) = mass.counts();
            counts = Some((tr, trzz));
            if let Some(declared) = cert.nm_count {
                push(
                    "nm-count",
                    if declared == tr {
                        Ok(())
                    } else {
                        Err(CertificateError::NmCount { tr, declared })
                    },
                );
            }
            let mm = cert.mm.dim() as u64;
            push(
                "mm-count",
                if mm == trzz {
                    Ok(())
                } else {
                    Err(CertificateError::MmCount { tr: trzz, mm })
                },
            );
            z_out = Some(mass);
        }
        Err(e) => push("vacuum", Err(e)),
    }
    push("generating", verify_generating(cert, tol).map(|_| ()));
    CertificateReport {
        checks,
        z: z_out,
        counts,
    }
}

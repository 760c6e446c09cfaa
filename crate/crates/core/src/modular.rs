//! Modular data of a braided fusion ring: the `Y` matrix, the normalized
//! `S` and `T` matrices, the Gauss sum `z` and the central charge.
//!
//! `Y_{μν} = Σ_λ (ω_μ ω_ν / ω_λ) N_{μν}^λ d_λ`, `S = Y / |z|` and
//! `T = exp(-πic/12) diag(ω)` with `z = Σ d_λ² ω_λ` and `c = 4 arg(z) / π`
//! taken in `[0, 8)`.
//!
//! `S` and `T` are defined as soon as `z ≠ 0`; they form a representation of
//! the modular group only when the braiding is non-degenerate, which
//! [`is_nondegenerate`] decides.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::fusion_ring::{DimensionError, DimensionVector, FusionRing};
use crate::linalg::{max_abs, recognize_rational, to_complex, CMatrix};
use crate::twist::{frac, phase, TwistData, TwistError};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Pre-rounding tolerance for fusion coefficients recovered from `S`.
pub const VERLINDE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModularError {
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("vanishing z: |z| = {abs:e} is below tolerance")]
    VanishingZ { abs: f64 },
    #[error("braiding is degenerate (degenerate labels {witnesses:?}); non-degeneracy required")]
    NondegeneracyRequired { witnesses: Vec<usize> },
    #[error("Verlinde formula deviates from an integer by {deviation:e} at {at:?}")]
    Verlinde {
        deviation: f64,
        at: (usize, usize, usize),
    },
}

#[derive(Debug, Clone)]
pub struct ModularData {
    pub y: CMatrix,
    pub s: CMatrix,
    pub t: CMatrix,
    /// `z = Σ d_λ² ω_λ`.
    pub z: Complex64,
    pub w: f64,
    /// Central charge representative in `[0, 8)`.
    pub c: f64,
    /// `c` as an exact rational when it is recognizable as one.
    pub c_exact: Option<Rational64>,
    /// Exact exponents `t_λ` with `T_λλ = exp(2πi t_λ)`, when `c` is rational.
    pub t_exponents: Option<Vec<Rational64>>,
    pub conj: DMatrix<i64>,
    pub dims: Vec<f64>,
    pub unit: usize,
    pub twists: TwistData,
}

impl ModularData {
    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Weight vector `y^λ` (row `λ` of `Y`).
    pub fn weight_vector(&self, lambda: usize) -> Vec<Complex64> {
        self.y.row(lambda).iter().copied().collect()
    }

    /// Statistics character `χ_λ(μ) = Y_{λμ} / d_λ`.
    pub fn character(&self, lambda: usize, mu: usize) -> Complex64 {
        self.y[(lambda, mu)] / self.dims[lambda]
    }

    pub fn conj_complex(&self) -> CMatrix {
        to_complex(&self.conj)
    }
}

/// `Y_{μν} = Σ_λ (ω_μ ω_ν / ω_λ) N_{μν}^λ d_λ`, with the phase of each term
/// evaluated from the exact exponent `h_μ + h_ν - h_λ`.
pub fn y_matrix(
    ring: &FusionRing,
    twists: &TwistData,
    dims: &DimensionVector,
) -> Result<CMatrix, ModularError> {
    twists.check_against(ring)?;
    let r = ring.rank();
    let mut y = CMatrix::zeros(r, r);
    for ((mu, nu, lambda), mult) in ring.entries() {
        let exponent = twists.h(mu) + twists.h(nu) - twists.h(lambda);
        y[(mu, nu)] += phase(exponent) * (f64::from(mult) * dims.d[lambda]);
    }
    Ok(y)
}

pub fn conjugation_matrix(ring: &FusionRing) -> DMatrix<i64> {
    let r = ring.rank();
    DMatrix::from_fn(r, r, |a, b| i64::from(a == ring.dual(b)))
}

/// Builds `Y`, `S`, `T`, `z`, `w`, `c` and `C`.
pub fn modular_matrices(
    ring: &FusionRing,
    twists: &TwistData,
    tol: f64,
) -> Result<ModularData, ModularError> {
    twists.check_against(ring)?;
    let dims = ring.quantum_dimensions()?;
    let y = y_matrix(ring, twists, &dims)?;
    let r = ring.rank();

    let z: Complex64 = (0..r)
        .map(|l| twists.omega(l) * (dims.d[l] * dims.d[l]))
        .sum();
    let abs = z.norm();
    if abs < tol {
        return Err(ModularError::VanishingZ { abs });
    }
    let mut c = 4.0 * z.arg() / std::f64::consts::PI;
    c = c.rem_euclid(8.0);
    let c_exact = recognize_rational(c, 1_000_000, 1e-10)
        .map(|(p, q)| Rational64::new(p, q))
        .map(|q| {
            if q >= Rational64::from_integer(8) {
                q - 8
            } else {
                q
            }
        });
    if let Some(q) = c_exact {
        c = *q.numer() as f64 / *q.denom() as f64;
    }

    let s = y.map(|v| v / abs);
    let (t, t_exponents) = match c_exact {
        Some(cq) => {
            let exps: Vec<Rational64> = (0..r)
                .map(|l| frac(twists.h(l) - cq / Rational64::from_integer(24)))
                .collect();
            let t = CMatrix::from_fn(r, r, |a, b| {
                if a == b {
                    phase(exps[a])
                } else {
                    Complex64::zero()
                }
            });
            (t, Some(exps))
        }
        None => {
            let prefactor = Complex64::from_polar(1.0, -std::f64::consts::PI * c / 12.0);
            let t = CMatrix::from_fn(r, r, |a, b| {
                if a == b {
                    prefactor * twists.omega(a)
                } else {
                    Complex64::zero()
                }
            });
            (t, None)
        }
    };

    Ok(ModularData {
        y,
        s,
        t,
        z,
        w: dims.w,
        c,
        c_exact,
        t_exponents,
        conj: conjugation_matrix(ring),
        dims: dims.d,
        unit: ring.unit(),
        twists: twists.clone(),
    })
}

/// Named max-norm residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residuals: Vec<(&'static str, f64)>,
    pub threshold: f64,
}

impl ResidualReport {
    pub fn passes(&self) -> bool {
        self.residuals.iter().all(|(_, r)| *r < self.threshold)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, r)| *r)
    }

    pub fn max(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

fn threshold(tol: f64, n: usize) -> f64 {
    tol * (n.max(1) as f64)
}

/// Residuals of `TSTST - S`, `CTC - T`, `CSC - S` and `T*T - 1`.
pub fn check_partial_verlinde(md: &ModularData, tol: f64) -> ResidualReport {
    let n = md.rank();
    let (s, t, c) = (&md.s, &md.t, md.conj_complex());
    let id = CMatrix::identity(n, n);
    let tstst = t * s * t * s * t;
    ResidualReport {
        residuals: vec![
            ("TSTST-S", max_abs(&(tstst - s))),
            ("CTC-T", max_abs(&(&c * t * &c - t))),
            ("CSC-S", max_abs(&(&c * s * &c - s))),
            ("T*T-1", max_abs(&(t.adjoint() * t - id))),
        ],
        threshold: threshold(tol, n),
    }
}

/// Residuals of the full modular-group relations.
pub fn sl2z_relations(md: &ModularData, tol: f64) -> ResidualReport {
    let n = md.rank();
    let (s, t, c) = (&md.s, &md.t, md.conj_complex());
    let id = CMatrix::identity(n, n);
    let st = s * t;
    let s2 = s * s;
    ResidualReport {
        residuals: vec![
            ("S*S-1", max_abs(&(s.adjoint() * s - &id))),
            ("(ST)^3-S^2", max_abs(&(&st * &st * &st - &s2))),
            ("S^2-C", max_abs(&(&s2 - &c))),
            ("CTC-T", max_abs(&(&c * t * &c - t))),
        ],
        threshold: threshold(tol, n),
    }
}

/// Result of the non-degeneracy test.
#[derive(Debug, Clone, PartialEq)]
pub struct Nondegeneracy {
    pub nondegenerate: bool,
    /// Labels other than the unit whose weight vector is parallel to `y^0`.
    pub witnesses: Vec<usize>,
    /// `⟨y^λ, y^0⟩` for every `λ`.
    pub overlaps: Vec<Complex64>,
}

impl Nondegeneracy {
    pub fn witness(&self) -> Option<usize> {
        self.witnesses.first().copied()
    }
}

/// Non-degeneracy via `⟨y^λ, y^0⟩ = δ_{λ0} w`.
pub fn is_nondegenerate(md: &ModularData, tol: f64) -> Nondegeneracy {
    let n = md.rank();
    let u = md.unit;
    let overlaps: Vec<Complex64> = (0..n)
        .map(|l| (0..n).map(|m| md.y[(l, m)].conj() * md.y[(u, m)]).sum())
        .collect();
    let scale = md.w.max(1.0);
    let nondegenerate = overlaps.iter().enumerate().all(|(l, o)| {
        let target = if l == u { md.w } else { 0.0 };
        (o - target).norm() < tol * scale
    });
    let witnesses = (0..n)
        .filter(|&l| l != u)
        .filter(|&l| (0..n).all(|m| (md.y[(l, m)] - md.dims[l] * md.dims[m]).norm() < tol * scale))
        .collect();
    Nondegeneracy {
        nondegenerate,
        witnesses,
        overlaps,
    }
}

/// `|z|² = w` within relative tolerance.
pub fn gauss_sum_matches_index(md: &ModularData, tol: f64) -> bool {
    (md.z.norm_sqr() - md.w).abs() < tol * md.w
}

fn require_nondegenerate(md: &ModularData, tol: f64) -> Result<(), ModularError> {
    let nd = is_nondegenerate(md, tol);
    if nd.nondegenerate {
        Ok(())
    } else {
        Err(ModularError::NondegeneracyRequired {
            witnesses: nd.witnesses,
        })
    }
}

/// Fusion coefficients recovered from `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerlindeTensor {
    pub rank: usize,
    pub values: Vec<u32>,
    pub max_deviation: f64,
}

impl VerlindeTensor {
    pub fn get(&self, lambda: usize, mu: usize, nu: usize) -> u32 {
        self.values[(lambda * self.rank + mu) * self.rank + nu]
    }

    /// First index where the recovered tensor differs from `ring`.
    pub fn first_mismatch(&self, ring: &FusionRing) -> Option<(usize, usize, usize)> {
        let r = self.rank;
        if ring.rank() != r {
            return Some((0, 0, 0));
        }
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if self.get(a, b, c) != ring.n(a, b, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

/// `N_{λμ}^ν = Σ_ρ S_{λρ} S_{μρ} conj(S_{νρ}) / S_{0ρ}`, rounded.
pub fn verlinde_fusion(md: &ModularData, tol: f64) -> Result<VerlindeTensor, ModularError> {
    require_nondegenerate(md, tol)?;
    let r = md.rank();
    let s = &md.s;
    let u = md.unit;
    let mut values = vec![0u32; r * r * r];
    let mut max_deviation = 0.0f64;
    let mut worst = (0, 0, 0);
    for a in 0..r {
        for b in 0..r {
            let ab: Vec<Complex64> = (0..r)
                .map(|rho| s[(a, rho)] * s[(b, rho)] / s[(u, rho)])
                .collect();
            for c in 0..r {
                let v: Complex64 = (0..r).map(|rho| ab[rho] * s[(c, rho)].conj()).sum();
                let rounded = v.re.round();
                let dev = (v - Complex64::new(rounded, 0.0)).norm();
                if dev > max_deviation {
                    max_deviation = dev;
                    worst = (a, b, c);
                }
                if rounded < 0.0 {
                    return Err(ModularError::Verlinde {
                        deviation: -v.re,
                        at: (a, b, c),
                    });
                }
                values[(a * r + b) * r + c] = rounded as u32;
            }
        }
    }
    if max_deviation >= VERLINDE_TOL {
        return Err(ModularError::Verlinde {
            deviation: max_deviation,
            at: worst,
        });
    }
    Ok(VerlindeTensor {
        rank: r,
        values,
        max_deviation,
    })
}

/// One fusion channel of the monodromy on `μ ⊗ ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyChannel {
    pub lambda: usize,
    pub multiplicity: u32,
    /// Exponent `e` of the eigenvalue `exp(2πi e) = ω_λ / (ω_μ ω_ν)`, in `[0, 1)`.
    pub exponent: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monodromy {
    rank: usize,
    channels: Vec<Vec<MonodromyChannel>>,
}

impl Monodromy {
    pub fn spectrum(&self, mu: usize, nu: usize) -> &[MonodromyChannel] {
        &self.channels[mu * self.rank + nu]
    }

    /// Eigenvalues with multiplicity.
    pub fn eigenvalues(&self, mu: usize, nu: usize) -> Vec<Complex64> {
        self.spectrum(mu, nu)
            .iter()
            .flat_map(|ch| std::iter::repeat_n(phase(ch.exponent), ch.multiplicity as usize))
            .collect()
    }

    /// Labels with trivial monodromy against every label, excluding `unit`.
    pub fn degenerate_labels(&self, unit: usize) -> Vec<usize> {
        (0..self.rank)
            .filter(|&mu| mu != unit)
            .filter(|&mu| {
                (0..self.rank).all(|nu| self.spectrum(mu, nu).iter().all(|c| c.exponent.is_zero()))
            })
            .collect()
    }
}

/// Exact monodromy spectra `{ω_λ / (ω_μ ω_ν)}` with multiplicities `N_{μν}^λ`.
pub fn monodromy_matrix(ring: &FusionRing, twists: &TwistData) -> Result<Monodromy, ModularError> {
    twists.check_against(ring)?;
    let r = ring.rank();
    let mut channels = vec![Vec::new(); r * r];
    for ((mu, nu, lambda), mult) in ring.entries() {
        channels[mu * r + nu].push(MonodromyChannel {
            lambda,
            multiplicity: mult,
            exponent: frac(twists.h(lambda) - twists.h(mu) - twists.h(nu)),
        });
    }
    Ok(Monodromy { rank: r, channels })
}

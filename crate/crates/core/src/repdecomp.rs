//! Simple-block decomposition of based semisimple algebras.
//!
//! The center is computed as the commutant of the left-regular
//! representation. A random self-adjoint central element separates the
//! simple blocks: its eigenvalues on the center are the scalars it takes on
//! each block, the Lagrange interpolation polynomials in it give the
//! central idempotents `e_i`, and `rank R(e_i) = n_i²`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fusion_ring::{AxiomViolation, FusionRing, StructureError, ValidationReport};
use crate::linalg::{nullspace, RankAmbiguity};
use crate::search::MassMatrix;

pub const DEFAULT_SEED: u64 = 0x5eed;
const MAX_DRAWS: usize = 8;
const TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error("central element has colliding eigenvalues after {0} draws")]
    EigenvalueCollision(usize),
    #[error(
        "rank {rank} of a central idempotent is not a perfect square; not semisimple as expected"
    )]
    NotSemisimple { rank: usize },
    #[error("block ranks sum to {got}, algebra dimension is {dim}; not semisimple as expected")]
    DimensionMismatch { got: usize, dim: usize },
    #[error(transparent)]
    RankAmbiguity(#[from] RankAmbiguity),
}

/// A finite-dimensional algebra with a basis, non-negative integer structure
/// constants and an involution on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasedAlgebra {
    labels: Vec<String>,
    unit: Option<usize>,
    involution: Vec<usize>,
    structure: BTreeMap<(usize, usize, usize), u32>,
    dense: Vec<u32>,
    dims: Option<Vec<f64>>,
}

impl BasedAlgebra {
    pub fn new<I>(
        labels: Vec<String>,
        unit: Option<usize>,
        involution: Vec<usize>,
        entries: I,
        dims: Option<Vec<f64>>,
    ) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (usize, usize, usize, i64)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        if let Some(u) = unit.filter(|&u| u >= n) {
            return Err(StructureError::IndexOutOfRange {
                what: "unit",
                index: u,
                len: n,
            });
        }
        if involution.len() != n {
            return Err(StructureError::DualLength {
                got: involution.len(),
                expected: n,
            });
        }
        if let Some(&bad) = involution.iter().find(|&&d| d >= n) {
            return Err(StructureError::IndexOutOfRange {
                what: "involution",
                index: bad,
                len: n,
            });
        }
        if let Some(d) = &dims {
            if d.len() != n {
                return Err(StructureError::DualLength {
                    got: d.len(),
                    expected: n,
                });
            }
        }
        let mut structure = BTreeMap::new();
        for (a, b, c, m) in entries {
            for idx in [a, b, c] {
                if idx >= n {
                    return Err(StructureError::IndexOutOfRange {
                        what: "structure",
                        index: idx,
                        len: n,
                    });
                }
            }
            let key = (a, b, c);
            if structure.contains_key(&key) {
                return Err(StructureError::DuplicateKey(key));
            }
            if m < 0 {
                return Err(StructureError::NegativeMultiplicity { key, value: m });
            }
            let m = u32::try_from(m)
                .map_err(|_| StructureError::MultiplicityOverflow { key, value: m })?;
            if m > 0 {
                structure.insert(key, m);
            }
        }
        let mut dense = vec![0u32; n * n * n];
        for (&(a, b, c), &m) in &structure {
            dense[(a * n + b) * n + c] = m;
        }
        Ok(Self {
            labels,
            unit,
            involution,
            structure,
            dense,
            dims,
        })
    }

    /// The fusion ring viewed as a based algebra, with its dimensions.
    pub fn from_ring(ring: &FusionRing, dims: Option<Vec<f64>>) -> Self {
        Self::new(
            ring.labels().to_vec(),
            Some(ring.unit()),
            ring.dual_map().to_vec(),
            ring.entries().map(|((a, b, c), m)| (a, b, c, i64::from(m))),
            dims,
        )
        .expect("fusion ring data is structurally valid")
    }

    /// Group algebra from a multiplication table `table[a][b] = a·b`.
    pub fn group_algebra(table: &[Vec<usize>]) -> Self {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .expect("table has an identity");
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity)
                    .expect("every element is invertible")
            })
            .collect();
        let entries = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, table[a][b], 1)));
        Self::new(
            (0..n).map(|g| g.to_string()).collect(),
            Some(identity),
            inverse,
            entries,
            Some(vec![1.0; n]),
        )
        .expect("group table is structurally valid")
    }

    /// Matrix units `e_ij` of `M_n` with `e_ij e_jl = e_il`, `e_ij* = e_ji`.
    pub fn matrix_units(n: usize) -> Self {
        let idx = |i: usize, j: usize| i * n + j;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    entries.push((idx(i, j), idx(j, l), idx(i, l), 1));
                }
            }
        }
        let labels = (0..n * n).map(|k| format!("e{}{}", k / n, k % n)).collect();
        let involution = (0..n * n).map(|k| idx(k % n, k / n)).collect();
        Self::new(labels, None, involution, entries, None).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn involution(&self, b: usize) -> usize {
        self.involution[b]
    }

    pub fn involution_map(&self) -> &[usize] {
        &self.involution
    }

    pub fn dims(&self) -> Option<&[f64]> {
        self.dims.as_deref()
    }

    pub fn with_dims(mut self, dims: Vec<f64>) -> Self {
        self.dims = Some(dims);
        self
    }

    #[inline]
    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        let r = self.dim();
        self.dense[(a * r + b) * r + c]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), u32)> + '_ {
        self.structure.iter().map(|(&k, &v)| (k, v))
    }

    /// Product of two coefficient vectors.
    pub fn multiply(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim()];
        for (&(a, b, c), &m) in &self.structure {
            out[c] += x[a] * y[b] * i64::from(m);
        }
        out
    }

    /// Relabels the basis: new index `perm[i]` holds old basis element `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        let mut labels = vec![String::new(); n];
        let mut involution = vec![0; n];
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
            involution[perm[i]] = perm[self.involution[i]];
        }
        let dims = self.dims.as_ref().map(|d| {
            let mut out = vec![0.0; n];
            for i in 0..n {
                out[perm[i]] = d[i];
            }
            out
        });
        let entries = self
            .entries()
            .map(|((a, b, c), m)| (perm[a], perm[b], perm[c], i64::from(m)));
        Self::new(
            labels,
            self.unit.map(|u| perm[u]),
            involution,
            entries,
            dims,
        )
        .expect("permutation preserves structure")
    }

    /// Unit axiom (when a unit is declared), associativity and the
    /// anti-automorphism property of the involution.
    pub fn validate(&self) -> ValidationReport {
        let r = self.dim();
        let mut violations = Vec::new();
        for b in 0..r {
            if self.involution[self.involution[b]] != b {
                violations.push(AxiomViolation::DualNotInvolution { label: b });
            }
        }
        if let Some(u) = self.unit {
            for mu in 0..r {
                for nu in 0..r {
                    let e = u32::from(mu == nu);
                    let (l, rt) = (self.n(u, mu, nu), self.n(mu, u, nu));
                    if l != e {
                        violations.push(AxiomViolation::Unit {
                            side: crate::fusion_ring::Side::Left,
                            mu,
                            nu,
                            found: l,
                        });
                    }
                    if rt != e {
                        violations.push(AxiomViolation::Unit {
                            side: crate::fusion_ring::Side::Right,
                            mu,
                            nu,
                            found: rt,
                        });
                    }
                }
            }
        }
        let inv = &self.involution;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    let lhs = self.n(a, b, c);
                    let rhs = self.n(inv[b], inv[a], inv[c]);
                    if lhs != rhs {
                        violations.push(AxiomViolation::FrobeniusReciprocity {
                            lambda: a,
                            mu: b,
                            nu: c,
                            values: [lhs, rhs, rhs],
                        });
                    }
                }
            }
        }
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        // (ab)c vs a(bc), coefficient of d.
                        let lhs: u64 = (0..r)
                            .map(|m| u64::from(self.n(a, b, m)) * u64::from(self.n(m, c, d)))
                            .sum();
                        let rhs: u64 = (0..r)
                            .map(|m| u64::from(self.n(b, c, m)) * u64::from(self.n(a, m, d)))
                            .sum();
                        if lhs != rhs {
                            violations.push(AxiomViolation::Associativity {
                                lambda: a,
                                rho: b,
                                sigma: c,
                                nu: d,
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

    /// Left-regular matrices: `(R_β)_{γ'', γ'} = N_{β γ'}^{γ''}`.
    pub fn regular_representation(&self) -> Vec<DMatrix<f64>> {
        let r = self.dim();
        (0..r)
            .map(|b| DMatrix::from_fn(r, r, |out, inp| f64::from(self.n(b, inp, out))))
            .collect()
    }
}

/// Sizes of the simple matrix blocks, largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockProfile(pub Vec<usize>);

impl BlockProfile {
    pub fn new(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Self(sizes)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&n| n == 1)
    }
}

/// Basis of the center as coefficient vectors (columns).
fn center_basis(alg: &BasedAlgebra) -> Result<DMatrix<f64>, RankAmbiguity> {
    let r = alg.dim();
    // Σ_β x_β (N_{βγ}^δ − N_{γβ}^δ) = 0 for all γ, δ.
    let mut a = DMatrix::<f64>::zeros(r * r, r);
    for g in 0..r {
        for d in 0..r {
            for b in 0..r {
                a[(g * r + d, b)] = f64::from(alg.n(b, g, d)) - f64::from(alg.n(g, b, d));
            }
        }
    }
    nullspace(&a, 1e-9)
}

fn block_size(rank: usize) -> Result<usize, DecompError> {
    let root = (rank as f64).sqrt().round() as usize;
    if root * root != rank {
        return Err(DecompError::NotSemisimple { rank });
    }
    Ok(root)
}

pub fn decompose_semisimple(alg: &BasedAlgebra, seed: u64) -> Result<BlockProfile, DecompError> {
    let r = alg.dim();
    let regular = alg.regular_representation();
    let center = center_basis(alg)?;
    let k = center.ncols();
    if k == 1 {
        return finish(vec![block_size(r)?], r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'draw: for _ in 0..MAX_DRAWS {
        let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z = &center * nalgebra::DVector::from_vec(coeffs);
        let rz = regular
            .iter()
            .zip(z.iter())
            .fold(DMatrix::<f64>::zeros(r, r), |acc, (m, &c)| acc + m * c);

        // Action of z on the center, in the center basis.
        let image = &rz * &center;
        // The center basis is orthonormal and `image` lies in its span.
        let restricted = center.transpose() * image;
        let values: Vec<Complex64> = restricted.complex_eigenvalues().iter().copied().collect();
        let spread = values
            .iter()
            .flat_map(|a| values.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        let min_gap = values
            .iter()
            .enumerate()
            .flat_map(|(i, a)| values[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        if min_gap < 1e-6 * spread.max(1e-12) {
            continue;
        }

        let rz = rz.map(|x| Complex64::new(x, 0.0));
        let id = DMatrix::<Complex64>::identity(r, r);
        let mut sizes = Vec::with_capacity(k);
        for (i, &ci) in values.iter().enumerate() {
            let mut e = id.clone();
            for (j, &cj) in values.iter().enumerate() {
                if i != j {
                    e = e * (&rz - &id * cj) / (ci - cj);
                }
            }
            // The rank of an idempotent is its trace.
            let tr = e.trace();
            let rank = tr.re.round();
            if (tr - Complex64::new(rank, 0.0)).norm() > TRACE_TOL || rank < 1.0 {
                continue 'draw;
            }
            sizes.push(block_size(rank as usize)?);
        }
        return finish(sizes, r);
    }
    Err(DecompError::EigenvalueCollision(MAX_DRAWS))
}

fn finish(sizes: Vec<usize>, dim: usize) -> Result<BlockProfile, DecompError> {
    let profile = BlockProfile::new(sizes);
    if profile.dimension() != dim {
        // A lone block must have square dimension.
        return Err(if profile.0.len() == 1 {
            DecompError::NotSemisimple { rank: dim }
        } else {
            DecompError::DimensionMismatch {
                got: profile.dimension(),
                dim,
            }
        });
    }
    Ok(profile)
}

/// Nonzero entries of `Z` as a multiset equal the block profile.
pub fn verify_dimension_theorem(z: &MassMatrix, profile: &BlockProfile) -> bool {
    entries_match_profile(&z.z, profile)
}

pub fn entries_match_profile(z: &DMatrix<u32>, profile: &BlockProfile) -> bool {
    let mut entries: Vec<usize> = z.iter().filter(|&&x| x != 0).map(|&x| x as usize).collect();
    entries.sort_unstable_by(|a, b| b.cmp(a));
    entries == profile.0
}

pub fn is_commutative(alg: &BasedAlgebra) -> bool {
    let r = alg.dim();
    (0..r).all(|a| (0..r).all(|b| (0..r).all(|c| alg.n(a, b, c) == alg.n(b, a, c))))
}

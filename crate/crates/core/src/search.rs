//! Enumeration and classification of modular invariant mass matrices.
//!
//! A mass matrix `Z` is a non-negative integer matrix with `Z_00 = 1` that
//! commutes with `S` and `T`. Commuting with `T` confines `Z` to the cells
//! where the twist exponents agree exactly; on that support the real
//! solutions of `SZ = ZS` form a small linear space (the commutant). The
//! search picks one pivot cell per commutant dimension, enumerates integer
//! values on the pivots under the budget `Σ d_λ d_μ Z_{λμ} = w`, and
//! reconstructs the rest of the matrix from the basis.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{max_abs, nullspace, CMatrix, RankAmbiguity};
use crate::modular::{is_nondegenerate, ModularData, DEFAULT_TOL};
use crate::twist::TwistData;

/// Tolerance for reconstructed entries to count as integers.
pub const INTEGER_TOL: f64 = 1e-6;

/// Node budget of the type-I factorization search.
pub const GRAM_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("braiding is degenerate (degenerate labels {witnesses:?}); non-degeneracy required")]
    NondegeneracyRequired { witnesses: Vec<usize> },
    #[error(transparent)]
    RankAmbiguity(#[from] RankAmbiguity),
    #[error("commutant does not reach the (0,0) cell")]
    NoUnitPivot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub tol: f64,
    pub jobs: usize,
    pub gram_budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            jobs: 1,
            gram_budget: GRAM_NODE_BUDGET,
        }
    }
}

/// `mask[λ][μ]` is true iff `h_λ = h_μ` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistMask {
    n: usize,
    allowed: Vec<bool>,
}

impl TwistMask {
    pub fn allows(&self, lambda: usize, mu: usize) -> bool {
        self.allowed[lambda * self.n + mu]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Allowed cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| (0..self.n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.allows(a, b))
            .collect()
    }
}

pub fn twist_sparsity(twists: &TwistData) -> TwistMask {
    let n = twists.len();
    let allowed = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| twists.h(a) == twists.h(b))
        .collect();
    TwistMask { n, allowed }
}

/// Orthonormal real basis of `{X supported on mask : SX = XS}`.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    pub cells: Vec<(usize, usize)>,
    /// `cells.len() × m`; column `j` holds basis matrix `j` on the cells.
    pub coords: DMatrix<f64>,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn matrix(&self, j: usize, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for (i, &(a, b)) in self.cells.iter().enumerate() {
            m[(a, b)] = self.coords[(i, j)];
        }
        m
    }
}

pub fn commutant_basis(
    s: &CMatrix,
    mask: &TwistMask,
    tol: f64,
) -> Result<CommutantBasis, RankAmbiguity> {
    let n = s.nrows();
    let cells = mask.cells();
    let mut a = DMatrix::<f64>::zeros(2 * n * n, cells.len());
    for (col, &(ca, cb)) in cells.iter().enumerate() {
        // (SX)_{i,cb} gains S_{i,ca}; (XS)_{ca,j} gains S_{cb,j}.
        for i in 0..n {
            let row = 2 * (i * n + cb);
            a[(row, col)] += s[(i, ca)].re;
            a[(row + 1, col)] += s[(i, ca)].im;
        }
        for j in 0..n {
            let row = 2 * (ca * n + j);
            a[(row, col)] -= s[(cb, j)].re;
            a[(row + 1, col)] -= s[(cb, j)].im;
        }
    }
    let cutoff = 100.0 * tol * n.max(1) as f64;
    let coords = nullspace(&a, cutoff)?;
    Ok(CommutantBasis { cells, coords })
}

/// Tri-state outcome of the type-I factorization search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeOne {
    /// `Z = ᵗB B`; rows of `B` are given.
    Yes(Vec<Vec<u32>>),
    No,
    Unknown,
}

impl TypeOne {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Yes(_) => "yes",
            Self::No => "no",
            Self::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flags {
    pub is_identity: bool,
    pub is_permutation: bool,
    pub is_symmetric: bool,
    pub type_one: TypeOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `max |SZ - ZS|`.
    pub s: f64,
    /// `max |TZ - ZT|`.
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassMatrix {
    pub z: DMatrix<u32>,
    pub residuals: Residuals,
    pub flags: Flags,
}

impl MassMatrix {
    /// Computes residuals and flags for `z` against `md`.
    pub fn new(z: DMatrix<u32>, md: &ModularData, gram_budget: u64) -> Self {
        let residuals = commutation_residuals(&z, md);
        let flags = classify_invariant(&z, gram_budget);
        Self {
            z,
            residuals,
            flags,
        }
    }

    pub fn size(&self) -> usize {
        self.z.nrows()
    }

    pub fn counts(&self) -> (u64, u64) {
        invariant_counts(&self.z)
    }

    /// Every violated mass-matrix condition, as text.
    pub fn violations(&self, md: &ModularData, tol: f64) -> Vec<String> {
        invariant_violations(&self.z, md, tol)
    }
}

pub fn commutation_residuals(z: &DMatrix<u32>, md: &ModularData) -> Residuals {
    let zc: CMatrix = z.map(|x| Complex64::new(f64::from(x), 0.0));
    Residuals {
        s: max_abs(&(&md.s * &zc - &zc * &md.s)),
        t: max_abs(&(&md.t * &zc - &zc * &md.t)),
    }
}

/// Threshold for `‖SZ - ZS‖` on an integer matrix.
pub fn commutation_threshold(z: &DMatrix<u32>, tol: f64) -> f64 {
    let zmax = z.iter().copied().max().unwrap_or(0).max(1);
    tol * z.nrows().max(1) as f64 * f64::from(zmax)
}

/// Checks `Z_00 = 1`, exact T-support, S-commutation, `Σ d d Z = w` and
/// `Σ Z ≤ w`.
pub fn invariant_violations(z: &DMatrix<u32>, md: &ModularData, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    let n = md.rank();
    if z.nrows() != n || z.ncols() != n {
        out.push(format!(
            "size {}x{} does not match rank {n}",
            z.nrows(),
            z.ncols()
        ));
        return out;
    }
    let u = md.unit;
    if z[(u, u)] != 1 {
        out.push(format!("Z00 = {} (expected 1)", z[(u, u)]));
    }
    let mask = twist_sparsity(&md.twists);
    for a in 0..n {
        for b in 0..n {
            if z[(a, b)] != 0 && !mask.allows(a, b) {
                out.push(format!("entry ({a},{b}) outside the twist support"));
            }
        }
    }
    let res = commutation_residuals(z, md);
    if res.s >= commutation_threshold(z, tol) {
        out.push(format!("|SZ - ZS| = {:e}", res.s));
    }
    let weighted = weighted_sum(z, &md.dims);
    if (weighted - md.w).abs() > INTEGER_TOL * md.w {
        out.push(format!("sum d d Z = {weighted} != w = {}", md.w));
    }
    let total: u64 = z.iter().map(|&x| u64::from(x)).sum();
    if total as f64 > md.w * (1.0 + INTEGER_TOL) {
        out.push(format!("sum Z = {total} exceeds w = {}", md.w));
    }
    out
}

pub fn weighted_sum(z: &DMatrix<u32>, dims: &[f64]) -> f64 {
    let n = z.nrows();
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            acc += dims[a] * dims[b] * f64::from(z[(a, b)]);
        }
    }
    acc
}

/// `(tr Z, tr Z ᵗZ)`.
pub fn invariant_counts(z: &DMatrix<u32>) -> (u64, u64) {
    let tr = (0..z.nrows()).map(|a| u64::from(z[(a, a)])).sum();
    let sq = z.iter().map(|&x| u64::from(x) * u64::from(x)).sum();
    (tr, sq)
}

pub fn classify_invariant(z: &DMatrix<u32>, gram_budget: u64) -> Flags {
    let n = z.nrows();
    let is_identity = (0..n).all(|a| (0..n).all(|b| z[(a, b)] == u32::from(a == b)));
    let is_permutation = z.iter().all(|&x| x <= 1)
        && (0..n).all(|a| z.row(a).iter().sum::<u32>() == 1)
        && (0..n).all(|b| z.column(b).iter().sum::<u32>() == 1);
    let is_symmetric = z == &z.transpose();
    let type_one = if is_symmetric {
        gram_factor(z, gram_budget)
    } else {
        TypeOne::No
    };
    Flags {
        is_identity,
        is_permutation,
        is_symmetric,
        type_one,
    }
}

/// Searches for a non-negative integer `B` with `ᵗB B = Z`, filling one
/// column of `B` per label. Existing rows receive values satisfying the
/// inner products with earlier columns; the leftover diagonal weight goes
/// to fresh rows.
fn gram_factor(z: &DMatrix<u32>, budget: u64) -> TypeOne {
    let n = z.nrows();
    if n == 0 {
        return TypeOne::Yes(Vec::new());
    }
    let mut search = GramSearch {
        z,
        rows: Vec::new(),
        group: Vec::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    if search.column(0) {
        let rows = search.rows.into_iter().collect();
        TypeOne::Yes(rows)
    } else if search.exhausted {
        TypeOne::Unknown
    } else {
        TypeOne::No
    }
}

struct GramSearch<'a> {
    z: &'a DMatrix<u32>,
    rows: Vec<Vec<u32>>,
    /// Rows sharing a group id are equal on all processed columns.
    group: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl GramSearch<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn column(&mut self, col: usize) -> bool {
        if col == self.z.nrows() {
            return true;
        }
        let targets: Vec<u32> = (0..col).map(|mu| self.z[(mu, col)]).collect();
        let diag = self.z[(col, col)];
        let mut values = vec![0u32; self.rows.len()];
        self.assign(col, 0, &targets, diag, &mut values)
    }

    fn assign(
        &mut self,
        col: usize,
        i: usize,
        targets: &[u32],
        diag_left: u32,
        values: &mut Vec<u32>,
    ) -> bool {
        if !self.tick() {
            return false;
        }
        if i == self.rows.len() {
            // Inner products with earlier columns must be met exactly.
            for (mu, &t) in targets.iter().enumerate() {
                let dot: u32 = self
                    .rows
                    .iter()
                    .zip(values.iter())
                    .map(|(row, &x)| row[mu] * x)
                    .sum();
                if dot != t {
                    return false;
                }
            }
            return self.fresh_rows(col, diag_left, values, u32::MAX);
        }
        let mut cap = isqrt(diag_left);
        if i > 0 && self.group[i] == self.group[i - 1] {
            cap = cap.min(values[i - 1]);
        }
        for (mu, &t) in targets.iter().enumerate() {
            let partial: u32 = (0..i).map(|j| self.rows[j][mu] * values[j]).sum();
            if let Some(limit) = t.saturating_sub(partial).checked_div(self.rows[i][mu]) {
                cap = cap.min(limit);
            }
        }
        for x in (0..=cap).rev() {
            values[i] = x;
            if self.assign(col, i + 1, targets, diag_left - x * x, values) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        values[i] = 0;
        false
    }

    /// Distributes `left` over new rows as a non-increasing sequence of
    /// positive entries whose squares sum to `left`.
    fn fresh_rows(&mut self, col: usize, left: u32, values: &mut Vec<u32>, max: u32) -> bool {
        if !self.tick() {
            return false;
        }
        if left == 0 {
            let saved_rows = self.rows.clone();
            let saved_group = self.group.clone();
            self.apply_column(col, values);
            if self.column(col + 1) {
                return true;
            }
            self.rows = saved_rows;
            self.group = saved_group;
            return false;
        }
        let top = isqrt(left).min(max);
        for x in (1..=top).rev() {
            values.push(x);
            if self.fresh_rows(col, left - x * x, values, x) {
                return true;
            }
            values.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }

    fn apply_column(&mut self, col: usize, values: &[u32]) {
        let existing = self.rows.len();
        for (row, &x) in self.rows.iter_mut().zip(values.iter()) {
            debug_assert_eq!(row.len(), col);
            row.push(x);
        }
        for &x in &values[existing..] {
            let mut row = vec![0; col];
            row.push(x);
            self.rows.push(row);
        }
        // Regroup: rows stay adjacent and split where values differ.
        let mut next = Vec::with_capacity(self.rows.len());
        let mut id = 0usize;
        for i in 0..self.rows.len() {
            if i > 0 && (self.rows[i] != self.rows[i - 1]) {
                id += 1;
            }
            next.push(id);
        }
        self.group = next;
    }
}

fn isqrt(x: u32) -> u32 {
    let mut r = (f64::from(x)).sqrt() as u32;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

struct Enumerator<'a> {
    n: usize,
    cells: &'a [(usize, usize)],
    coords: &'a DMatrix<f64>,
    pivots: Vec<usize>,
    bounds: Vec<u32>,
    costs: Vec<f64>,
    pivot_inverse: DMatrix<f64>,
    md: &'a ModularData,
    tol: f64,
}

impl Enumerator<'_> {
    fn reconstruct(&self, pivot_values: &[u32]) -> Option<DMatrix<u32>> {
        let rhs = nalgebra::DVector::from_iterator(
            pivot_values.len(),
            pivot_values.iter().map(|&v| f64::from(v)),
        );
        let coeffs = &self.pivot_inverse * rhs;
        let values = self.coords * coeffs;
        let mut z = DMatrix::<u32>::zeros(self.n, self.n);
        for (i, &(a, b)) in self.cells.iter().enumerate() {
            let v = values[i];
            let r = v.round();
            if (v - r).abs() >= INTEGER_TOL || r < 0.0 {
                return None;
            }
            z[(a, b)] = r as u32;
        }
        let u = self.md.unit;
        if z[(u, u)] != 1 {
            return None;
        }
        let weighted = weighted_sum(&z, &self.md.dims);
        if (weighted - self.md.w).abs() > INTEGER_TOL * self.md.w {
            return None;
        }
        let res = commutation_residuals(&z, self.md);
        if res.s >= commutation_threshold(&z, self.tol) {
            return None;
        }
        Some(z)
    }

    fn walk(&self, depth: usize, spent: f64, values: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
        if depth == self.pivots.len() {
            if let Some(z) = self.reconstruct(values) {
                out.insert(flatten(&z));
            }
            return;
        }
        let cost = self.costs[depth];
        for v in 0..=self.bounds[depth] {
            let next = spent + cost * f64::from(v);
            if next > self.md.w * (1.0 + INTEGER_TOL) {
                break;
            }
            values.push(v);
            self.walk(depth + 1, next, values, out);
            values.pop();
        }
    }
}

fn flatten(z: &DMatrix<u32>) -> Vec<u32> {
    let n = z.nrows();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|c| z[c])
        .collect()
}

fn unflatten(n: usize, v: &[u32]) -> DMatrix<u32> {
    DMatrix::from_row_slice(n, n, v)
}

/// Chooses `m` pivot cells with a well-conditioned pivot block, starting
/// with the unit cell and preferring cells with small value bounds.
fn choose_pivots(
    basis: &CommutantBasis,
    unit_cell: usize,
    bounds: &[u32],
) -> Result<Vec<usize>, SearchError> {
    let m = basis.dim();
    let rows: Vec<nalgebra::DVector<f64>> = (0..basis.cells.len())
        .map(|i| basis.coords.row(i).transpose())
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<nalgebra::DVector<f64>> = Vec::new();
    let residual = |v: &nalgebra::DVector<f64>, ortho: &[nalgebra::DVector<f64>]| {
        let mut r = v.clone();
        for q in ortho {
            r -= q * q.dot(v);
        }
        r
    };
    if rows[unit_cell].norm() < 1e-8 {
        return Err(SearchError::NoUnitPivot);
    }
    chosen.push(unit_cell);
    ortho.push(rows[unit_cell].normalize());
    while chosen.len() < m {
        let res: Vec<f64> = rows.iter().map(|v| residual(v, &ortho).norm()).collect();
        let best = res.iter().copied().fold(0.0, f64::max);
        let pick = (0..rows.len())
            .filter(|i| !chosen.contains(i) && res[*i] >= 0.25 * best)
            .min_by(|&i, &j| {
                bounds[i]
                    .cmp(&bounds[j])
                    .then(res[j].partial_cmp(&res[i]).unwrap())
                    .then(i.cmp(&j))
            })
            .expect("commutant rows span the basis");
        let r = residual(&rows[pick], &ortho);
        ortho.push(r.normalize());
        chosen.push(pick);
    }
    Ok(chosen)
}

/// Every modular invariant for `md`, identity first, the rest in
/// lexicographic order of their row-major entries.
pub fn search_invariants(
    md: &ModularData,
    opts: &SearchOptions,
) -> Result<Vec<MassMatrix>, SearchError> {
    let nd = is_nondegenerate(md, opts.tol);
    if !nd.nondegenerate {
        return Err(SearchError::NondegeneracyRequired {
            witnesses: nd.witnesses,
        });
    }
    let n = md.rank();
    let u = md.unit;
    let mask = twist_sparsity(&md.twists);
    let basis = commutant_basis(&md.s, &mask, opts.tol)?;
    let cells = &basis.cells;
    let bounds: Vec<u32> = cells
        .iter()
        .map(|&(a, b)| ((md.w * (1.0 + INTEGER_TOL)) / (md.dims[a] * md.dims[b])).floor() as u32)
        .collect();
    let unit_cell = cells
        .iter()
        .position(|&c| c == (u, u))
        .expect("diagonal is always allowed");
    let pivots = choose_pivots(&basis, unit_cell, &bounds)?;
    let m = pivots.len();
    let block = DMatrix::from_fn(m, m, |i, j| basis.coords[(pivots[i], j)]);
    let pivot_inverse = block.try_inverse().ok_or(SearchError::NoUnitPivot)?;

    let mut enumerator = Enumerator {
        n,
        cells,
        coords: &basis.coords,
        bounds: pivots.iter().map(|&p| bounds[p]).collect(),
        costs: pivots
            .iter()
            .map(|&p| md.dims[cells[p].0] * md.dims[cells[p].1])
            .collect(),
        pivots,
        pivot_inverse,
        md,
        tol: opts.tol,
    };
    enumerator.bounds[0] = 1;

    let jobs = opts.jobs.max(1);
    let mut found = BTreeSet::new();
    let unit_cost = enumerator.costs[0];
    if m == 1 || jobs == 1 {
        enumerator.walk(1, unit_cost, &mut vec![1], &mut found);
    } else {
        let first: Vec<u32> = (0..=enumerator.bounds[1]).collect();
        let results: Vec<BTreeSet<Vec<u32>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|worker| {
                    let e = &enumerator;
                    let first = &first;
                    scope.spawn(move || {
                        let mut local = BTreeSet::new();
                        for &v in first.iter().skip(worker).step_by(jobs) {
                            let spent = unit_cost + e.costs[1] * f64::from(v);
                            if spent > e.md.w * (1.0 + INTEGER_TOL) {
                                continue;
                            }
                            e.walk(2, spent, &mut vec![1, v], &mut local);
                        }
                        local
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        for r in results {
            found.extend(r);
        }
    }

    let identity = flatten(&DMatrix::identity(n, n));
    let mut ordered: Vec<Vec<u32>> = Vec::with_capacity(found.len());
    if found.remove(&identity) {
        ordered.push(identity);
    }
    ordered.extend(found);
    Ok(ordered
        .into_iter()
        .map(|v| MassMatrix::new(unflatten(n, &v), md, opts.gram_budget))
        .collect())
}

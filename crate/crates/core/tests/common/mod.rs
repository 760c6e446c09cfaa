#![allow(dead_code)]

use std::collections::BTreeSet;

use fusionkit::repdecomp::BasedAlgebra;
use fusionkit::FusionRing;
use nalgebra::DMatrix;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------- SU(2)_k

/// `√(2/(k+2)) sin(π(a+1)(b+1)/(k+2))`.
pub fn su2_s_oracle(k: u32) -> DMatrix<f64> {
    let n = (k + 1) as usize;
    let kk = f64::from(k + 2);
    DMatrix::from_fn(n, n, |a, b| {
        (2.0 / kk).sqrt() * (std::f64::consts::PI * ((a + 1) * (b + 1)) as f64 / kk).sin()
    })
}

pub fn su2_h_oracle(k: u32, a: usize) -> Rational64 {
    let a = a as i64;
    Rational64::new(a * (a + 2), 4 * (i64::from(k) + 2))
}

/// Truncated Clebsch-Gordan rule.
pub fn su2_fusion_oracle(k: u32, a: usize, b: usize, c: usize) -> u32 {
    let k = k as usize;
    let lo = a.abs_diff(b);
    let hi = (a + b).min(2 * k - a - b);
    u32::from((a + b + c).is_multiple_of(2) && lo <= c && c <= hi)
}

pub fn reduce(x: Rational64) -> Rational64 {
    x - Rational64::from_integer(x.floor().to_integer())
}

// ------------------------------------------------- brute-force invariants

/// Exhaustive search over the twist mask under `Σ d d Z = w`, using only the
/// closed-form S and twists. Independent of the library search.
pub fn brute_force_su2_invariants(k: u32) -> Vec<DMatrix<u32>> {
    let n = (k + 1) as usize;
    let s = su2_s_oracle(k);
    let d: Vec<f64> = (0..n).map(|a| s[(0, a)] / s[(0, 0)]).collect();
    let w: f64 = d.iter().map(|x| x * x).sum();
    let h: Vec<Rational64> = (0..n).map(|a| su2_h_oracle(k, a)).collect();
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0) && (h[a] - h[b]).is_integer())
        .collect();
    let mut z = DMatrix::<u32>::zeros(n, n);
    z[(0, 0)] = 1;
    let mut found = BTreeSet::new();
    dfs(&cells, 0, w - 1.0, &d, &s, &mut z, &mut found);
    found
        .into_iter()
        .map(|v: Vec<u32>| DMatrix::from_row_slice(n, n, &v))
        .collect()
}

fn dfs(
    cells: &[(usize, usize)],
    i: usize,
    remaining: f64,
    d: &[f64],
    s: &DMatrix<f64>,
    z: &mut DMatrix<u32>,
    found: &mut BTreeSet<Vec<u32>>,
) {
    if i == cells.len() {
        if remaining.abs() < 1e-6 && commutes(z, s) {
            found.insert(z.transpose().iter().copied().collect());
        }
        return;
    }
    let (a, b) = cells[i];
    let weight = d[a] * d[b];
    let max = ((remaining + 1e-6) / weight).floor().max(0.0) as u32;
    for x in 0..=max {
        z[(a, b)] = x;
        dfs(
            cells,
            i + 1,
            remaining - f64::from(x) * weight,
            d,
            s,
            z,
            found,
        );
    }
    z[(a, b)] = 0;
}

fn commutes(z: &DMatrix<u32>, s: &DMatrix<f64>) -> bool {
    let zf = z.map(f64::from);
    let r = s * &zf - &zf * s;
    r.amax() < 1e-8
}

// ------------------------------------------------ brute-force ring axioms

/// Kinds of violated axioms, checked by direct quantifier expansion.
pub fn brute_force_axioms(ring: &FusionRing) -> BTreeSet<&'static str> {
    let r = ring.rank();
    let (u, dual) = (ring.unit(), ring.dual_map());
    let n = |a, b, c| ring.n(a, b, c);
    let mut kinds = BTreeSet::new();
    if dual[u] != u || (0..r).any(|a| dual[dual[a]] != a) {
        kinds.insert("involution");
    }
    for a in 0..r {
        for b in 0..r {
            let delta = u32::from(a == b);
            if n(u, a, b) != delta || n(a, u, b) != delta {
                kinds.insert("unit");
            }
            if n(a, b, u) != u32::from(b == dual[a]) {
                kinds.insert("conjugate-multiplicity");
            }
            for c in 0..r {
                if n(a, b, c) != n(dual[a], c, b) || n(a, b, c) != n(c, dual[b], a) {
                    kinds.insert("frobenius-reciprocity");
                }
                for e in 0..r {
                    let lhs: u32 = (0..r).map(|x| n(a, b, x) * n(x, c, e)).sum();
                    let rhs: u32 = (0..r).map(|x| n(b, c, x) * n(a, x, e)).sum();
                    if lhs != rhs {
                        kinds.insert("associativity");
                    }
                }
            }
        }
    }
    kinds
}

// ------------------------------------------------------- finite groups

pub type Perm = Vec<usize>;

fn compose(p: &Perm, q: &Perm) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

/// Closure of `gens` in `S_m`, as a multiplication table with the identity
/// at index 0.
pub fn group_table(gens: &[Perm], m: usize) -> Vec<Vec<usize>> {
    let id: Perm = (0..m).collect();
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p = compose(&elems[i], g);
            if !elems.contains(&p) {
                elems.push(p);
            }
        }
        i += 1;
    }
    let idx = |p: &Perm| elems.iter().position(|q| q == p).unwrap();
    elems
        .iter()
        .map(|a| elems.iter().map(|b| idx(&compose(a, b))).collect())
        .collect()
}

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|a| (0..n).map(|b| (a + b) % n).collect())
        .collect()
}

pub fn product_table(g: &[Vec<usize>], h: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let (p, q) = (g.len(), h.len());
    (0..p * q)
        .map(|x| {
            (0..p * q)
                .map(|y| g[x / q][y / q] * q + h[x % q][y % q])
                .collect()
        })
        .collect()
}

fn inverse(table: &[Vec<usize>], g: usize) -> usize {
    (0..table.len()).find(|&h| table[g][h] == 0).unwrap()
}

fn class_count(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for g in 0..n {
        if seen[g] {
            continue;
        }
        count += 1;
        for x in 0..n {
            seen[table[table[x][g]][inverse(table, x)]] = true;
        }
    }
    count
}

fn derived_order(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let mut sub: BTreeSet<usize> = BTreeSet::from([0]);
    for a in 0..n {
        for b in 0..n {
            let c = table[table[a][b]][table[inverse(table, a)][inverse(table, b)]];
            sub.insert(c);
        }
    }
    loop {
        let items: Vec<usize> = sub.iter().copied().collect();
        let before = sub.len();
        for &a in &items {
            for &b in &items {
                sub.insert(table[a][b]);
            }
        }
        if sub.len() == before {
            return sub.len();
        }
    }
}

/// Irreducible degrees from `|G|`, the class count and `|G/G'|`, by
/// enumerating divisor multisets. Panics if the answer is not unique.
pub fn group_degree_oracle(table: &[Vec<usize>]) -> Vec<usize> {
    let order = table.len();
    let classes = class_count(table);
    let linear = order / derived_order(table);
    let divisors: Vec<usize> = (2..=order).filter(|d| order.is_multiple_of(*d)).collect();
    let mut solutions = Vec::new();
    let mut current = Vec::new();
    let rest = classes - linear;
    let target = order - linear;
    fn go(
        divisors: &[usize],
        start: usize,
        left: usize,
        target: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            if target == 0 {
                out.push(current.clone());
            }
            return;
        }
        for i in start..divisors.len() {
            let sq = divisors[i] * divisors[i];
            if sq > target {
                break;
            }
            current.push(divisors[i]);
            go(divisors, i, left - 1, target - sq, current, out);
            current.pop();
        }
    }
    go(&divisors, 0, rest, target, &mut current, &mut solutions);
    assert_eq!(
        solutions.len(),
        1,
        "degrees not determined for order {order}"
    );
    let mut degrees = solutions.pop().unwrap();
    degrees.extend(std::iter::repeat_n(1, linear));
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees
}

// ------------------------------------------------- random algebra fixtures

pub struct AlgebraFixture {
    pub algebra: BasedAlgebra,
    /// Block sizes when known independently.
    pub expected: Option<Vec<usize>>,
    pub description: String,
}

fn random_perm<R: Rng>(rng: &mut R, m: usize) -> Perm {
    let mut p: Perm = (0..m).collect();
    p.shuffle(rng);
    p
}

/// A random valid based algebra with its basis shuffled.
pub fn random_algebra<R: Rng>(rng: &mut R) -> AlgebraFixture {
    let (algebra, expected, description) = match rng.gen_range(0..5) {
        0 => {
            let ngens = rng.gen_range(1..=2);
            let gens: Vec<Perm> = (0..ngens).map(|_| random_perm(rng, 4)).collect();
            let table = group_table(&gens, 4);
            let expected = group_degree_oracle(&table);
            let desc = format!("subgroup of S4 of order {}", table.len());
            (BasedAlgebra::group_algebra(&table), Some(expected), desc)
        }
        1 => {
            let n = rng.gen_range(1..=9);
            (
                BasedAlgebra::group_algebra(&cyclic_table(n)),
                Some(vec![1; n]),
                format!("Z_{n}"),
            )
        }
        2 => {
            let gens: Vec<Perm> = vec![random_perm(rng, 3), random_perm(rng, 3)];
            let g = group_table(&gens, 3);
            let h = cyclic_table(rng.gen_range(2..=3));
            let table = product_table(&g, &h);
            let expected = group_degree_oracle(&table);
            let desc = format!("product of order {}", table.len());
            (BasedAlgebra::group_algebra(&table), Some(expected), desc)
        }
        3 => {
            let n = rng.gen_range(1..=3);
            (
                BasedAlgebra::matrix_units(n),
                Some(vec![n]),
                format!("M_{n}"),
            )
        }
        _ => {
            let k = rng.gen_range(1..=8);
            let (ring, _) = fusionkit::su2_level(k);
            let dims = ring.quantum_dimensions().unwrap().d;
            let r = ring.rank();
            (
                BasedAlgebra::from_ring(&ring, Some(dims)),
                Some(vec![1; r]),
                format!("SU(2)_{k} fusion algebra"),
            )
        }
    };
    let perm = random_perm(rng, algebra.dim());
    AlgebraFixture {
        algebra: algebra.permuted(&perm),
        expected,
        description,
    }
}

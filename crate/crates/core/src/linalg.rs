//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
#[error(
    "numerical rank is ambiguous: singular value {sigma:e} lies within a factor 10 of the cutoff {cutoff:e}; raise precision"
)]
pub struct RankAmbiguity {
    pub sigma: f64,
    pub cutoff: f64,
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<i64>) -> CMatrix {
    m.map(|x| Complex64::new(x as f64, 0.0))
}

/// Orthonormal basis (as columns) of the right nullspace of `a`, together
/// with the singular values. A singular value counts as zero when it is
/// below `rel_cutoff · max(σ_max, 1)`; values within a factor 10 of that
/// cutoff make the rank ambiguous.
pub fn nullspace(a: &DMatrix<f64>, rel_cutoff: f64) -> Result<DMatrix<f64>, RankAmbiguity> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    // Pad with zero rows so that the SVD returns a full V.
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::<f64>::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_cutoff * sigma_max.max(1.0);
    let mut null_rows = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff / 10.0 && s < cutoff * 10.0 {
            return Err(RankAmbiguity { sigma: s, cutoff });
        }
        if s <= cutoff / 10.0 {
            null_rows.push(i);
        }
    }
    let mut basis = DMatrix::<f64>::zeros(cols, null_rows.len());
    for (j, &i) in null_rows.iter().enumerate() {
        basis.set_column(j, &v_t.row(i).transpose());
    }
    Ok(basis)
}

/// Best rational approximation `p/q` with `q ≤ max_den` via continued
/// fractions, returned only if within `tol` of `x`.
pub fn recognize_rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = rem - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        rem = 1.0 / frac;
    }
    if k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
        Some((h1, k1))
    } else {
        None
    }
}

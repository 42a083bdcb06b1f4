//! Dense linear-algebra helpers shared across the geometry pipeline.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};

/// Cholesky-backed inverse; fails if the matrix is not positive definite.
pub fn pd_inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    Cholesky::new(m.clone())
        .map(|c| c.inverse())
        .ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))
}

pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    Cholesky::new(m.clone()).is_some()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Row-space rank via singular values: σ > rel_tol · σ_max.
///
/// Also reports whether any singular value sits suspiciously close to the
/// cut (within a factor of 4 either side), which makes the rank unreliable.
pub fn rank_with_gap(rows: &DMatrix<f64>, rel_tol: f64) -> (usize, bool) {
    let svd = rows.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return (0, false);
    }
    let cut = rel_tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let near_cut = svd
        .singular_values
        .iter()
        .any(|&s| s > cut / 4.0 && s < cut * 4.0);
    (rank, near_cut)
}

/// Orthonormal basis of the row space (rows of the result), via SVD.
pub fn row_space_basis(rows: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let svd = rows.clone().svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let v_t = svd.v_t.expect("svd requested v_t");
    if smax == 0.0 {
        return DMatrix::zeros(0, rows.ncols());
    }
    let cut = rel_tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    v_t.rows(0, rank).into_owned()
}

/// Principal matrix logarithm via inverse scaling-and-squaring.
///
/// Repeated Denman–Beavers square roots bring the matrix near the
/// identity, then the Mercator series finishes. Returns `None` when the
/// square-root iteration fails to converge (e.g. eigenvalues on the
/// negative real axis).
pub fn matrix_log(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return None;
    }
    let id = DMatrix::identity(n, n);
    let mut a = m.clone();
    let mut scalings = 0u32;
    while frobenius(&(&a - &id)) > 0.3 {
        if scalings >= 40 {
            return None;
        }
        a = denman_beavers_sqrt(&a)?;
        scalings += 1;
    }
    // log(I + X) = Σ (-1)^(k+1) X^k / k
    let x = &a - &id;
    let mut term = x.clone();
    let mut acc = DMatrix::zeros(n, n);
    for k in 1..=64 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += &term * (sign / k as f64);
        let next = &term * &x;
        if frobenius(&next) < 1e-18 * (1.0 + frobenius(&acc)) {
            break;
        }
        term = next;
    }
    Some(acc * 2f64.powi(scalings as i32))
}

fn denman_beavers_sqrt(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..60 {
        let y_inv = y.clone().try_inverse()?;
        let z_inv = z.clone().try_inverse()?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = frobenius(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta < 1e-15 * (1.0 + frobenius(&y)) {
            let check = &y * &y - m;
            if frobenius(&check) < 1e-10 * (1.0 + frobenius(m)) {
                return Some(y);
            }
            return None;
        }
    }
    None
}

//! Curvature operators and the bracket-closure bound for the holonomy
//! algebra.
//!
//! At a point, each coordinate 2-plane (i,j) yields the operator
//! (A_(ij))^k_l = g^{km} R_ijml on the tangent space. All of them lie in
//! the holonomy algebra, which is closed under commutators — so the
//! dimension of the smallest commutator-closed subspace containing the
//! curvature operators is a lower bound for dim 𝔥. Since 𝔥 ⊆ so(n)
//! (dimension n(n−1)/2), a saturated bound settles the group.

use nalgebra::DMatrix;

use crate::curvature::CurvatureBundle;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, rank_with_gap, row_space_basis};
use crate::models::ExponentialFamilyModel;

/// A singular value counts toward the rank when above this multiple of
/// the largest one.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Bracket-closure rounds before giving up (closure stabilizes in ≤ 3
/// rounds for everything shipped).
const MAX_CLOSURE_ROUNDS: usize = 10;

/// The n(n−1)/2 curvature operators A_(ij), i < j, at the bundle's point.
///
/// Each is verified antisymmetric with respect to g: gA + Aᵀg = 0.
pub fn curvature_operators(bundle: &CurvatureBundle, tol: f64) -> Result<Vec<DMatrix<f64>>> {
    let n = bundle.metric.nrows();
    let scale = bundle.riemann.max_abs().max(1.0);
    let mut ops = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let a = DMatrix::from_fn(n, n, |k, l| {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += bundle.metric_inv[(k, m)] * bundle.riemann[(i, j, m, l)];
                }
                acc
            });
            let skew = &bundle.metric * &a + a.transpose() * &bundle.metric;
            let resid = frobenius(&skew);
            if resid > tol * scale {
                return Err(Error::NotAntisymmetric(resid));
            }
            ops.push(a);
        }
    }
    Ok(ops)
}

/// Dimension of the smallest linear subspace containing `generators` and
/// closed under the matrix commutator.
pub fn algebra_dimension_from_generators(
    generators: &[DMatrix<f64>],
    rank_tol: f64,
) -> Result<usize> {
    if generators.is_empty() {
        return Ok(0);
    }
    let n = generators[0].nrows();
    let dim = n * n;

    // normalize and drop numerically-zero generators
    let max_norm = generators.iter().map(frobenius).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Ok(0);
    }
    let mut live: Vec<DMatrix<f64>> = generators
        .iter()
        .filter(|g| frobenius(g) > 1e-14 * max_norm)
        .map(|g| g / frobenius(g))
        .collect();
    if live.is_empty() {
        return Ok(0);
    }

    let stack = |mats: &[DMatrix<f64>]| -> DMatrix<f64> {
        let mut rows = DMatrix::zeros(mats.len(), dim);
        for (r, m) in mats.iter().enumerate() {
            for (c, v) in m.iter().enumerate() {
                rows[(r, c)] = *v;
            }
        }
        rows
    };

    let mut rank;
    {
        let rows = stack(&live);
        let (r, unstable) = rank_with_gap(&rows, rank_tol);
        if unstable {
            return Err(Error::RankUnstable(
                "singular values cluster at the rank threshold; widen the tolerance".into(),
            ));
        }
        rank = r;
        live = unstack(&row_space_basis(&rows, rank_tol), n);
    }

    for _ in 0..MAX_CLOSURE_ROUNDS {
        let mut candidates = live.clone();
        for a in 0..live.len() {
            for b in (a + 1)..live.len() {
                let comm = &live[a] * &live[b] - &live[b] * &live[a];
                let norm = frobenius(&comm);
                if norm > 1e-14 {
                    candidates.push(comm / norm);
                }
            }
        }
        let rows = stack(&candidates);
        let (r, unstable) = rank_with_gap(&rows, rank_tol);
        if unstable {
            return Err(Error::RankUnstable(
                "singular values cluster at the rank threshold during closure".into(),
            ));
        }
        if r == rank {
            return Ok(rank);
        }
        rank = r;
        live = unstack(&row_space_basis(&rows, rank_tol), n);
    }
    Err(Error::RankUnstable(format!(
        "bracket closure did not stabilize in {MAX_CLOSURE_ROUNDS} rounds"
    )))
}

fn unstack(rows: &DMatrix<f64>, n: usize) -> Vec<DMatrix<f64>> {
    (0..rows.nrows())
        .map(|r| {
            let row = rows.row(r);
            DMatrix::from_fn(n, n, |i, j| row[i * n + j])
        })
        .collect()
}

/// Curvature-span holonomy-algebra dimension at a single point.
pub fn curvature_algebra_dimension(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    rank_tol: f64,
) -> Result<usize> {
    curvature_algebra_dimension_multi(model, std::slice::from_ref(&theta.to_vec()), rank_tol)
}

/// Same bound with curvature operators pooled across several points;
/// monotone in the point set.
pub fn curvature_algebra_dimension_multi(
    model: &ExponentialFamilyModel,
    thetas: &[Vec<f64>],
    rank_tol: f64,
) -> Result<usize> {
    let mut gens = Vec::new();
    for theta in thetas {
        let bundle = CurvatureBundle::compute(model, theta, 0.0)?;
        gens.extend(curvature_operators(&bundle, 1e-8)?);
    }
    algebra_dimension_from_generators(&gens, rank_tol)
}

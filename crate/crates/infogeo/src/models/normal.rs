//! The d-dimensional normal distribution manifolds N^d, d = 1, 2, 3.
//!
//! Natural coordinates are θ = (η, q) with η = Σ⁻¹μ pairing with the
//! linear statistics x₁..x_d, and q the coefficients of the quadratic
//! statistics xᵢxⱼ (i ≤ j, lexicographic): for Λ = Σ⁻¹,
//!
//!   q_ii = −Λ_ii/2,   q_ij = −Λ_ij (i < j).
//!
//! The off-diagonal statistic is the plain product xᵢxⱼ, so its natural
//! parameter absorbs the symmetry factor 2 — this is exactly the chart in
//! which, for d = 2, θ = (θ₁..θ₅) with θ₃ = −σ₂₂/(2Δ), θ₄ = σ₁₂/Δ,
//! θ₅ = −σ₁₁/(2Δ), Δ = det Σ, and the potential takes the closed form
//!
//!   φ(θ) = log(2π√Δ) − Δ(θ₂²θ₃ − θ₁θ₂θ₄ + θ₁²θ₅),  Δ = 1/(4θ₃θ₅ − θ₄²).
//!
//! Generically φ(θ) = (d/2)·log 2π − ½ log det Λ + ½ ηᵀΛ⁻¹η with the
//! carrier C ≡ 0; the manifold dimension is n = d(d+3)/2.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expr::{Constraint, Domain, Expr, ScalarField};
use crate::models::{ExponentialFamilyModel, FamilyOps, ModelMetadata, PointSampler};

/// A chart point given by mean vector and covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCovariancePoint {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

/// Position of the quadratic coordinate for the (i, j) statistic, i ≤ j.
fn quad_pos(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < d);
    // pairs (0,0)..(0,d-1),(1,1)..: row i starts after i(2d - i + 1)/2 entries
    i * (2 * d - i + 1) / 2 + (j - i)
}

fn manifold_dim(d: usize) -> usize {
    d * (d + 3) / 2
}

/// Λ(θ) as an expression matrix: Λ_ii = −2 q_ii, Λ_ij = −q_ij.
fn precision_exprs(d: usize) -> Vec<Vec<Expr>> {
    let mut lambda = vec![vec![Expr::constant(0.0); d]; d];
    for i in 0..d {
        for j in i..d {
            let q = Expr::var(d + quad_pos(d, i, j));
            let entry = if i == j { -2.0 * q } else { -q };
            lambda[i][j] = entry.clone();
            lambda[j][i] = entry;
        }
    }
    lambda
}

fn det_expr(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => {
            let a = &m[0][0] * &(&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
            let b = &m[0][1] * &(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
            let c = &m[0][2] * &(&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
            a - b + c
        }
        _ => unreachable!("only d ≤ 3 shipped"),
    }
}

fn adjugate_expr(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    match m.len() {
        1 => vec![vec![Expr::constant(1.0)]],
        2 => vec![
            vec![m[1][1].clone(), -&m[0][1]],
            vec![-&m[1][0], m[0][0].clone()],
        ],
        3 => {
            let cof = |r: usize, c: usize| {
                let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
                let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
                let minor = &m[rows[0]][cols[0]] * &m[rows[1]][cols[1]]
                    - &m[rows[0]][cols[1]] * &m[rows[1]][cols[0]];
                if (r + c) % 2 == 0 {
                    minor
                } else {
                    -minor
                }
            };
            // adj = cofactor transpose
            (0..3)
                .map(|i| (0..3).map(|j| cof(j, i)).collect())
                .collect()
        }
        _ => unreachable!("only d ≤ 3 shipped"),
    }
}

fn normal_potential(d: usize) -> ScalarField {
    let n = manifold_dim(d);
    let lambda = precision_exprs(d);
    let det = det_expr(&lambda);
    let adj = adjugate_expr(&lambda);

    // ηᵀ adj(Λ) η
    let mut quad = Expr::constant(0.0);
    for i in 0..d {
        for j in 0..d {
            quad = quad + &(&Expr::var(i) * &Expr::var(j)) * &adj[i][j];
        }
    }
    let phi =
        Expr::constant(0.5 * d as f64 * TAU.ln()) - 0.5 * det.ln() + 0.5 * (quad / det.clone());

    let mut domain = Domain::unrestricted(n);
    for i in 0..d {
        domain = domain.with_bound(d + quad_pos(d, i, i), f64::NEG_INFINITY, 0.0);
    }
    // positive definiteness of Λ via leading principal minors
    for k in 2..=d {
        let sub: Vec<Vec<Expr>> = (0..k).map(|i| lambda[i][..k].to_vec()).collect();
        let c = Constraint::new(format!("precision_minor_{k}"), n, &det_expr(&sub))
            .expect("constraint compiles");
        domain = domain.with_constraint(c);
    }

    ScalarField::new(n, &phi, domain).expect("normal potential compiles")
}

/// θ(μ, Σ): natural coordinates of a mean/covariance point.
pub fn natural_from_meancov(d: usize, point: &MeanCovariancePoint) -> Result<Vec<f64>> {
    check_dimension(d)?;
    if point.mu.len() != d || point.sigma.nrows() != d || point.sigma.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "mean/covariance shapes do not match d = {d}"
        )));
    }
    let chol = Cholesky::new(point.sigma.clone())
        .ok_or_else(|| Error::NotPositiveDefinite("covariance matrix".into()))?;
    let lambda = chol.inverse();
    let eta = &lambda * &point.mu;

    let mut theta = vec![0.0; manifold_dim(d)];
    theta[..d].copy_from_slice(eta.as_slice());
    for i in 0..d {
        for j in i..d {
            theta[d + quad_pos(d, i, j)] = if i == j {
                -0.5 * lambda[(i, i)]
            } else {
                -lambda[(i, j)]
            };
        }
    }
    Ok(theta)
}

/// (μ, Σ) from natural coordinates; inverse of [`natural_from_meancov`].
pub fn meancov_from_natural(d: usize, theta: &[f64]) -> Result<MeanCovariancePoint> {
    check_dimension(d)?;
    let n = manifold_dim(d);
    if theta.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} coordinates, got {}",
            theta.len()
        )));
    }
    let mut lambda = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let q = theta[d + quad_pos(d, i, j)];
            let v = if i == j { -2.0 * q } else { -q };
            lambda[(i, j)] = v;
            lambda[(j, i)] = v;
        }
    }
    let chol = Cholesky::new(lambda.clone())
        .ok_or_else(|| Error::Domain("precision part is not negative definite".into()))?;
    let sigma = chol.inverse();
    let eta = DVector::from_column_slice(&theta[..d]);
    let mu = &sigma * eta;
    Ok(MeanCovariancePoint { mu, sigma })
}

fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Statistics (x₁.., xᵢxⱼ for i ≤ j) in the coordinate order of the chart.
fn normal_statistics(d: usize, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(manifold_dim(d));
    out.extend_from_slice(x);
    for i in 0..d {
        for j in i..d {
            out.push(x[i] * x[j]);
        }
    }
    out
}

/// The d-dimensional normal distribution manifold, n = d(d+3)/2.
pub fn normal_model(d: usize) -> Result<ExponentialFamilyModel> {
    check_dimension(d)?;
    let n = manifold_dim(d);
    let potential = normal_potential(d);

    let stats_d = d;
    let sampler_d = d;
    let family = FamilyOps {
        sample_dim: d,
        carrier: Arc::new(|_x: &[f64]| 0.0),
        statistics: Arc::new(move |x: &[f64]| normal_statistics(stats_d, x)),
        sampler: Arc::new(move |theta: &[f64], count: usize, seed: u64| {
            let point = meancov_from_natural(sampler_d, theta)?;
            let chol = Cholesky::new(point.sigma.clone())
                .ok_or_else(|| Error::NotPositiveDefinite("covariance matrix".into()))?;
            let l = chol.l();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let z = DVector::from_fn(sampler_d, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = &point.mu + &l * z;
                out.push(x.as_slice().to_vec());
            }
            Ok(out)
        }),
    };

    Ok(ExponentialFamilyModel {
        name: format!("normal-{d}"),
        dim: n,
        potential,
        metadata: ModelMetadata {
            simply_connected: true,
            admits_kaehler: false,
            symmetric_space_known: if d == 1 { Some(true) } else { Some(false) },
        },
        family: Some(family),
        point_sampler: PointSampler::NormalMeanCov { d },
    })
}

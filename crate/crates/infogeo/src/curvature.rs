//! Per-point differential geometry of an exponential family.
//!
//! Everything is computed in natural coordinates from derivatives of the
//! potential φ:
//!
//! - Fisher metric          g_ij = ∂_i∂_j φ
//! - skewness tensor        T_ijk = ∂_i∂_j∂_k φ (= E[∂_i l ∂_j l ∂_k l])
//! - Levi-Civita symbols    Γ_ijk = ½ ∂_i∂_j∂_k φ (first kind)
//! - α-family               Γ^(α)_ijk = Γ_ijk − (α/2) T_ijk = ((1−α)/2) T_ijk
//! - curvature              R^(α) of the connection Γ^(α), indices lowered
//!   with g and ordered so that the sectional curvature of the (i,j)
//!   coordinate plane is K_ij = R_ijij / (g_ii g_jj − g_ij²).
//!
//! Note some texts state Γ_ijk = ∂_i∂_j∂_kφ for exponential families; the
//! Christoffel symbols of g = ∂∂φ are half that, and metric compatibility
//! ∂_k g_ij = Γ_ikj + Γ_jki (checked in tests) pins the ½.
//!
//! Sign conventions are anchored numerically: the one-dimensional normal
//! family has constant sectional curvature −½ and, in two dimensions,
//! Ric = κ·g; both are asserted in the test suites.

use nalgebra::{Cholesky, DMatrix};

use crate::deriv::evaluate_stack;
use crate::error::{Error, Result};
use crate::models::ExponentialFamilyModel;
use crate::tensors::{Tensor3, Tensor4};

/// Gram determinants below this are too degenerate for a sectional
/// quotient.
pub const PLANE_DEGENERACY_THRESHOLD: f64 = 1e-12;

/// All per-point geometric state for one (θ, α).
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// Γ^(α) first kind, symmetric in all indices: gamma_first[(i,j,k)] = Γ_ijk.
    pub gamma_first: Tensor3,
    /// Γ^(α) second kind: gamma_second[(i,j,k)] = Γ^k_ij.
    pub gamma_second: Tensor3,
    pub skewness: Tensor3,
    /// riemann[(i,j,k,l)] = R^(α)_ijkl, lowered, K_ij = R_ijij / gram.
    pub riemann: Tensor4,
    /// Sectional curvatures of coordinate planes, zero diagonal.
    pub sectional: DMatrix<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl CurvatureBundle {
    pub fn compute(model: &ExponentialFamilyModel, theta: &[f64], alpha: f64) -> Result<Self> {
        let n = model.dim;
        let stack = evaluate_stack(&model.potential, theta, 4)?;
        let g = stack.hessian.clone();
        let chol = Cholesky::new(g.clone())
            .ok_or_else(|| Error::NotPositiveDefinite(format!("Fisher metric at {theta:?}")))?;
        let g_inv = chol.inverse();

        let t = stack.order3.clone();
        let c = (1.0 - alpha) / 2.0;

        let mut gamma_first = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma_first[(i, j, k)] = c * t[(i, j, k)];
                }
            }
        }
        let mut gamma_second = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += g_inv[(k, m)] * gamma_first[(i, j, m)];
                    }
                    gamma_second[(i, j, k)] = acc;
                }
            }
        }

        // ∂_a g⁻¹ = −g⁻¹ (∂_a g) g⁻¹ with (∂_a g)_pq = ∂³φ_apq
        let mut dginv: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        for a in 0..n {
            let dg = DMatrix::from_fn(n, n, |p, q| t[(a, p, q)]);
            dginv.push(-(&g_inv * dg * &g_inv));
        }

        // ∂_a Γ^(α) m_{bc} = (∂_a g^{mk}) Γ_bck + g^{mk} c ∂⁴φ_abck
        let dgamma2 = |a: usize, b: usize, cc: usize, m: usize| -> f64 {
            let mut acc = 0.0;
            for k in 0..n {
                acc += dginv[a][(m, k)] * gamma_first[(b, cc, k)]
                    + g_inv[(m, k)] * c * stack.order4[(a, b, cc, k)];
            }
            acc
        };

        // R_ijkl = g_lm [ ∂_jΓ^m_ik − ∂_iΓ^m_jk + Γ^m_jp Γ^p_ik − Γ^m_ip Γ^p_jk ]
        let mut riemann = Tensor4::zeros(n);
        let mut up = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for (m, u) in up.iter_mut().enumerate() {
                        let mut quad = 0.0;
                        for p in 0..n {
                            quad += gamma_second[(j, p, m)] * gamma_second[(i, k, p)]
                                - gamma_second[(i, p, m)] * gamma_second[(j, k, p)];
                        }
                        *u = dgamma2(j, i, k, m) - dgamma2(i, j, k, m) + quad;
                    }
                    for l in 0..n {
                        let mut acc = 0.0;
                        for (m, u) in up.iter().enumerate() {
                            acc += g[(l, m)] * u;
                        }
                        riemann[(i, j, k, l)] = acc;
                    }
                }
            }
        }

        let sectional = sectional_from_parts(&g, &riemann)?;
        let ricci = ricci_from_parts(&g_inv, &riemann);
        let scalar = scalar_from_parts(&g_inv, &ricci);

        Ok(Self {
            point: theta.to_vec(),
            alpha,
            metric: g,
            metric_inv: g_inv,
            gamma_first,
            gamma_second,
            skewness: t,
            riemann,
            sectional,
            ricci,
            scalar,
        })
    }

    /// Gram determinant of the (i, j) coordinate plane.
    pub fn plane_gram(&self, i: usize, j: usize) -> f64 {
        self.metric[(i, i)] * self.metric[(j, j)] - self.metric[(i, j)].powi(2)
    }
}

/// Sectional-curvature matrix K_ij = R_ijij / (g_ii g_jj − g_ij²), zero on
/// the diagonal.
pub fn sectional_from_parts(g: &DMatrix<f64>, riemann: &Tensor4) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let gram = g[(i, i)] * g[(j, j)] - g[(i, j)].powi(2);
            if gram <= PLANE_DEGENERACY_THRESHOLD {
                return Err(Error::DegeneratePlane { i, j, denom: gram });
            }
            k[(i, j)] = riemann[(i, j, i, j)] / gram;
        }
    }
    Ok(k)
}

/// Ricci tensor. The contraction slot is fixed so that in two dimensions
/// Ric = κ·g (κ the Gauss curvature); the one-dimensional normal family
/// then has Ric = −½ g and negative scalar curvature.
pub fn ricci_from_parts(g_inv: &DMatrix<f64>, riemann: &Tensor4) -> DMatrix<f64> {
    let n = g_inv.nrows();
    DMatrix::from_fn(n, n, |j, k| {
        let mut acc = 0.0;
        for i in 0..n {
            for l in 0..n {
                acc += g_inv[(i, l)] * riemann[(j, i, k, l)];
            }
        }
        acc
    })
}

pub fn scalar_from_parts(g_inv: &DMatrix<f64>, ricci: &DMatrix<f64>) -> f64 {
    let n = g_inv.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            acc += g_inv[(j, k)] * ricci[(j, k)];
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Free-standing operations (thin wrappers over the jet engine / bundle).
// ---------------------------------------------------------------------------

/// Fisher metric g = Hess φ; errors if the Hessian is not positive
/// definite (θ outside the statistical domain or a broken potential).
///
/// ```
/// use infogeo::curvature::fisher_metric;
/// use infogeo::models::model_by_name;
///
/// // the univariate normal family at (μ = 0, σ = 1), i.e. θ = (0, −1/2)
/// let m = model_by_name("normal-1").unwrap();
/// let g = fisher_metric(&m, &[0.0, -0.5]).unwrap();
/// assert!((g[(0, 0)] - 1.0).abs() < 1e-12);
/// assert!((g[(1, 1)] - 2.0).abs() < 1e-12);
/// ```
pub fn fisher_metric(model: &ExponentialFamilyModel, theta: &[f64]) -> Result<DMatrix<f64>> {
    let stack = evaluate_stack(&model.potential, theta, 2)?;
    if Cholesky::new(stack.hessian.clone()).is_none() {
        return Err(Error::NotPositiveDefinite(format!(
            "Fisher metric at {theta:?}"
        )));
    }
    Ok(stack.hessian)
}

/// Skewness tensor T_ijk = ∂_i∂_j∂_k φ (third cumulant of the statistics).
pub fn skewness_tensor(model: &ExponentialFamilyModel, theta: &[f64]) -> Result<Tensor3> {
    Ok(evaluate_stack(&model.potential, theta, 3)?.order3)
}

/// Levi-Civita connection of the Fisher metric: (first kind, second kind).
///
/// Metric compatibility ∂_k g_ij = Γ_ikj + Γ_jki and torsion-freeness hold
/// by construction; both are verified against finite differences in tests.
pub fn levi_civita(model: &ExponentialFamilyModel, theta: &[f64]) -> Result<(Tensor3, Tensor3)> {
    let b = CurvatureBundle::compute(model, theta, 0.0)?;
    Ok((b.gamma_first, b.gamma_second))
}

/// Γ^(α)_ijk = Γ_ijk − (α/2) T_ijk, first kind.
pub fn alpha_connection(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    alpha: f64,
) -> Result<Tensor3> {
    let t = skewness_tensor(model, theta)?;
    Ok(t.scale((1.0 - alpha) / 2.0))
}

/// Lowered curvature tensor of Γ^(α).
pub fn riemann_tensor(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    alpha: f64,
) -> Result<Tensor4> {
    Ok(CurvatureBundle::compute(model, theta, alpha)?.riemann)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{model_by_name, normal_model};
    use approx::assert_relative_eq;

    #[test]
    fn normal1_metric_at_standard_point() {
        let m = normal_model(1).unwrap();
        let g = fisher_metric(&m, &[0.0, -0.5]).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(g[(0, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(g[(1, 1)], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn normal1_sectional_is_minus_half() {
        let m = normal_model(1).unwrap();
        for theta in [[0.0, -0.5], [0.4, -0.2], [-1.0, -0.9]] {
            let b = CurvatureBundle::compute(&m, &theta, 0.0).unwrap();
            assert_relative_eq!(b.sectional[(0, 1)], -0.5, epsilon = 1e-10);
            // Ric = κ·g in two dimensions
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(
                        b.ricci[(i, j)],
                        -0.5 * b.metric[(i, j)],
                        epsilon = 1e-9,
                        max_relative = 1e-9
                    );
                }
            }
            assert!(b.scalar < 0.0);
            assert_relative_eq!(b.scalar, -1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn normal2_constant_sectional_entries() {
        let m = normal_model(2).unwrap();
        for theta in [
            vec![0.0, 0.0, -0.5, 0.0, -0.5],
            vec![0.3, -0.2, -0.7, 0.25, -0.5],
        ] {
            let b = CurvatureBundle::compute(&m, &theta, 0.0).unwrap();
            assert_relative_eq!(b.sectional[(0, 1)], 0.25, epsilon = 1e-9);
            assert_relative_eq!(b.sectional[(0, 2)], -0.5, epsilon = 1e-9);
            assert_relative_eq!(b.sectional[(1, 4)], -0.5, epsilon = 1e-9);
            for i in 0..5 {
                assert_eq!(b.sectional[(i, i)], 0.0);
            }
        }
    }

    #[test]
    fn flat_toy_is_flat() {
        let m = model_by_name("flat-toy").unwrap();
        let b = CurvatureBundle::compute(&m, &[0.7, -0.3], 0.0).unwrap();
        assert_eq!(b.riemann.max_abs(), 0.0);
        assert_eq!(b.sectional.max(), 0.0);
        assert_eq!(b.scalar, 0.0);
        let b1 = CurvatureBundle::compute(&m, &[0.7, -0.3], 1.0).unwrap();
        assert_eq!(b1.riemann.max_abs(), 0.0);
    }

    #[test]
    fn alpha_zero_matches_levi_civita() {
        let m = normal_model(1).unwrap();
        let theta = [0.2, -0.4];
        let (gamma1, _) = levi_civita(&m, &theta).unwrap();
        let a0 = alpha_connection(&m, &theta, 0.0).unwrap();
        assert_eq!(gamma1.max_abs_diff(&a0), 0.0);
        // α = 1 gives Γ − ½T = 0 for exponential families
        let a1 = alpha_connection(&m, &theta, 1.0).unwrap();
        assert_eq!(a1.max_abs(), 0.0);
    }
}

//! Parallel transport along piecewise-linear loops in natural coordinates.
//!
//! Transport of a frame P along γ solves the linear matrix ODE
//! dP/dt = −M(t)·P with M^k_j = Γ^k_{ij} γ̇^i, integrated with fixed-step
//! RK4. Fixed steps (rather than adaptive control) keep results bit-stable
//! across runs; a step-halving check guards against an unnoticed coarse
//! grid. For a metric connection the result is g-orthogonal up to
//! integration error, which is reported, never assumed.

use nalgebra::{Cholesky, DMatrix};

use crate::curvature::CurvatureBundle;
use crate::deriv::evaluate_stack;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, matrix_log};
use crate::models::ExponentialFamilyModel;
use crate::tensors::Tensor3;

use super::algebra::curvature_operators;

/// Step-halving discrepancies above 10× this tolerance raise
/// [`Error::StepTooCoarse`].
pub const DEFAULT_TRANSPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
}

/// A piecewise-smooth closed path given by ordered waypoints. The loop is
/// closed automatically when the last waypoint differs from the first.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    pub waypoints: Vec<Vec<f64>>,
    pub interpolation: Interpolation,
}

impl LoopSpec {
    pub fn new(waypoints: Vec<Vec<f64>>) -> Self {
        Self {
            waypoints,
            interpolation: Interpolation::Linear,
        }
    }

    fn closed_waypoints(&self) -> Vec<Vec<f64>> {
        let mut w = self.waypoints.clone();
        if let (Some(first), Some(last)) = (w.first(), w.last()) {
            if first != last {
                let f = first.clone();
                w.push(f);
            }
        }
        w
    }
}

/// The ε-rectangle loop in coordinates (i, j) based at θ, traversed
/// i-side first. This orientation makes the first-order holonomy
/// generator equal −ε²·A_(ij) (checked by the consistency tests).
pub fn rectangle_loop(theta: &[f64], i: usize, j: usize, eps: f64) -> LoopSpec {
    let base = theta.to_vec();
    let mut p1 = base.clone();
    p1[i] += eps;
    let mut p2 = p1.clone();
    p2[j] += eps;
    let mut p3 = base.clone();
    p3[j] += eps;
    LoopSpec::new(vec![base.clone(), p1, p2, p3, base])
}

/// Result of transporting the identity frame around a loop.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// Accumulated linear map on the tangent space at the base point.
    pub matrix: DMatrix<f64>,
    /// ‖PᵀgP − g‖_F with g the metric at the base point.
    pub orthogonality_residual: f64,
    /// Principal logarithm, when defined.
    pub log_map: Option<DMatrix<f64>>,
    pub determinant: f64,
    /// ‖P(steps) − P(steps/2)‖_F, the step-halving diagnostic.
    pub step_halving_residual: f64,
}

fn christoffel_second(model: &ExponentialFamilyModel, theta: &[f64]) -> Result<Tensor3> {
    let n = model.dim;
    let stack = evaluate_stack(&model.potential, theta, 3)?;
    let chol = Cholesky::new(stack.hessian.clone())
        .ok_or_else(|| Error::NotPositiveDefinite(format!("Fisher metric at {theta:?}")))?;
    let g_inv = chol.inverse();
    let mut gamma2 = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    // Levi-Civita first kind = ½ ∂³φ
                    acc += g_inv[(k, m)] * 0.5 * stack.order3[(i, j, m)];
                }
                gamma2[(i, j, k)] = acc;
            }
        }
    }
    Ok(gamma2)
}

/// −M(θ; v) with M^k_j = Γ^k_{ij} v^i.
fn minus_velocity_matrix(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    v: &[f64],
) -> Result<DMatrix<f64>> {
    let n = model.dim;
    let gamma2 = christoffel_second(model, theta)?;
    Ok(DMatrix::from_fn(n, n, |k, j| {
        let mut acc = 0.0;
        for i in 0..n {
            acc -= gamma2[(i, j, k)] * v[i];
        }
        acc
    }))
}

/// Transport the identity frame along the open polyline `waypoints` with
/// `steps` RK4 steps in total (split evenly across segments).
pub fn parallel_transport_path(
    model: &ExponentialFamilyModel,
    waypoints: &[Vec<f64>],
    steps: usize,
) -> Result<DMatrix<f64>> {
    let n = model.dim;
    if waypoints.len() < 2 {
        return Err(Error::InvalidInput(
            "a path needs at least two waypoints".into(),
        ));
    }
    for w in waypoints {
        model.potential.check_in_domain(w)?;
    }
    let segments = waypoints.len() - 1;
    let per_segment = steps.div_ceil(segments).max(1);

    let mut p = DMatrix::identity(n, n);
    for seg in 0..segments {
        let a = &waypoints[seg];
        let b = &waypoints[seg + 1];
        let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        if v.iter().all(|c| *c == 0.0) {
            continue;
        }
        let h = 1.0 / per_segment as f64;
        let at = |s: f64| -> Vec<f64> { a.iter().zip(&v).map(|(x, dv)| x + s * dv).collect() };
        // k1 reuses the previous step's endpoint matrix
        let mut m_start = minus_velocity_matrix(model, &at(0.0), &v)?;
        for step in 0..per_segment {
            let s = step as f64 * h;
            let m_mid = minus_velocity_matrix(model, &at(s + 0.5 * h), &v)?;
            let m_end = minus_velocity_matrix(model, &at(s + h), &v)?;
            let k1 = &m_start * &p;
            let k2 = &m_mid * (&p + &k1 * (0.5 * h));
            let k3 = &m_mid * (&p + &k2 * (0.5 * h));
            let k4 = &m_end * (&p + &k3 * h);
            p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            m_start = m_end;
        }
    }
    Ok(p)
}

/// Transport around a closed loop with orthogonality and step-halving
/// diagnostics. `steps` must be ≥ 100; the halved-step comparison raises
/// [`Error::StepTooCoarse`] past 10× the transport tolerance.
pub fn parallel_transport_loop(
    model: &ExponentialFamilyModel,
    spec: &LoopSpec,
    steps: usize,
) -> Result<TransportResult> {
    if steps < 100 {
        return Err(Error::InvalidInput(format!(
            "steps must be ≥ 100, got {steps}"
        )));
    }
    let waypoints = spec.closed_waypoints();
    let p = parallel_transport_path(model, &waypoints, steps)?;
    let p_half = parallel_transport_path(model, &waypoints, steps.div_ceil(2))?;
    let step_halving_residual = frobenius(&(&p - &p_half));
    if step_halving_residual > 10.0 * DEFAULT_TRANSPORT_TOL {
        return Err(Error::StepTooCoarse(step_halving_residual));
    }

    let base = &waypoints[0];
    let g = evaluate_stack(&model.potential, base, 2)?.hessian;
    let orth = frobenius(&(p.transpose() * &g * &p - &g));
    let det = p.clone().lu().determinant();
    let log_map = matrix_log(&p);

    Ok(TransportResult {
        matrix: p,
        orthogonality_residual: orth,
        log_map,
        determinant: det,
        step_halving_residual,
    })
}

/// ‖log P_loop + ε²·A_(ij)‖_F for the ε-rectangle in coordinates (i, j):
/// the first-order consistency between loop holonomy and the curvature
/// operator. Expected O(ε³).
pub fn loop_curvature_consistency(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    i: usize,
    j: usize,
    eps: f64,
    steps: usize,
) -> Result<f64> {
    let spec = rectangle_loop(theta, i, j, eps);
    let transported = parallel_transport_loop(model, &spec, steps)?;
    let log = transported
        .log_map
        .ok_or_else(|| Error::LogUndefined("transport too far from identity; shrink ε".into()))?;
    let bundle = CurvatureBundle::compute(model, theta, 0.0)?;
    let ops = curvature_operators(&bundle, 1e-8)?;
    let n = model.dim;
    let idx = pair_index(n, i, j)?;
    let a = &ops[idx];
    Ok(frobenius(&(log + a * (eps * eps))))
}

fn pair_index(n: usize, i: usize, j: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(Error::InvalidInput(format!(
            "need i < j < n, got ({i},{j}) with n={n}"
        )));
    }
    // (0,1),(0,2),..,(0,n-1),(1,2),..
    Ok(i * n - i * (i + 1) / 2 + (j - i - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::model_by_name;

    #[test]
    fn flat_model_transport_is_identity() {
        let m = model_by_name("flat-toy").unwrap();
        let spec = LoopSpec::new(vec![
            vec![0.0, 0.0],
            vec![0.8, 0.1],
            vec![0.5, 0.9],
            vec![-0.3, 0.4],
        ]);
        let t = parallel_transport_loop(&m, &spec, 400).unwrap();
        let id = DMatrix::identity(2, 2);
        assert!(frobenius(&(&t.matrix - &id)) < 1e-12);
        assert!(t.orthogonality_residual < 1e-12);
        assert!((t.determinant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_backward_cancels() {
        let m = model_by_name("normal-1").unwrap();
        let a = vec![0.0, -0.5];
        let b = vec![0.3, -0.4];
        let c = vec![0.1, -0.8];
        let spec = LoopSpec::new(vec![a.clone(), b.clone(), c.clone(), b.clone(), a.clone()]);
        let t = parallel_transport_loop(&m, &spec, 2000).unwrap();
        let id = DMatrix::identity(2, 2);
        assert!(
            frobenius(&(&t.matrix - &id)) < 1e-9,
            "{}",
            frobenius(&(&t.matrix - &id))
        );
    }

    #[test]
    fn too_few_steps_is_rejected() {
        let m = model_by_name("flat-toy").unwrap();
        let spec = LoopSpec::new(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, 0.1]]);
        assert!(matches!(
            parallel_transport_loop(&m, &spec, 50),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn pair_index_enumerates_upper_triangle() {
        assert_eq!(pair_index(5, 0, 1).unwrap(), 0);
        assert_eq!(pair_index(5, 0, 4).unwrap(), 3);
        assert_eq!(pair_index(5, 1, 2).unwrap(), 4);
        assert_eq!(pair_index(5, 3, 4).unwrap(), 9);
        assert!(pair_index(5, 2, 2).is_err());
    }
}

//! Monte-Carlo estimation of the expectation-form geometry.
//!
//! For an exponential family, ∂_i log p(x;θ) = F_i(x) − ∂_iφ(θ), so the
//! Fisher metric E[(∂_i l)(∂_j l)] and the skewness tensor
//! E[(∂_i l)(∂_j l)(∂_k l)] are plain sample averages of products of
//! centred statistics. These estimators cross-validate the
//! potential-derivative path (Hessian and third derivative of φ) without
//! sharing any code with it.

use nalgebra::DMatrix;

use crate::deriv::evaluate_stack;
use crate::error::Result;
use crate::models::ExponentialFamilyModel;
use crate::tensors::Tensor3;

/// Sample estimate with a per-entry standard error.
#[derive(Debug, Clone)]
pub struct McMatrix {
    pub estimate: DMatrix<f64>,
    pub std_error: DMatrix<f64>,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct McTensor3 {
    pub estimate: Tensor3,
    pub std_error: Tensor3,
    pub count: usize,
}

fn centred_statistics(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mean = evaluate_stack(&model.potential, theta, 1)?.gradient;
    let fam = model.family()?;
    let samples = model.sample(theta, count, seed)?;
    Ok(samples
        .iter()
        .map(|x| {
            let f = (fam.statistics)(x);
            f.iter().zip(mean.iter()).map(|(v, m)| v - m).collect()
        })
        .collect())
}

/// Monte-Carlo Fisher metric: mean of uᵢuⱼ with u = F(x) − ∇φ(θ).
pub fn fisher_metric_mc(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    count: usize,
    seed: u64,
) -> Result<McMatrix> {
    let n = model.dim;
    let us = centred_statistics(model, theta, count, seed)?;
    let mut sum: DMatrix<f64> = DMatrix::zeros(n, n);
    let mut sum_sq: DMatrix<f64> = DMatrix::zeros(n, n);
    for u in &us {
        for i in 0..n {
            for j in i..n {
                let p = u[i] * u[j];
                sum[(i, j)] += p;
                sum_sq[(i, j)] += p * p;
            }
        }
    }
    let m = count as f64;
    let mut estimate: DMatrix<f64> = DMatrix::zeros(n, n);
    let mut std_error: DMatrix<f64> = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mean = sum[(i, j)] / m;
            let var = (sum_sq[(i, j)] / m - mean * mean).max(0.0);
            let se = (var / m).sqrt();
            estimate[(i, j)] = mean;
            estimate[(j, i)] = mean;
            std_error[(i, j)] = se;
            std_error[(j, i)] = se;
        }
    }
    Ok(McMatrix {
        estimate,
        std_error,
        count,
    })
}

/// Monte-Carlo skewness tensor: mean of uᵢuⱼu_k.
pub fn skewness_tensor_mc(
    model: &ExponentialFamilyModel,
    theta: &[f64],
    count: usize,
    seed: u64,
) -> Result<McTensor3> {
    let n = model.dim;
    let us = centred_statistics(model, theta, count, seed)?;
    let mut sum = Tensor3::zeros(n);
    let mut sum_sq = Tensor3::zeros(n);
    for u in &us {
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let p = u[i] * u[j] * u[k];
                    sum[(i, j, k)] += p;
                    sum_sq[(i, j, k)] += p * p;
                }
            }
        }
    }
    let m = count as f64;
    let mut estimate = Tensor3::zeros(n);
    let mut std_error = Tensor3::zeros(n);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mean = sum[(i, j, k)] / m;
                let var = (sum_sq[(i, j, k)] / m - mean * mean).max(0.0);
                let se = (var / m).sqrt();
                write_sym3(&mut estimate, i, j, k, mean);
                write_sym3(&mut std_error, i, j, k, se);
            }
        }
    }
    Ok(McTensor3 {
        estimate,
        std_error,
        count,
    })
}

fn write_sym3(t: &mut Tensor3, i: usize, j: usize, k: usize, v: f64) {
    let idx = [i, j, k];
    for p in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        t[(idx[p[0]], idx[p[1]], idx[p[2]])] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{fisher_metric, skewness_tensor};
    use crate::models::model_by_name;

    #[test]
    fn bernoulli_fisher_mc_agrees() {
        let m = model_by_name("bernoulli").unwrap();
        let theta = [0.4];
        let mc = fisher_metric_mc(&m, &theta, 200_000, 11).unwrap();
        let exact = fisher_metric(&m, &theta).unwrap();
        let err = (mc.estimate[(0, 0)] - exact[(0, 0)]).abs();
        assert!(
            err < 4.0 * mc.std_error[(0, 0)],
            "err {err} vs se {}",
            mc.std_error[(0, 0)]
        );
    }

    #[test]
    fn normal1_skewness_mc_agrees() {
        let m = model_by_name("normal-1").unwrap();
        let theta = [0.0, -0.5];
        let mc = skewness_tensor_mc(&m, &theta, 200_000, 5).unwrap();
        let exact = skewness_tensor(&m, &theta).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let err = (mc.estimate[(i, j, k)] - exact[(i, j, k)]).abs();
                    let se = mc.std_error[(i, j, k)].max(1e-12);
                    assert!(err < 5.0 * se, "({i},{j},{k}): err {err} vs se {se}");
                }
            }
        }
    }
}

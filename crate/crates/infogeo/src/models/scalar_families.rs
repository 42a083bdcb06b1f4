//! One-dimensional exponential families and the flat toy model.
//!
//! The flat toy model (unit-variance Gaussian location family,
//! φ(θ) = ½Σθᵢ²) is the designated zero-curvature fixture: its Fisher
//! metric is the identity everywhere, so every curvature quantity
//! downstream must vanish identically.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expr::{Domain, Expr, ScalarField};
use crate::models::{ExponentialFamilyModel, FamilyOps, ModelMetadata, PointSampler};

fn one_dim_metadata() -> ModelMetadata {
    ModelMetadata {
        simply_connected: true,
        admits_kaehler: false,
        symmetric_space_known: None,
    }
}

/// Gaussian location family with identity covariance: φ(θ) = ½ Σ θᵢ².
pub fn flat_toy_model(n: usize) -> Result<ExponentialFamilyModel> {
    if n == 0 {
        return Err(Error::InvalidInput("flat toy model needs n ≥ 1".into()));
    }
    let mut phi = Expr::constant(0.0);
    for i in 0..n {
        phi = phi + 0.5 * (Expr::var(i) * Expr::var(i));
    }
    let potential = ScalarField::new(n, &phi, Domain::unrestricted(n))?;

    let dim = n;
    let family = FamilyOps {
        sample_dim: n,
        carrier: Arc::new(move |x: &[f64]| {
            -0.5 * dim as f64 * TAU.ln() - 0.5 * x.iter().map(|v| v * v).sum::<f64>()
        }),
        statistics: Arc::new(|x: &[f64]| x.to_vec()),
        sampler: Arc::new(move |theta: &[f64], count: usize, seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| {
                    theta
                        .iter()
                        .map(|&t| t + rng.sample::<f64, _>(StandardNormal))
                        .collect()
                })
                .collect())
        }),
    };

    Ok(ExponentialFamilyModel {
        name: if n == 2 {
            "flat-toy".to_string()
        } else {
            format!("flat-toy-{n}")
        },
        dim: n,
        potential,
        metadata: ModelMetadata {
            simply_connected: true,
            admits_kaehler: false,
            symmetric_space_known: Some(true),
        },
        family: Some(family),
        point_sampler: PointSampler::ThetaBox(vec![(-2.0, 2.0); n]),
    })
}

/// Bernoulli family: θ = logit p, φ(θ) = log(1 + e^θ), F(x) = x.
pub fn bernoulli_model() -> ExponentialFamilyModel {
    let phi = (Expr::constant(1.0) + Expr::var(0).exp()).ln();
    let potential = ScalarField::new(1, &phi, Domain::unrestricted(1)).expect("compiles");

    let family = FamilyOps {
        sample_dim: 1,
        carrier: Arc::new(|_x: &[f64]| 0.0),
        statistics: Arc::new(|x: &[f64]| vec![x[0]]),
        sampler: Arc::new(|theta: &[f64], count: usize, seed: u64| {
            let p = 1.0 / (1.0 + (-theta[0]).exp());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| vec![if rng.random::<f64>() < p { 1.0 } else { 0.0 }])
                .collect())
        }),
    };

    ExponentialFamilyModel {
        name: "bernoulli".into(),
        dim: 1,
        potential,
        metadata: one_dim_metadata(),
        family: Some(family),
        point_sampler: PointSampler::ThetaBox(vec![(-2.0, 2.0)]),
    }
}

/// Poisson family: θ = log λ, φ(θ) = e^θ, F(x) = x, C(x) = −log x!.
pub fn poisson_model() -> ExponentialFamilyModel {
    let potential =
        ScalarField::new(1, &Expr::var(0).exp(), Domain::unrestricted(1)).expect("compiles");

    let family = FamilyOps {
        sample_dim: 1,
        carrier: Arc::new(|x: &[f64]| {
            let k = x[0].round() as u64;
            -(2..=k).map(|i| (i as f64).ln()).sum::<f64>()
        }),
        statistics: Arc::new(|x: &[f64]| vec![x[0]]),
        sampler: Arc::new(|theta: &[f64], count: usize, seed: u64| {
            let lambda = theta[0].exp();
            if lambda > 100.0 {
                return Err(Error::InvalidInput(format!(
                    "poisson sampler supports rate ≤ 100, got {lambda}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| {
                    // inversion by sequential search
                    let mut u: f64 = rng.random();
                    let mut p = (-lambda).exp();
                    let mut k = 0u64;
                    while u > p && k < 10_000 {
                        u -= p;
                        k += 1;
                        p *= lambda / k as f64;
                    }
                    vec![k as f64]
                })
                .collect())
        }),
    };

    ExponentialFamilyModel {
        name: "poisson".into(),
        dim: 1,
        potential,
        metadata: one_dim_metadata(),
        family: Some(family),
        point_sampler: PointSampler::ThetaBox(vec![(-1.0, 1.5)]),
    }
}

/// Gamma family with fixed shape k = 2: θ = −1/scale, φ(θ) = −2 log(−θ),
/// F(x) = x, C(x) = log x.
pub fn gamma_shape2_model() -> ExponentialFamilyModel {
    let phi = -2.0 * (-Expr::var(0)).ln();
    let potential = ScalarField::new(
        1,
        &phi,
        Domain::unrestricted(1).with_bound(0, f64::NEG_INFINITY, 0.0),
    )
    .expect("compiles");

    let family = FamilyOps {
        sample_dim: 1,
        carrier: Arc::new(|x: &[f64]| x[0].ln()),
        statistics: Arc::new(|x: &[f64]| vec![x[0]]),
        sampler: Arc::new(|theta: &[f64], count: usize, seed: u64| {
            let scale = -1.0 / theta[0];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| {
                    // shape-2 gamma: sum of two exponentials
                    let u1: f64 = rng.random();
                    let u2: f64 = rng.random();
                    vec![-scale * (u1.ln() + u2.ln())]
                })
                .collect())
        }),
    };

    ExponentialFamilyModel {
        name: "gamma2".into(),
        dim: 1,
        potential,
        metadata: one_dim_metadata(),
        family: Some(family),
        point_sampler: PointSampler::ThetaBox(vec![(-3.0, -0.3)]),
    }
}

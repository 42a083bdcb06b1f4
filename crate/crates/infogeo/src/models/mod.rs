//! Registry of exponential-family statistical models.
//!
//! Each model ships its potential as a [`ScalarField`] over natural
//! coordinates θ, so that log p(x;θ) = C(x) + Σᵢ θᵢ Fᵢ(x) − φ(θ).
//! Models that support sampling also carry the carrier C, the statistics
//! F₁..F_n and a seeded sampler, which the Monte-Carlo cross-checks use.
//! Topological facts the classifier consumes (simple connectedness,
//! non-existence of a compatible Kähler metric) are fixed metadata,
//! not computations.

mod normal;
mod scalar_families;

pub use normal::{meancov_from_natural, natural_from_meancov, normal_model, MeanCovariancePoint};
pub use scalar_families::{bernoulli_model, flat_toy_model, gamma_shape2_model, poisson_model};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::ScalarField;

/// Fixed topological / complex-structure facts about a model.
///
/// `admits_kaehler` is false for every exponential family shipped here:
/// the only α-connection compatible with an almost complex structure has
/// α = ±1, never the Levi-Civita α = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelMetadata {
    pub simply_connected: bool,
    pub admits_kaehler: bool,
    pub symmetric_space_known: Option<bool>,
}

/// C(x).
pub type CarrierFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// (F₁(x), …, F_n(x)).
pub type StatisticsFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Seeded i.i.d. draws from p(·; θ): (θ, count, seed) → samples.
pub type SamplerFn = Arc<dyn Fn(&[f64], usize, u64) -> Result<Vec<Vec<f64>>> + Send + Sync>;

/// Sampling-side description of the family (carrier, statistics, sampler).
#[derive(Clone)]
pub struct FamilyOps {
    /// Dimension of the sample space (length of x).
    pub sample_dim: usize,
    pub carrier: CarrierFn,
    pub statistics: StatisticsFn,
    pub sampler: SamplerFn,
}

impl std::fmt::Debug for FamilyOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyOps")
            .field("sample_dim", &self.sample_dim)
            .finish()
    }
}

/// How to draw reproducible in-domain test points for a model.
#[derive(Debug, Clone)]
pub enum PointSampler {
    /// Uniform in a θ-space box strictly inside the domain.
    ThetaBox(Vec<(f64, f64)>),
    /// Mean in [−1.5, 1.5]^d, covariance eigenvalues in [0.6, 1.8], mapped
    /// into natural coordinates. The box is deliberately compact: it keeps
    /// test points well inside the domain and keeps the non-Einstein
    /// residual of the normal families bounded away from zero.
    NormalMeanCov { d: usize },
}

#[derive(Debug, Clone)]
pub struct ExponentialFamilyModel {
    pub name: String,
    /// Manifold dimension n (number of natural parameters).
    pub dim: usize,
    pub potential: ScalarField,
    pub metadata: ModelMetadata,
    pub family: Option<FamilyOps>,
    pub point_sampler: PointSampler,
}

impl ExponentialFamilyModel {
    pub fn family(&self) -> Result<&FamilyOps> {
        self.family
            .as_ref()
            .ok_or_else(|| Error::SamplerUnavailable(self.name.clone()))
    }

    /// log p(x; θ) = C(x) + Σ θᵢFᵢ(x) − φ(θ).
    pub fn log_density(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        let fam = self.family()?;
        let phi = self.potential.value(theta)?;
        let stats = (fam.statistics)(x);
        debug_assert_eq!(stats.len(), self.dim);
        let dot: f64 = theta.iter().zip(&stats).map(|(t, s)| t * s).sum();
        Ok((fam.carrier)(x) + dot - phi)
    }

    /// Seeded i.i.d. draws; identical seeds give identical output.
    pub fn sample(&self, theta: &[f64], count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be ≥ 1".into()));
        }
        self.potential.check_in_domain(theta)?;
        (self.family()?.sampler)(theta, count, seed)
    }

    /// Reproducible in-domain test points.
    ///
    /// Draws are rejected until they satisfy the domain; if the sampling
    /// box barely intersects the domain the result may come up short
    /// (the attempt budget is bounded), which callers should treat as a
    /// configuration problem.
    pub fn sample_domain_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let budget = 1000 + 200 * count;
        while out.len() < count && attempts < budget {
            attempts += 1;
            let theta = match &self.point_sampler {
                PointSampler::ThetaBox(bounds) => bounds
                    .iter()
                    .map(|(lo, hi)| rng.random_range(*lo..*hi))
                    .collect::<Vec<f64>>(),
                PointSampler::NormalMeanCov { d } => {
                    let point = random_meancov(*d, &mut rng);
                    natural_from_meancov(*d, &point)
                        .expect("random covariance is positive definite")
                }
            };
            if self.potential.domain().contains(&theta) {
                out.push(theta);
            }
        }
        out
    }
}

/// Random mean in [−1.5, 1.5]^d and covariance with eigenvalues in
/// [0.6, 1.8].
pub fn random_meancov(d: usize, rng: &mut ChaCha8Rng) -> MeanCovariancePoint {
    let mu = DVector::from_fn(d, |_, _| rng.random_range(-1.5..1.5));
    let eigen: Vec<f64> = (0..d).map(|_| rng.random_range(0.6..1.8)).collect();
    let q = random_orthogonal(d, rng);
    let mut sigma = DMatrix::zeros(d, d);
    for k in 0..d {
        let col = q.column(k);
        sigma += eigen[k] * &col * col.transpose();
    }
    // exact symmetry, cheap at these sizes
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    MeanCovariancePoint { mu, sigma }
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    use rand_distr::StandardNormal;
    let a = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix the gauge so the factorization is unique
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            for i in 0..d {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    q
}

/// Look a model up by name.
///
/// Shipped: `normal-1`, `normal-2`, `normal-3`, `flat-toy` (n = 2,
/// `flat-toy-N` for other n), `bernoulli`, `poisson`, `gamma2`.
pub fn model_by_name(name: &str) -> Result<ExponentialFamilyModel> {
    match name {
        "normal-1" => normal_model(1),
        "normal-2" => normal_model(2),
        "normal-3" => normal_model(3),
        "flat-toy" => flat_toy_model(2),
        "bernoulli" => Ok(bernoulli_model()),
        "poisson" => Ok(poisson_model()),
        "gamma2" => Ok(gamma_shape2_model()),
        other => {
            if let Some(rest) = other.strip_prefix("flat-toy-") {
                if let Ok(n) = rest.parse::<usize>() {
                    if (1..=12).contains(&n) {
                        return flat_toy_model(n);
                    }
                }
            }
            Err(Error::Config(format!(
                "unknown model '{other}' (shipped: {})",
                MODEL_NAMES.join(", ")
            )))
        }
    }
}

pub const MODEL_NAMES: [&str; 7] = [
    "normal-1",
    "normal-2",
    "normal-3",
    "flat-toy",
    "bernoulli",
    "poisson",
    "gamma2",
];

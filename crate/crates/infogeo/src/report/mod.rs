//! Run configuration, task orchestration, and the structured report.
//!
//! A run is described by a single declarative TOML file (or CLI flags on
//! top of it): which model, which points, which tasks, which tolerances.
//! The report echoes the fully-resolved configuration so every numeric
//! result in it carries its provenance, serializes to JSON for machines
//! and to a fixed-layout text form for humans, and is byte-identical for
//! identical configs and seeds — so no wall-clock timestamps live here.

mod text;
mod verify;

pub use text::render_text;
pub use verify::{
    reference_audit, verify_paper, AuditEntry, AuditReading, VerificationItem, VerificationTask,
};

use serde::{Deserialize, Serialize};

use crate::checks::{
    block_diagonal_partition, constant_curvature, curvature_sign_profile, is_einstein, is_flat,
    PropertyReport, SignProfile, DEFAULT_BLOCK_EDGE_TOL, DEFAULT_CONSTANT_TOL,
    DEFAULT_EINSTEIN_TOL, DEFAULT_FLAT_TOL,
};
use crate::curvature::CurvatureBundle;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Constraint, Domain, ScalarField};
use crate::holonomy::{classify, ClassifyOptions, HolonomyVerdict, DEFAULT_RANK_TOL};
use crate::linalg::min_symmetric_eigenvalue;
use crate::models::{
    meancov_from_natural, model_by_name, natural_from_meancov, ExponentialFamilyModel,
    MeanCovariancePoint, ModelMetadata, PointSampler,
};

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    /// A model from the built-in registry, by name.
    Name(String),
    /// A user-defined potential in the expression grammar.
    Inline(InlineModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub name: String,
    pub dimension: usize,
    /// Potential over variables `t1..tN` (aliases `theta1..`, `x1..`).
    pub potential: String,
    /// Open coordinate bounds, 1-based coordinate index.
    #[serde(default)]
    pub bounds: Vec<CoordBound>,
    /// Named constraints `expr > 0` in the same grammar.
    #[serde(default)]
    pub constraints: Vec<InlineConstraint>,
    #[serde(default = "default_true")]
    pub simply_connected: bool,
    #[serde(default)]
    pub admits_kaehler: bool,
    /// Box for sampling test points; defaults to [−1, 1]^n.
    #[serde(default)]
    pub point_box: Vec<[f64; 2]>,
}

/// An open coordinate bound; omitted endpoints are unbounded. (JSON has
/// no infinities, so the endpoints are optional rather than ±inf.)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordBound {
    pub coord: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineConstraint {
    pub name: String,
    pub expr: String,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointsSpec {
    /// Sampled points when no explicit list is given.
    pub count: usize,
    /// Explicit points in natural coordinates.
    pub theta: Vec<Vec<f64>>,
    /// Explicit mean/covariance points (normal models only).
    pub meancov: Vec<MeanCovSpec>,
}

impl Default for PointsSpec {
    fn default() -> Self {
        Self {
            count: 20,
            theta: Vec::new(),
            meancov: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanCovSpec {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub einstein: f64,
    pub constant_curvature: f64,
    pub flat: f64,
    pub block_edge: f64,
    /// Hard assertions against closed-form reference values.
    pub reference: f64,
    /// Quarantined-audit match threshold.
    pub audit: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            einstein: DEFAULT_EINSTEIN_TOL,
            constant_curvature: DEFAULT_CONSTANT_TOL,
            flat: DEFAULT_FLAT_TOL,
            block_edge: DEFAULT_BLOCK_EDGE_TOL,
            reference: 1e-8,
            audit: 1e-6,
            rank: DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Metric,
    Curvature,
    Checks,
    Holonomy,
    VerifyPaper,
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TaskKind::Metric => "metric",
            TaskKind::Curvature => "curvature",
            TaskKind::Checks => "checks",
            TaskKind::Holonomy => "holonomy",
            TaskKind::VerifyPaper => "verify-paper",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub waypoints: Vec<Vec<f64>>,
    #[serde(default = "default_loop_steps")]
    pub steps: usize,
}

fn default_loop_steps() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub points: PointsSpec,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tasks: Vec<TaskKind>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Explicit loops transported by the holonomy task.
    #[serde(default)]
    pub loops: Vec<LoopConfig>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_seed() -> u64 {
    42
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(src).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported config schema {} (expected {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        Ok(cfg)
    }
}

/// Instantiate the model a config refers to.
pub fn resolve_model(spec: &ModelSpec) -> Result<ExponentialFamilyModel> {
    match spec {
        ModelSpec::Name(name) => model_by_name(name),
        ModelSpec::Inline(inline) => {
            let n = inline.dimension;
            if n == 0 {
                return Err(Error::Config("inline model dimension must be ≥ 1".into()));
            }
            let root = parse_expr(&inline.potential, n)?;
            let mut domain = Domain::unrestricted(n);
            for b in &inline.bounds {
                if b.coord == 0 || b.coord > n {
                    return Err(Error::Config(format!(
                        "bound coordinate {} out of range 1..={n}",
                        b.coord
                    )));
                }
                domain = domain.with_bound(
                    b.coord - 1,
                    b.min.unwrap_or(f64::NEG_INFINITY),
                    b.max.unwrap_or(f64::INFINITY),
                );
            }
            for c in &inline.constraints {
                let expr = parse_expr(&c.expr, n)?;
                domain = domain.with_constraint(Constraint::new(c.name.clone(), n, &expr)?);
            }
            let potential = ScalarField::new(n, &root, domain)?;
            let point_box = if inline.point_box.is_empty() {
                vec![(-1.0, 1.0); n]
            } else {
                if inline.point_box.len() != n {
                    return Err(Error::Config(format!(
                        "point_box needs {n} entries, got {}",
                        inline.point_box.len()
                    )));
                }
                for b in &inline.point_box {
                    if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
                        return Err(Error::Config(format!(
                            "point_box entry {b:?} must be a finite interval"
                        )));
                    }
                }
                inline.point_box.iter().map(|b| (b[0], b[1])).collect()
            };
            Ok(ExponentialFamilyModel {
                name: inline.name.clone(),
                dim: n,
                potential,
                metadata: ModelMetadata {
                    simply_connected: inline.simply_connected,
                    admits_kaehler: inline.admits_kaehler,
                    symmetric_space_known: None,
                },
                family: None,
                point_sampler: PointSampler::ThetaBox(point_box),
            })
        }
    }
}

/// Resolve the evaluation points for a run.
pub fn resolve_points(
    model: &ExponentialFamilyModel,
    spec: &PointsSpec,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for t in &spec.theta {
        model
            .potential
            .check_in_domain(t)
            .map_err(|e| Error::Config(format!("explicit theta point rejected: {e}")))?;
        out.push(t.clone());
    }
    if !spec.meancov.is_empty() {
        let d = match model.point_sampler {
            PointSampler::NormalMeanCov { d } => d,
            _ => {
                return Err(Error::Config(format!(
                    "meancov points only apply to normal models, not '{}'",
                    model.name
                )))
            }
        };
        for mc in &spec.meancov {
            if mc.mu.len() != d || mc.sigma.len() != d || mc.sigma.iter().any(|r| r.len() != d) {
                return Err(Error::Config(format!(
                    "meancov point needs a length-{d} mean and a {d}×{d} sigma"
                )));
            }
            let point = MeanCovariancePoint {
                mu: nalgebra::DVector::from_column_slice(&mc.mu),
                sigma: nalgebra::DMatrix::from_fn(d, d, |i, j| mc.sigma[i][j]),
            };
            out.push(natural_from_meancov(d, &point)?);
        }
    }
    if out.is_empty() {
        out = model.sample_domain_points(spec.count, seed);
        if out.len() < spec.count {
            return Err(Error::Config(format!(
                "sampled only {} of {} requested points for '{}'; the sampling box \
                 barely intersects the model domain",
                out.len(),
                spec.count,
                model.name
            )));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Report types.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAtPoint {
    pub theta: Vec<f64>,
    /// (μ, Σ) chart echo for normal models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meancov: Option<MeanCovSpec>,
    pub fisher: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTask {
    pub per_point: Vec<MetricAtPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAtPoint {
    pub theta: Vec<f64>,
    pub sectional: Vec<Vec<f64>>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    /// Worst first-Bianchi residual (α = 0 only).
    pub bianchi_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTask {
    pub alpha: f64,
    pub per_point: Vec<CurvatureAtPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub theta: Vec<f64>,
    /// `None` when the sectional graph is connected (irreducibility
    /// evidence).
    pub partition: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksTask {
    pub einstein: PropertyReport,
    pub constant_curvature: PropertyReport,
    pub flat: PropertyReport,
    pub sign_profile: SignProfile,
    pub block_diagonal: Vec<BlockReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    pub waypoints: Vec<Vec<f64>>,
    pub steps: usize,
    pub matrix: Vec<Vec<f64>>,
    pub orthogonality_residual: f64,
    pub determinant: f64,
    pub step_halving_residual: f64,
    pub log_defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task: TaskKind,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transport: Option<Vec<TransportReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationTask>,
}

impl TaskOutcome {
    fn ok(task: TaskKind) -> Self {
        Self {
            task,
            status: TaskStatus::Ok,
            error: None,
            metric: None,
            curvature: None,
            checks: None,
            holonomy: None,
            transport: None,
            verification: None,
        }
    }

    fn failed(task: TaskKind, err: &Error) -> Self {
        let mut o = Self::ok(task);
        o.status = TaskStatus::Error;
        o.error = Some(err.to_string());
        o
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub schema: u32,
    /// Generator name and version (no timestamps: identical configs and
    /// seeds must produce byte-identical reports).
    pub generator: String,
    pub config: RunConfig,
    pub tasks: Vec<TaskOutcome>,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Config(format!("report parse: {e}")))
    }

    /// Nonzero-exit condition: a task errored or a non-quarantined
    /// verification item failed.
    pub fn has_failures(&self) -> bool {
        self.tasks.iter().any(|t| {
            t.status == TaskStatus::Error
                || t.verification
                    .as_ref()
                    .map(|v| v.failed > 0)
                    .unwrap_or(false)
        })
    }
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

/// Execute every task in the config and assemble the report.
/// Task errors are captured per-task; they fail the exit status, not the
/// run.
pub fn run(config: &RunConfig) -> Result<VerdictReport> {
    let model = resolve_model(&config.model)?;
    let points = resolve_points(&model, &config.points, config.seed)?;
    if config.tasks.is_empty() {
        return Err(Error::Config("no tasks requested".into()));
    }

    let mut tasks = Vec::new();
    for task in &config.tasks {
        let outcome = match task {
            TaskKind::Metric => run_metric(&model, &points),
            TaskKind::Curvature => run_curvature(&model, &points, config.alpha),
            TaskKind::Checks => run_checks(&model, &points, &config.tolerances),
            TaskKind::Holonomy => run_holonomy(
                &model,
                &points,
                config.seed,
                &config.tolerances,
                &config.loops,
            ),
            TaskKind::VerifyPaper => {
                let v = verify_paper(config.seed, &config.tolerances);
                let mut o = TaskOutcome::ok(TaskKind::VerifyPaper);
                match v {
                    Ok(task) => o.verification = Some(task),
                    Err(e) => {
                        o.status = TaskStatus::Error;
                        o.error = Some(e.to_string());
                    }
                }
                o
            }
        };
        tasks.push(outcome);
    }

    Ok(VerdictReport {
        schema: SCHEMA_VERSION,
        generator: format!("infogeo {}", env!("CARGO_PKG_VERSION")),
        config: config.clone(),
        tasks,
    })
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn run_metric(model: &ExponentialFamilyModel, points: &[Vec<f64>]) -> TaskOutcome {
    let mut out = TaskOutcome::ok(TaskKind::Metric);
    let mut per_point = Vec::new();
    for theta in points {
        match crate::curvature::fisher_metric(model, theta) {
            Ok(g) => {
                let meancov = match model.point_sampler {
                    PointSampler::NormalMeanCov { d } => {
                        meancov_from_natural(d, theta).ok().map(|p| MeanCovSpec {
                            mu: p.mu.as_slice().to_vec(),
                            sigma: matrix_rows(&p.sigma),
                        })
                    }
                    _ => None,
                };
                per_point.push(MetricAtPoint {
                    theta: theta.clone(),
                    meancov,
                    min_eigenvalue: min_symmetric_eigenvalue(&g),
                    fisher: matrix_rows(&g),
                });
            }
            Err(e) => return TaskOutcome::failed(TaskKind::Metric, &e),
        }
    }
    out.metric = Some(MetricTask { per_point });
    out
}

fn bianchi_residual(r: &crate::tensors::Tensor4) -> f64 {
    let n = r.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let s = r[(i, j, k, l)] + r[(j, k, i, l)] + r[(k, i, j, l)];
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

fn run_curvature(model: &ExponentialFamilyModel, points: &[Vec<f64>], alpha: f64) -> TaskOutcome {
    let mut out = TaskOutcome::ok(TaskKind::Curvature);
    let mut per_point = Vec::new();
    for theta in points {
        match CurvatureBundle::compute(model, theta, alpha) {
            Ok(b) => per_point.push(CurvatureAtPoint {
                theta: theta.clone(),
                sectional: matrix_rows(&b.sectional),
                ricci: matrix_rows(&b.ricci),
                scalar: b.scalar,
                bianchi_residual: if alpha == 0.0 {
                    bianchi_residual(&b.riemann)
                } else {
                    0.0
                },
            }),
            Err(e) => return TaskOutcome::failed(TaskKind::Curvature, &e),
        }
    }
    out.curvature = Some(CurvatureTask { alpha, per_point });
    out
}

fn run_checks(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
    tol: &Tolerances,
) -> TaskOutcome {
    let mut out = TaskOutcome::ok(TaskKind::Checks);
    let inner = (|| -> Result<ChecksTask> {
        let einstein = is_einstein(model, points, tol.einstein)?;
        let constant = constant_curvature(model, points, tol.constant_curvature)?;
        let flat = is_flat(model, points, tol.flat)?;
        let sign_profile = curvature_sign_profile(model, points)?;
        let mut block_diagonal = Vec::new();
        for theta in points {
            let b = CurvatureBundle::compute(model, theta, 0.0)?;
            block_diagonal.push(BlockReport {
                theta: theta.clone(),
                partition: block_diagonal_partition(&b.sectional, tol.block_edge),
            });
        }
        Ok(ChecksTask {
            einstein,
            constant_curvature: constant,
            flat,
            sign_profile,
            block_diagonal,
        })
    })();
    match inner {
        Ok(c) => out.checks = Some(c),
        Err(e) => return TaskOutcome::failed(TaskKind::Checks, &e),
    }
    out
}

fn run_holonomy(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
    seed: u64,
    tol: &Tolerances,
    loops: &[LoopConfig],
) -> TaskOutcome {
    let mut out = TaskOutcome::ok(TaskKind::Holonomy);
    let options = ClassifyOptions {
        einstein_tol: tol.einstein,
        block_edge_tol: tol.block_edge,
        rank_tol: tol.rank,
    };
    match classify(model, points.len(), seed, &options) {
        Ok(v) => out.holonomy = Some(v),
        Err(e) => return TaskOutcome::failed(TaskKind::Holonomy, &e),
    }
    if !loops.is_empty() {
        let mut reports = Vec::new();
        for l in loops {
            let spec = crate::holonomy::LoopSpec::new(l.waypoints.clone());
            match crate::holonomy::parallel_transport_loop(model, &spec, l.steps) {
                Ok(t) => reports.push(TransportReport {
                    waypoints: l.waypoints.clone(),
                    steps: l.steps,
                    matrix: matrix_rows(&t.matrix),
                    orthogonality_residual: t.orthogonality_residual,
                    determinant: t.determinant,
                    step_halving_residual: t.step_halving_residual,
                    log_defined: t.log_map.is_some(),
                }),
                Err(e) => return TaskOutcome::failed(TaskKind::Holonomy, &e),
            }
        }
        out.transport = Some(reports);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_minimal_toml() {
        let cfg = RunConfig::from_toml(
            r#"
            model = "normal-1"
            tasks = ["metric"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.model, ModelSpec::Name("normal-1".into()));
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.points.count, 20);
        assert_eq!(cfg.tasks, vec![TaskKind::Metric]);
    }

    #[test]
    fn config_inline_model() {
        let cfg = RunConfig::from_toml(
            r#"
            tasks = ["checks"]
            [model]
            name = "custom-quad"
            dimension = 2
            potential = "0.5*(t1*t1 + t2*t2)"
            "#,
        )
        .unwrap();
        let model = resolve_model(&cfg.model).unwrap();
        assert_eq!(model.dim, 2);
        assert_eq!(model.name, "custom-quad");
        assert!(model.metadata.simply_connected);
        assert!(!model.metadata.admits_kaehler);
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(RunConfig::from_toml("model = \"normal-1\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn explicit_meancov_points_resolve() {
        let cfg = RunConfig::from_toml(
            r#"
            model = "normal-1"
            tasks = ["metric"]
            [points]
            meancov = [{ mu = [0.0], sigma = [[1.0]] }]
            "#,
        )
        .unwrap();
        let model = resolve_model(&cfg.model).unwrap();
        let pts = resolve_points(&model, &cfg.points, cfg.seed).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0][0] - 0.0).abs() < 1e-15);
        assert!((pts[0][1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_explicit_point_is_a_config_error() {
        let cfg = RunConfig::from_toml(
            r#"
            model = "normal-1"
            tasks = ["metric"]
            [points]
            theta = [[0.0, 0.5]]
            "#,
        )
        .unwrap();
        let model = resolve_model(&cfg.model).unwrap();
        assert!(matches!(
            resolve_points(&model, &cfg.points, cfg.seed),
            Err(Error::Config(_))
        ));
    }
}

//! The `verify-paper` regression suite: every published reference value
//! the engine is expected to reproduce, executed with fixed seeds and
//! reported item by item.
//!
//! Hard items assert unambiguous values (the N¹ metric and curvature, the
//! constant N² sectional entries, Einstein verdicts, candidate sets,
//! algebra dimensions, classification verdicts). The quarantined
//! closed-form N² tables are *audited*: each transcribed expression is
//! evaluated under the two documented readings of its ambiguous symbol
//! and the agreement is reported in a discrepancy ledger instead of being
//! asserted.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{
    block_diagonal_partition, curvature_sign_profile, is_einstein, SignProfile, Verdict,
};
use crate::curvature::{fisher_metric, CurvatureBundle};
use crate::error::Result;
use crate::holonomy::{
    berger_candidates, classify, curvature_algebra_dimension, ClassifyOptions, EvidenceFlags,
    VerdictKind,
};
use crate::models::{model_by_name, natural_from_meancov, normal_model, MeanCovariancePoint};
use crate::reference::{
    fisher_reference, reference_entries, EntryKind, Normal2Params, SigmaTwoReading,
};

use super::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationItem {
    pub name: String,
    pub passed: bool,
    /// Worst absolute (or stated-relative) error observed.
    pub worst_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReading {
    pub symbol_map: String,
    pub max_abs_err: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    /// Quarantined entries carry a visibly ambiguous symbol and are
    /// reported, never asserted.
    pub quarantined: bool,
    pub readings: Vec<AuditReading>,
    /// The reading that matched, when exactly one did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationTask {
    pub items: Vec<VerificationItem>,
    pub audit: Vec<AuditEntry>,
    pub passed: usize,
    /// Failed *hard* items (audit mismatches do not count here).
    pub failed: usize,
    pub audit_matched: usize,
    pub audit_total: usize,
}

struct Ctx {
    items: Vec<VerificationItem>,
    tol: Tolerances,
}

impl Ctx {
    fn push(&mut self, name: &str, worst: f64, tol: f64, detail: String) {
        self.items.push(VerificationItem {
            name: name.into(),
            passed: worst <= tol,
            worst_error: worst,
            tolerance: tol,
            detail,
        });
    }

    fn push_bool(&mut self, name: &str, ok: bool, detail: String) {
        self.items.push(VerificationItem {
            name: name.into(),
            passed: ok,
            worst_error: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail,
        });
    }
}

/// Run the full regression suite. Deterministic for a fixed seed.
pub fn verify_paper(seed: u64, tolerances: &Tolerances) -> Result<VerificationTask> {
    let mut ctx = Ctx {
        items: Vec::new(),
        tol: *tolerances,
    };

    normal1_metric_items(&mut ctx, seed)?;
    normal1_curvature_items(&mut ctx, seed)?;
    normal2_constant_sectional_items(&mut ctx, seed)?;
    normal2_fisher_table_item(&mut ctx, seed)?;
    einstein_items(&mut ctx, seed)?;
    profile_and_block_items(&mut ctx, seed)?;
    candidate_set_items(&mut ctx)?;
    algebra_dimension_items(&mut ctx, seed)?;
    classify_items(&mut ctx, seed)?;
    let audit = reference_audit(seed, tolerances.audit)?;

    let passed = ctx.items.iter().filter(|i| i.passed).count();
    let failed = ctx.items.len() - passed;
    let audit_matched = audit.iter().filter(|a| a.resolved.is_some()).count();
    let audit_total = audit.len();
    Ok(VerificationTask {
        items: ctx.items,
        audit,
        passed,
        failed,
        audit_matched,
        audit_total,
    })
}

fn random_meancov_points(d: usize, count: usize, seed: u64) -> Vec<MeanCovariancePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| crate::models::random_meancov(d, &mut rng))
        .collect()
}

fn normal1_metric_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let m = normal_model(1)?;
    let g = fisher_metric(&m, &[0.0, -0.5])?;
    let target = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
    let worst = (g - target).abs().max();
    ctx.push(
        "normal-1 fisher matrix at (mu=0, sigma=1) equals [[1,0],[0,2]]",
        worst,
        1e-10,
        "exact jet Hessian of the potential".into(),
    );

    // closed form g = [[σ², 2μσ²], [2μσ², 2σ²(2μ² + σ²)]] at random points
    let mut worst_rel = 0.0f64;
    for p in random_meancov_points(1, 100, seed ^ 0x11) {
        let theta = natural_from_meancov(1, &p)?;
        let g = fisher_metric(&m, &theta)?;
        let (mu, var) = (p.mu[0], p.sigma[(0, 0)]);
        let expect = [
            [var, 2.0 * mu * var],
            [2.0 * mu * var, 2.0 * var * (2.0 * mu * mu + var)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let e = expect[i][j];
                let rel = (g[(i, j)] - e).abs() / e.abs().max(1.0);
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    ctx.push(
        "normal-1 fisher matches the closed-form matrix at 100 random points",
        worst_rel,
        1e-9,
        "relative to max(1, |expected|)".into(),
    );
    Ok(())
}

fn normal1_curvature_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let m = normal_model(1)?;
    let mut worst = 0.0f64;
    for p in random_meancov_points(1, 100, seed ^ 0x22) {
        let theta = natural_from_meancov(1, &p)?;
        let b = CurvatureBundle::compute(&m, &theta, 0.0)?;
        worst = worst.max((b.sectional[(0, 1)] + 0.5).abs());
    }
    ctx.push(
        "normal-1 sectional curvature equals -1/2 at 100 random points",
        worst,
        1e-8,
        "constant negative curvature of the location-scale family".into(),
    );
    Ok(())
}

fn normal2_constant_sectional_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let m = normal_model(2)?;
    let pts = random_meancov_points(2, 20, seed ^ 0x33);
    let (mut w12, mut w13, mut w25, mut wdiag, mut wric) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &pts {
        let theta = natural_from_meancov(2, p)?;
        let b = CurvatureBundle::compute(&m, &theta, 0.0)?;
        w12 = w12.max((b.sectional[(0, 1)] - 0.25).abs());
        w13 = w13.max((b.sectional[(0, 2)] + 0.5).abs());
        w25 = w25.max((b.sectional[(1, 4)] + 0.5).abs());
        for i in 0..5 {
            wdiag = wdiag.max(b.sectional[(i, i)].abs());
        }
        wric = wric.max((b.ricci[(0, 0)] + 0.5 * p.sigma[(0, 0)]).abs());
    }
    let tol = ctx.tol.reference;
    ctx.push(
        "normal-2 K12 = 1/4 at 20 random points (alpha=0)",
        w12,
        tol,
        String::new(),
    );
    ctx.push(
        "normal-2 K13 = -1/2 at 20 random points (alpha=0)",
        w13,
        tol,
        String::new(),
    );
    ctx.push(
        "normal-2 K25 = -1/2 at 20 random points (alpha=0)",
        w25,
        tol,
        String::new(),
    );
    ctx.push(
        "normal-2 sectional diagonal is zero",
        wdiag,
        tol,
        String::new(),
    );
    ctx.push(
        "normal-2 Ric11 = -Sigma11/2 at 20 random points (alpha=0)",
        wric,
        tol,
        "symbol map: sigma1 = Sigma11".into(),
    );
    Ok(())
}

fn normal2_fisher_table_item(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let m = normal_model(2)?;
    let mut worst = 0.0f64;
    for p in random_meancov_points(2, 20, seed ^ 0x44) {
        let theta = natural_from_meancov(2, &p)?;
        let g = fisher_metric(&m, &theta)?;
        let params = Normal2Params {
            mu1: p.mu[0],
            mu2: p.mu[1],
            s11: p.sigma[(0, 0)],
            s22: p.sigma[(1, 1)],
            s12: p.sigma[(0, 1)],
        };
        let expect = fisher_reference(&params);
        for i in 0..5 {
            for j in 0..5 {
                let rel = (g[(i, j)] - expect[i][j]).abs() / expect[i][j].abs().max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    ctx.push(
        "normal-2 fisher matches the statistic-covariance table at 20 random points",
        worst,
        1e-9,
        "relative to max(1, |expected|)".into(),
    );
    Ok(())
}

fn einstein_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let tol = ctx.tol.einstein;

    let m1 = model_by_name("normal-1")?;
    let r1 = is_einstein(&m1, &m1.sample_domain_points(20, seed ^ 0x55), tol)?;
    let k_err = r1
        .constant
        .map(|k| (k + 0.5).abs())
        .unwrap_or(f64::INFINITY);
    ctx.push_bool(
        "normal-1 einstein holds with k = -1/2",
        r1.verdict == Verdict::Holds && k_err <= 1e-8,
        format!("verdict {:?}, |k + 1/2| = {k_err:.3e}", r1.verdict),
    );

    for (name, label) in [("normal-2", "normal-2"), ("normal-3", "normal-3")] {
        let m = model_by_name(name)?;
        let pts = m.sample_domain_points(20, seed ^ 0x56);
        let r = is_einstein(&m, &pts, tol)?;
        // every sampled point must be far from Einstein
        let mut min_resid = f64::INFINITY;
        for theta in &pts {
            let b = CurvatureBundle::compute(&m, theta, 0.0)?;
            let g2: f64 = b.metric.iter().map(|v| v * v).sum();
            let dot: f64 = b
                .ricci
                .iter()
                .zip(b.metric.iter())
                .map(|(r, g)| r * g)
                .sum();
            let k = dot / g2;
            let resid = crate::linalg::frobenius(&(&b.ricci - &b.metric * k))
                / crate::linalg::frobenius(&b.ricci);
            min_resid = min_resid.min(resid);
        }
        ctx.push_bool(
            &format!("{label} is not einstein (relative residual > 0.1 at every point)"),
            r.verdict == Verdict::Fails && min_resid > 0.1,
            format!(
                "verdict {:?}, smallest relative residual {min_resid:.3}",
                r.verdict
            ),
        );
    }
    Ok(())
}

fn profile_and_block_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let m1 = model_by_name("normal-1")?;
    let p1 = curvature_sign_profile(&m1, &m1.sample_domain_points(20, seed ^ 0x66))?;
    ctx.push_bool(
        "normal-1 curvature sign profile is all_nonpositive",
        p1 == SignProfile::AllNonpositive,
        format!("profile {p1:?}"),
    );

    for name in ["normal-2", "normal-3"] {
        let m = model_by_name(name)?;
        let pts = m.sample_domain_points(20, seed ^ 0x67);
        let prof = curvature_sign_profile(&m, &pts)?;
        ctx.push_bool(
            &format!("{name} curvature sign profile is mixed"),
            prof == SignProfile::Mixed,
            format!("profile {prof:?}"),
        );
        let mut connected = true;
        for theta in &pts {
            let b = CurvatureBundle::compute(&m, theta, 0.0)?;
            if block_diagonal_partition(&b.sectional, ctx.tol.block_edge).is_some() {
                connected = false;
            }
        }
        ctx.push_bool(
            &format!("{name} sectional graph is connected at all sampled points"),
            connected,
            "no block-diagonal split (irreducibility evidence)".into(),
        );
    }

    let flat = model_by_name("flat-toy")?;
    let pts = flat.sample_domain_points(5, seed ^ 0x68);
    let b = CurvatureBundle::compute(&flat, &pts[0], 0.0)?;
    let partition = block_diagonal_partition(&b.sectional, ctx.tol.block_edge);
    ctx.push_bool(
        "flat-toy sectional graph splits into singletons",
        partition
            .as_ref()
            .map(|p| p.len() == flat.dim)
            .unwrap_or(false),
        format!("partition {partition:?}"),
    );
    Ok(())
}

fn candidate_set_items(ctx: &mut Ctx) -> Result<()> {
    let exp_flags = |n: usize, einstein: bool| EvidenceFlags {
        n,
        simply_connected: true,
        irreducible: true,
        nonsymmetric: true,
        einstein,
        ricci_flat: einstein,
        admits_kaehler: false,
        exponential_family: true,
    };
    let to_names = |flags: &EvidenceFlags| -> Result<Vec<String>> {
        Ok(berger_candidates(flags)?
            .iter()
            .map(|c| c.group.to_string())
            .collect())
    };

    let got = to_names(&exp_flags(5, false))?;
    ctx.push_bool(
        "candidates for n=5 exponential family, not einstein: [SO(5)]",
        got == ["SO(5)"],
        format!("{got:?}"),
    );
    let got = to_names(&exp_flags(7, true))?;
    ctx.push_bool(
        "candidates for n=7 exponential family: [SO(7), G2]",
        got == ["SO(7)", "G2"],
        format!("{got:?}"),
    );
    let got = to_names(&exp_flags(8, true))?;
    ctx.push_bool(
        "candidates for n=8 exponential family: [SO(8), Sp(2)·Sp(1), Spin(7)]",
        got == ["SO(8)", "Sp(2)·Sp(1)", "Spin(7)"],
        format!("{got:?}"),
    );
    let got = to_names(&exp_flags(9, false))?;
    ctx.push_bool(
        "candidates for n=9 exponential family, not einstein: [SO(9)]",
        got == ["SO(9)"],
        format!("{got:?}"),
    );
    Ok(())
}

fn algebra_dimension_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    for (name, points, expected) in [
        ("flat-toy", 3usize, 0usize),
        ("normal-1", 5, 1),
        ("normal-2", 5, 10),
        ("normal-3", 3, 36),
    ] {
        let m = model_by_name(name)?;
        let pts = m.sample_domain_points(points, seed ^ 0x77);
        let mut all_match = true;
        let mut dims = Vec::new();
        for theta in &pts {
            let d = curvature_algebra_dimension(&m, theta, ctx.tol.rank)?;
            all_match &= d == expected;
            dims.push(d);
        }
        ctx.push_bool(
            &format!("{name} curvature-algebra dimension = {expected} at every sampled point"),
            all_match,
            format!("per-point dims {dims:?}"),
        );
    }
    Ok(())
}

fn classify_items(ctx: &mut Ctx, seed: u64) -> Result<()> {
    let options = ClassifyOptions::default();
    for (name, points, expected) in [
        ("normal-1", 6usize, "SO(2)"),
        ("normal-2", 6, "SO(5)"),
        ("normal-3", 5, "SO(9)"),
    ] {
        let m = model_by_name(name)?;
        let v = classify(&m, points, seed ^ 0x88, &options)?;
        let ok = v.verdict == VerdictKind::Group(expected.into())
            && v.assumptions.iter().any(|a| a.contains("simply_connected"))
            && v.assumptions.iter().any(|a| a.contains("admits_kaehler"));
        ctx.push_bool(
            &format!("classify({name}) = {expected} with metadata assumptions recorded"),
            ok,
            format!(
                "verdict {}, algebra dim {}/{}",
                v.verdict, v.curvature_algebra_dim, v.so_dim
            ),
        );
    }
    let flat = model_by_name("flat-toy")?;
    let v = classify(&flat, 6, seed ^ 0x88, &options)?;
    ctx.push_bool(
        "classify(flat-toy) reports decision-table hypotheses unmet",
        matches!(v.verdict, VerdictKind::NotClassified(_)),
        format!("verdict {}", v.verdict),
    );
    Ok(())
}

/// Evaluate every transcribed closed-form entry at random points under
/// both documented symbol readings.
pub fn reference_audit(seed: u64, tol: f64) -> Result<Vec<AuditEntry>> {
    let m = normal_model(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
    let mut points = Vec::new();
    for _ in 0..12 {
        let p = crate::models::random_meancov(2, &mut rng);
        let alpha = rng.random_range(-1.0..1.0);
        points.push((p, alpha));
    }

    let readings = [SigmaTwoReading::Variance, SigmaTwoReading::Covariance];
    let mut out = Vec::new();
    for entry in reference_entries() {
        let mut errs = [0.0f64; 2];
        for (p, alpha) in &points {
            let theta = natural_from_meancov(2, p)?;
            let b = CurvatureBundle::compute(&m, &theta, *alpha)?;
            let numeric = match entry.kind {
                EntryKind::Sectional => b.sectional[(entry.slot.0, entry.slot.1)],
                EntryKind::Ricci => b.ricci[(entry.slot.0, entry.slot.1)],
            };
            let params = Normal2Params {
                mu1: p.mu[0],
                mu2: p.mu[1],
                s11: p.sigma[(0, 0)],
                s22: p.sigma[(1, 1)],
                s12: p.sigma[(0, 1)],
            };
            for (k, r) in readings.iter().enumerate() {
                errs[k] = errs[k].max(((entry.eval)(&params, *alpha, *r) - numeric).abs());
            }
        }
        let rds: Vec<AuditReading> = readings
            .iter()
            .zip(errs)
            .map(|(r, e)| AuditReading {
                symbol_map: r.label().to_string(),
                max_abs_err: e,
                matched: e <= tol,
            })
            .collect();
        let resolved = match (rds[0].matched, rds[1].matched) {
            (true, true) => Some("both readings agree".to_string()),
            (true, false) => Some(rds[0].symbol_map.clone()),
            (false, true) => Some(rds[1].symbol_map.clone()),
            (false, false) => None,
        };
        out.push(AuditEntry {
            name: entry.name.to_string(),
            quarantined: entry.ambiguous,
            readings: rds,
            resolved,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes_on_fresh_checkout() {
        let v = verify_paper(42, &Tolerances::default()).unwrap();
        for item in &v.items {
            assert!(item.passed, "item failed: {} ({})", item.name, item.detail);
        }
        assert_eq!(v.failed, 0);
        // the resolved symbol map reproduces every transcribed expression
        assert_eq!(v.audit_matched, v.audit_total);
        assert!(v.audit.len() >= 25);
    }
}

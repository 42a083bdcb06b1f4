//! End-to-end holonomy classification for a model.
//!
//! Pipeline: sample in-domain points → property checks (Einstein,
//! curvature signs, block structure) → assemble evidence flags (topology
//! and Kähler facts come from model metadata and are recorded as
//! assumptions) → filter the decision table → curvature-span algebra
//! dimension per point. When the algebra dimension reaches dim so(n) at
//! any point, the restricted holonomy group is all of SO(n); for simply
//! connected manifolds that is the full holonomy group. This saturation
//! route does not need the decision-table hypotheses, which matters for
//! the one-dimensional normal family (a symmetric space — the table does
//! not apply — whose holonomy is still SO(2)).

use serde::{Deserialize, Serialize};

use crate::checks::{
    block_diagonal_partition, curvature_sign_profile, is_einstein, SignProfile, Verdict,
    DEFAULT_BLOCK_EDGE_TOL, DEFAULT_EINSTEIN_TOL,
};
use crate::curvature::CurvatureBundle;
use crate::error::{Error, Result};
use crate::models::ExponentialFamilyModel;

use super::algebra::{curvature_algebra_dimension_multi, DEFAULT_RANK_TOL};
use super::{berger_candidates, EvidenceFlags, HolonomyCandidate};

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub einstein_tol: f64,
    pub block_edge_tol: f64,
    pub rank_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            einstein_tol: DEFAULT_EINSTEIN_TOL,
            block_edge_tol: DEFAULT_BLOCK_EDGE_TOL,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "group")]
pub enum VerdictKind {
    /// A single group pinned down by the evidence.
    Group(String),
    /// Surviving candidates listed, no single winner.
    Inconclusive,
    /// The decision-table hypotheses failed and the algebra bound did not
    /// saturate.
    NotClassified(String),
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictKind::Group(g) => write!(f, "{g}"),
            VerdictKind::Inconclusive => write!(f, "inconclusive"),
            VerdictKind::NotClassified(why) => {
                write!(f, "not classified (Berger hypotheses unmet: {why})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyVerdict {
    pub model: String,
    pub n: usize,
    pub verdict: VerdictKind,
    /// Decision-table rows surviving the evidence (empty when the table
    /// does not apply).
    pub candidates: Vec<HolonomyCandidate>,
    /// Largest curvature-algebra dimension seen across sampled points.
    pub curvature_algebra_dim: usize,
    /// dim so(n) = n(n−1)/2, the ceiling.
    pub so_dim: usize,
    pub per_point_dims: Vec<usize>,
    pub evidence: EvidenceFlags,
    /// Evidence taken from metadata or heuristics rather than computed.
    pub assumptions: Vec<String>,
}

/// Classify the holonomy group from `point_budget` sampled points.
pub fn classify(
    model: &ExponentialFamilyModel,
    point_budget: usize,
    seed: u64,
    options: &ClassifyOptions,
) -> Result<HolonomyVerdict> {
    let n = model.dim;
    let so_dim = n * (n - 1) / 2;
    let points = model.sample_domain_points(point_budget.max(5), seed);

    let einstein = is_einstein(model, &points, options.einstein_tol)?;
    let profile = curvature_sign_profile(model, &points)?;
    let mut irreducible = true;
    for p in &points {
        let bundle = CurvatureBundle::compute(model, p, 0.0)?;
        if block_diagonal_partition(&bundle.sectional, options.block_edge_tol).is_some() {
            irreducible = false;
            break;
        }
    }

    let mut assumptions = vec![
        format!(
            "simply_connected = {} taken from model metadata",
            model.metadata.simply_connected
        ),
        format!(
            "admits_kaehler = {} taken from model metadata",
            model.metadata.admits_kaehler
        ),
        "nonsymmetric inferred from a mixed curvature-sign profile (heuristic evidence, not a proof)"
            .to_string(),
    ];
    // einstein / ricci_flat mean "not excluded by the evidence"; an
    // inconclusive check must not exclude anything
    let (einstein_not_excluded, ricci_flat) = match einstein.verdict {
        Verdict::Holds => (
            true,
            einstein
                .constant
                .map(|k| k.abs() <= options.einstein_tol)
                .unwrap_or(false),
        ),
        Verdict::Fails => (false, false),
        Verdict::Inconclusive => {
            assumptions.push(
                "einstein check inconclusive; einstein and ricci-flat treated as not excluded"
                    .into(),
            );
            (true, true)
        }
    };

    let evidence = EvidenceFlags {
        n,
        simply_connected: model.metadata.simply_connected,
        irreducible,
        nonsymmetric: profile == SignProfile::Mixed,
        einstein: einstein_not_excluded,
        ricci_flat,
        admits_kaehler: model.metadata.admits_kaehler,
        exponential_family: true,
    };

    let candidates = match berger_candidates(&evidence) {
        Ok(c) => Some(c),
        Err(Error::HypothesesNotMet(_)) => None,
        Err(e) => return Err(e),
    };

    let mut per_point_dims = Vec::with_capacity(points.len());
    for p in &points {
        per_point_dims.push(curvature_algebra_dimension_multi(
            model,
            std::slice::from_ref(p),
            options.rank_tol,
        )?);
    }
    let max_dim = per_point_dims.iter().copied().max().unwrap_or(0);

    let saturated = max_dim == so_dim && so_dim > 0;
    let verdict = if saturated && model.metadata.simply_connected {
        VerdictKind::Group(format!("SO({n})"))
    } else {
        match &candidates {
            None => VerdictKind::NotClassified(hypothesis_failures(&evidence)),
            Some(c) if c.len() == 1 => VerdictKind::Group(c[0].group.to_string()),
            Some(_) => VerdictKind::Inconclusive,
        }
    };
    if saturated && candidates.is_none() {
        assumptions.push(
            "decision-table hypotheses unmet; verdict rests on curvature-span saturation \
             (restricted holonomy = SO(n)) plus simple connectedness"
                .into(),
        );
    }

    let candidates = candidates.unwrap_or_else(|| {
        if saturated {
            super::holonomy_table(n)
                .into_iter()
                .filter(|c| matches!(c.group, super::BergerGroup::SpecialOrthogonal(_)))
                .collect()
        } else {
            Vec::new()
        }
    });

    Ok(HolonomyVerdict {
        model: model.name.clone(),
        n,
        verdict,
        candidates,
        curvature_algebra_dim: max_dim,
        so_dim,
        per_point_dims,
        evidence,
        assumptions,
    })
}

fn hypothesis_failures(e: &EvidenceFlags) -> String {
    let mut out = Vec::new();
    if !e.simply_connected {
        out.push("simply_connected=false");
    }
    if !e.irreducible {
        out.push("irreducible=false");
    }
    if !e.nonsymmetric {
        out.push("nonsymmetric=false");
    }
    out.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::model_by_name;

    #[test]
    fn flat_toy_is_not_classified() {
        let m = model_by_name("flat-toy").unwrap();
        let v = classify(&m, 6, 42, &ClassifyOptions::default()).unwrap();
        assert!(
            matches!(&v.verdict, VerdictKind::NotClassified(why) if why.contains("irreducible"))
        );
        assert_eq!(v.curvature_algebra_dim, 0);
        assert!(!v.evidence.irreducible);
    }

    #[test]
    fn normal1_classifies_to_so2_via_saturation() {
        let m = model_by_name("normal-1").unwrap();
        let v = classify(&m, 6, 42, &ClassifyOptions::default()).unwrap();
        assert_eq!(v.verdict, VerdictKind::Group("SO(2)".into()));
        assert_eq!(v.curvature_algebra_dim, 1);
        // the sign profile is all-nonpositive, so the decision table did
        // not apply; the assumptions ledger must say so
        assert!(v.assumptions.iter().any(|a| a.contains("saturation")));
    }
}

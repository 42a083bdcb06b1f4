//! Geometric property checks over sampled points.
//!
//! Each check evaluates curvature bundles at α = 0 on a set of in-domain
//! points and returns a [`PropertyReport`]: verdict, witnesses with their
//! residuals, and the tolerance used. Verdicts are evidence over the
//! sampled points, not symbolic proofs; the classifier records them as
//! such.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureBundle;
use crate::error::Result;
use crate::linalg::frobenius;
use crate::models::ExponentialFamilyModel;

pub const DEFAULT_EINSTEIN_TOL: f64 = 1e-6;
pub const DEFAULT_FLAT_TOL: f64 = 1e-9;
pub const DEFAULT_BLOCK_EDGE_TOL: f64 = 1e-8;
pub const DEFAULT_CONSTANT_TOL: f64 = 1e-8;
/// Dead band around zero when classifying curvature signs.
pub const SIGN_DEAD_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// A point with the numeric residual that backs the verdict.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub residual: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub witness: Vec<Witness>,
    pub tolerance: f64,
    /// Fitted constant where the property defines one (Einstein k,
    /// constant sectional κ).
    pub constant: Option<f64>,
}

impl PropertyReport {
    fn inconclusive(property: &str, tolerance: f64, why: &str) -> Self {
        Self {
            property: property.into(),
            verdict: Verdict::Inconclusive,
            witness: vec![Witness {
                point: Vec::new(),
                residual: 0.0,
                note: why.into(),
            }],
            tolerance,
            constant: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignProfile {
    AllNonnegative,
    AllNonpositive,
    Mixed,
    Zero,
}

fn bundles(model: &ExponentialFamilyModel, points: &[Vec<f64>]) -> Result<Vec<CurvatureBundle>> {
    points
        .iter()
        .map(|p| CurvatureBundle::compute(model, p, 0.0))
        .collect()
}

/// Einstein check: least-squares k per point minimizing ‖Ric − k·g‖_F,
/// holds iff the relative residual stays below `tol` everywhere and the
/// fitted k agrees across points.
pub fn is_einstein(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<PropertyReport> {
    if points.len() < 5 {
        return Ok(PropertyReport::inconclusive(
            "einstein",
            tol,
            "needs at least 5 points",
        ));
    }
    let mut ks = Vec::with_capacity(points.len());
    let mut witness = Vec::new();
    let mut worst = 0.0f64;
    for b in bundles(model, points)? {
        let g2: f64 = b.metric.iter().map(|v| v * v).sum();
        let dot: f64 = b
            .ricci
            .iter()
            .zip(b.metric.iter())
            .map(|(r, g)| r * g)
            .sum();
        let k = dot / g2;
        let resid_mat = &b.ricci - &b.metric * k;
        let ric_norm = frobenius(&b.ricci);
        let rel = if ric_norm < 1e-12 {
            frobenius(&resid_mat)
        } else {
            frobenius(&resid_mat) / ric_norm
        };
        ks.push(k);
        if rel > worst {
            worst = rel;
        }
        if rel > tol {
            witness.push(Witness {
                point: b.point.clone(),
                residual: rel,
                note: format!("relative residual above tolerance (fitted k = {k:.6})"),
            });
        }
    }
    let k_mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let k_spread = ks.iter().fold(0.0f64, |m, k| m.max((k - k_mean).abs()));
    let spread_ok = k_spread <= tol * k_mean.abs().max(1.0);
    let verdict = if witness.is_empty() && spread_ok {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    if !spread_ok {
        witness.push(Witness {
            point: Vec::new(),
            residual: k_spread,
            note: "fitted k varies across points".into(),
        });
    }
    if verdict == Verdict::Holds {
        witness.push(Witness {
            point: points[0].clone(),
            residual: worst,
            note: "worst relative residual across sampled points".into(),
        });
    }
    Ok(PropertyReport {
        property: "einstein".into(),
        verdict,
        witness,
        tolerance: tol,
        constant: if verdict == Verdict::Holds {
            Some(k_mean)
        } else {
            None
        },
    })
}

/// Constant sectional curvature: all off-diagonal K entries equal a common
/// κ within `tol` at every point.
pub fn constant_curvature(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<PropertyReport> {
    if points.len() < 5 {
        return Ok(PropertyReport::inconclusive(
            "constant-curvature",
            tol,
            "needs at least 5 points",
        ));
    }
    let all = bundles(model, points)?;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (pi, b) in all.iter().enumerate() {
        let n = b.metric.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                entries.push((pi, b.sectional[(i, j)]));
            }
        }
    }
    if entries.is_empty() {
        // one-dimensional manifold: no 2-planes, vacuously constant (flat)
        return Ok(PropertyReport {
            property: "constant-curvature".into(),
            verdict: Verdict::Holds,
            witness: Vec::new(),
            tolerance: tol,
            constant: Some(0.0),
        });
    }
    let kappa = entries.iter().map(|(_, v)| v).sum::<f64>() / entries.len() as f64;
    let mut witness = Vec::new();
    for (pi, v) in &entries {
        if (v - kappa).abs() > tol {
            witness.push(Witness {
                point: points[*pi].clone(),
                residual: (v - kappa).abs(),
                note: format!("sectional entry {v:.6} vs common κ {kappa:.6}"),
            });
        }
    }
    let verdict = if witness.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(PropertyReport {
        property: "constant-curvature".into(),
        verdict,
        witness,
        tolerance: tol,
        constant: if verdict == Verdict::Holds {
            Some(kappa)
        } else {
            None
        },
    })
}

/// Classify the multiset of off-diagonal sectional entries across points.
pub fn curvature_sign_profile(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
) -> Result<SignProfile> {
    let all = bundles(model, points)?;
    let mut has_pos = false;
    let mut has_neg = false;
    for b in &all {
        let n = b.metric.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = b.sectional[(i, j)];
                if v > SIGN_DEAD_BAND {
                    has_pos = true;
                } else if v < -SIGN_DEAD_BAND {
                    has_neg = true;
                }
            }
        }
    }
    Ok(match (has_pos, has_neg) {
        (false, false) => SignProfile::Zero,
        (true, false) => SignProfile::AllNonnegative,
        (false, true) => SignProfile::AllNonpositive,
        (true, true) => SignProfile::Mixed,
    })
}

/// Connected components of the graph with an edge (i,j) iff |K_ij| > tol.
///
/// `Some(partition)` with ≥ 2 blocks is reducibility evidence (the metric
/// could split); `None` means the graph is connected.
pub fn block_diagonal_partition(k: &DMatrix<f64>, tol: f64) -> Option<Vec<Vec<usize>>> {
    let n = k.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if k[(i, j)].abs() > tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_of_block: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of_block.iter().position(|&x| x == r) {
            Some(b) => blocks[b].push(i),
            None => {
                root_of_block.push(r);
                blocks.push(vec![i]);
            }
        }
    }
    if blocks.len() >= 2 {
        Some(blocks)
    } else {
        None
    }
}

/// Flatness: max |R_ijkl| below `tol` at every point.
pub fn is_flat(
    model: &ExponentialFamilyModel,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<PropertyReport> {
    if points.is_empty() {
        return Ok(PropertyReport::inconclusive(
            "flat",
            tol,
            "needs at least 1 point",
        ));
    }
    let mut witness = Vec::new();
    let mut worst = 0.0f64;
    for b in bundles(model, points)? {
        let m = b.riemann.max_abs();
        worst = worst.max(m);
        if m >= tol {
            witness.push(Witness {
                point: b.point.clone(),
                residual: m,
                note: "max |R_ijkl| above tolerance".into(),
            });
        }
    }
    let verdict = if witness.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    if verdict == Verdict::Holds {
        witness.push(Witness {
            point: points[0].clone(),
            residual: worst,
            note: "worst max |R_ijkl| across sampled points".into(),
        });
    }
    Ok(PropertyReport {
        property: "flat".into(),
        verdict,
        witness,
        tolerance: tol,
        constant: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::model_by_name;
    use approx::assert_relative_eq;

    #[test]
    fn block_partition_of_constructed_matrix() {
        // [[0,1,0],[1,0,0],[0,0,0]] → blocks {0,1}, {2}
        let k = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = block_diagonal_partition(&k, 1e-8).unwrap();
        assert_eq!(p, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn zero_matrix_splits_into_singletons() {
        let k = DMatrix::zeros(4, 4);
        let p = block_diagonal_partition(&k, 1e-8).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn connected_matrix_has_no_partition() {
        let k = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5, 0.0]);
        assert!(block_diagonal_partition(&k, 1e-8).is_none());
    }

    #[test]
    fn normal1_is_einstein_with_k_minus_half() {
        let m = model_by_name("normal-1").unwrap();
        let pts = m.sample_domain_points(8, 3);
        let r = is_einstein(&m, &pts, DEFAULT_EINSTEIN_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_relative_eq!(r.constant.unwrap(), -0.5, epsilon = 1e-8);
    }

    #[test]
    fn flat_toy_reports() {
        let m = model_by_name("flat-toy").unwrap();
        let pts = m.sample_domain_points(6, 4);
        assert_eq!(
            is_flat(&m, &pts, DEFAULT_FLAT_TOL).unwrap().verdict,
            Verdict::Holds
        );
        let e = is_einstein(&m, &pts, DEFAULT_EINSTEIN_TOL).unwrap();
        assert_eq!(e.verdict, Verdict::Holds);
        assert_relative_eq!(e.constant.unwrap(), 0.0);
        assert_eq!(curvature_sign_profile(&m, &pts).unwrap(), SignProfile::Zero);
    }

    #[test]
    fn too_few_points_is_inconclusive() {
        let m = model_by_name("normal-1").unwrap();
        let pts = m.sample_domain_points(3, 3);
        assert_eq!(
            is_einstein(&m, &pts, DEFAULT_EINSTEIN_TOL).unwrap().verdict,
            Verdict::Inconclusive
        );
    }
}

//! Numerical holonomy evidence and the classification decision procedure.
//!
//! Three ingredients:
//!
//! 1. the classical decision table for holonomy groups of simply
//!    connected, irreducible, nonsymmetric Riemannian manifolds,
//!    filtered by what the evidence excludes (`berger_candidates`);
//! 2. a lower bound for the holonomy algebra: the span of the curvature
//!    operators at sampled points, closed under matrix commutators
//!    (`curvature_algebra_dimension`) — if it saturates dim so(n), the
//!    group is pinned to SO(n);
//! 3. parallel transport around loops as a direct, integration-based
//!    witness (`parallel_transport_loop`), with orthogonality and
//!    consistency diagnostics.

mod algebra;
mod classify;
mod transport;

pub use algebra::{
    algebra_dimension_from_generators, curvature_algebra_dimension,
    curvature_algebra_dimension_multi, curvature_operators, DEFAULT_RANK_TOL,
};
pub use classify::{classify, ClassifyOptions, HolonomyVerdict, VerdictKind};
pub use transport::{
    loop_curvature_consistency, parallel_transport_loop, parallel_transport_path, rectangle_loop,
    Interpolation, LoopSpec, TransportResult, DEFAULT_TRANSPORT_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven families on the holonomy decision table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BergerGroup {
    /// SO(n), generic metrics, n = dim.
    SpecialOrthogonal(usize),
    /// U(m), Kähler, dim = 2m.
    Unitary(usize),
    /// SU(m), Calabi-Yau (Ricci-flat Kähler), dim = 2m.
    SpecialUnitary(usize),
    /// Sp(m)·Sp(1), quaternion-Kähler (Einstein), dim = 4m.
    QuaternionKaehler(usize),
    /// Sp(m), hyperkähler (Ricci-flat Kähler), dim = 4m.
    Symplectic(usize),
    /// G₂, dim 7, Ricci-flat.
    G2,
    /// Spin(7), dim 8, Ricci-flat.
    Spin7,
}

impl BergerGroup {
    /// The manifold dimension the table row requires (n = m, 2m, 2m, 4m,
    /// 4m, 7, 8 down the list).
    pub fn manifold_dimension(&self) -> usize {
        match self {
            BergerGroup::SpecialOrthogonal(n) => *n,
            BergerGroup::Unitary(m) | BergerGroup::SpecialUnitary(m) => 2 * m,
            BergerGroup::QuaternionKaehler(m) | BergerGroup::Symplectic(m) => 4 * m,
            BergerGroup::G2 => 7,
            BergerGroup::Spin7 => 8,
        }
    }
}

impl std::fmt::Display for BergerGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BergerGroup::SpecialOrthogonal(n) => write!(f, "SO({n})"),
            BergerGroup::Unitary(m) => write!(f, "U({m})"),
            BergerGroup::SpecialUnitary(m) => write!(f, "SU({m})"),
            BergerGroup::QuaternionKaehler(m) => write!(f, "Sp({m})·Sp(1)"),
            BergerGroup::Symplectic(m) => write!(f, "Sp({m})"),
            BergerGroup::G2 => write!(f, "G2"),
            BergerGroup::Spin7 => write!(f, "Spin(7)"),
        }
    }
}

/// A table row: the group, the manifold dimension it requires, and what
/// its presence implies about the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolonomyCandidate {
    pub group: BergerGroup,
    pub requires_kaehler: bool,
    pub requires_ricci_flat: bool,
    pub requires_einstein: bool,
}

/// All table rows whose dimension rule admits n.
pub fn holonomy_table(n: usize) -> Vec<HolonomyCandidate> {
    let mut rows = vec![HolonomyCandidate {
        group: BergerGroup::SpecialOrthogonal(n),
        requires_kaehler: false,
        requires_ricci_flat: false,
        requires_einstein: false,
    }];
    if n % 2 == 0 && n >= 2 {
        let m = n / 2;
        rows.push(HolonomyCandidate {
            group: BergerGroup::Unitary(m),
            requires_kaehler: true,
            requires_ricci_flat: false,
            requires_einstein: false,
        });
        rows.push(HolonomyCandidate {
            group: BergerGroup::SpecialUnitary(m),
            requires_kaehler: true,
            requires_ricci_flat: true,
            requires_einstein: true,
        });
    }
    if n % 4 == 0 && n >= 4 {
        let m = n / 4;
        rows.push(HolonomyCandidate {
            group: BergerGroup::QuaternionKaehler(m),
            requires_kaehler: false,
            requires_ricci_flat: false,
            requires_einstein: true,
        });
        rows.push(HolonomyCandidate {
            group: BergerGroup::Symplectic(m),
            requires_kaehler: true,
            requires_ricci_flat: true,
            requires_einstein: true,
        });
    }
    if n == 7 {
        rows.push(HolonomyCandidate {
            group: BergerGroup::G2,
            requires_kaehler: false,
            requires_ricci_flat: true,
            requires_einstein: true,
        });
    }
    if n == 8 {
        rows.push(HolonomyCandidate {
            group: BergerGroup::Spin7,
            requires_kaehler: false,
            requires_ricci_flat: true,
            requires_einstein: true,
        });
    }
    rows
}

/// Evidence assembled from checks and model metadata.
///
/// The einstein / ricci_flat / admits_kaehler flags mean "not excluded by
/// the evidence": set one to false only when the property has been ruled
/// out, since that prunes table rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceFlags {
    pub n: usize,
    pub simply_connected: bool,
    pub irreducible: bool,
    pub nonsymmetric: bool,
    pub einstein: bool,
    pub ricci_flat: bool,
    pub admits_kaehler: bool,
    pub exponential_family: bool,
}

impl EvidenceFlags {
    pub fn validate(&self) -> Result<()> {
        if self.ricci_flat && !self.einstein {
            return Err(Error::InvalidInput(
                "ricci_flat implies einstein; flags are inconsistent".into(),
            ));
        }
        Ok(())
    }
}

/// Filter the decision table by the evidence.
///
/// Requires the three table hypotheses (simply connected, irreducible,
/// nonsymmetric); then drops rows whose implications the flags exclude.
/// Exponential families never admit a compatible Kähler metric, so U, SU
/// and Sp are dropped for them regardless of the kaehler flag.
pub fn berger_candidates(flags: &EvidenceFlags) -> Result<Vec<HolonomyCandidate>> {
    flags.validate()?;
    let mut missing = Vec::new();
    if !flags.simply_connected {
        missing.push("simply_connected");
    }
    if !flags.irreducible {
        missing.push("irreducible");
    }
    if !flags.nonsymmetric {
        missing.push("nonsymmetric");
    }
    if !missing.is_empty() {
        return Err(Error::HypothesesNotMet(missing.join(", ")));
    }
    Ok(holonomy_table(flags.n)
        .into_iter()
        .filter(|row| {
            if !flags.einstein && row.requires_einstein {
                return false;
            }
            if !flags.ricci_flat && row.requires_ricci_flat {
                return false;
            }
            if !flags.admits_kaehler && row.requires_kaehler {
                return false;
            }
            if flags.exponential_family && row.requires_kaehler {
                return false;
            }
            true
        })
        .collect())
}

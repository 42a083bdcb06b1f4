//! Fixed-layout human-readable rendering of a report.
//!
//! The layout is deterministic: identical reports render to identical
//! bytes. Numbers print with `{:.6e}` unless a value is an echo of the
//! input.

use std::fmt::Write;

use super::{TaskStatus, VerdictReport};

pub fn render_text(report: &VerdictReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "infogeo report (schema {})", report.schema);
    let _ = writeln!(s, "generator: {}", report.generator);
    let model = match &report.config.model {
        super::ModelSpec::Name(n) => n.clone(),
        super::ModelSpec::Inline(m) => format!("{} (inline, n={})", m.name, m.dimension),
    };
    let _ = writeln!(
        s,
        "model: {model}   seed: {}   alpha: {}",
        report.config.seed, report.config.alpha
    );
    let _ = writeln!(s, "tolerances: {:?}", report.config.tolerances);

    for t in &report.tasks {
        let _ = writeln!(s, "\n== task: {} ==", t.task);
        if t.status == TaskStatus::Error {
            let _ = writeln!(
                s,
                "status: ERROR ({})",
                t.error.as_deref().unwrap_or("unknown")
            );
            continue;
        }
        if let Some(m) = &t.metric {
            for p in &m.per_point {
                let _ = writeln!(s, "theta: {:?}", p.theta);
                if let Some(mc) = &p.meancov {
                    let _ = writeln!(s, "  mu: {:?}  sigma: {:?}", mc.mu, mc.sigma);
                }
                let _ = writeln!(s, "  min eigenvalue: {:.6e}", p.min_eigenvalue);
                for row in &p.fisher {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:+.6e}")).collect();
                    let _ = writeln!(s, "  [ {} ]", cells.join("  "));
                }
            }
        }
        if let Some(c) = &t.curvature {
            let _ = writeln!(s, "alpha: {}", c.alpha);
            for p in &c.per_point {
                let _ = writeln!(s, "theta: {:?}", p.theta);
                let _ = writeln!(
                    s,
                    "  scalar: {:+.6e}   bianchi residual: {:.3e}",
                    p.scalar, p.bianchi_residual
                );
                let _ = writeln!(s, "  sectional:");
                for row in &p.sectional {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:+.6e}")).collect();
                    let _ = writeln!(s, "    [ {} ]", cells.join("  "));
                }
                let _ = writeln!(s, "  ricci:");
                for row in &p.ricci {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:+.6e}")).collect();
                    let _ = writeln!(s, "    [ {} ]", cells.join("  "));
                }
            }
        }
        if let Some(c) = &t.checks {
            for r in [&c.einstein, &c.constant_curvature, &c.flat] {
                let _ = writeln!(
                    s,
                    "{:<20} {:?} (tolerance {:.1e}{})",
                    r.property,
                    r.verdict,
                    r.tolerance,
                    r.constant
                        .map(|k| format!(", constant {k:+.6e}"))
                        .unwrap_or_default()
                );
                for w in r.witness.iter().take(3) {
                    let _ = writeln!(s, "    residual {:.3e}: {}", w.residual, w.note);
                }
            }
            let _ = writeln!(s, "sign profile: {:?}", c.sign_profile);
            for b in &c.block_diagonal {
                match &b.partition {
                    None => {
                        let _ = writeln!(s, "block structure at {:?}: connected", b.theta);
                    }
                    Some(p) => {
                        let _ = writeln!(s, "block structure at {:?}: {:?}", b.theta, p);
                    }
                }
            }
        }
        if let Some(h) = &t.holonomy {
            let _ = writeln!(s, "model {} (n = {})", h.model, h.n);
            let _ = writeln!(s, "verdict: {}", h.verdict);
            let _ = writeln!(
                s,
                "curvature algebra dim: {} of so(n) dim {}   per point: {:?}",
                h.curvature_algebra_dim, h.so_dim, h.per_point_dims
            );
            let cands: Vec<String> = h.candidates.iter().map(|c| c.group.to_string()).collect();
            let _ = writeln!(s, "candidates: [{}]", cands.join(", "));
            let _ = writeln!(s, "evidence: {:?}", h.evidence);
            let _ = writeln!(s, "assumptions:");
            for a in &h.assumptions {
                let _ = writeln!(s, "  - {a}");
            }
        }
        if let Some(tr) = &t.transport {
            for r in tr {
                let _ = writeln!(
                    s,
                    "loop ({} waypoints, {} steps): orthogonality {:.3e}, det {:+.6e}, \
                     step-halving {:.3e}, log {}",
                    r.waypoints.len(),
                    r.steps,
                    r.orthogonality_residual,
                    r.determinant,
                    r.step_halving_residual,
                    if r.log_defined {
                        "defined"
                    } else {
                        "undefined"
                    }
                );
            }
        }
        if let Some(v) = &t.verification {
            let _ = writeln!(s, "items: {} passed, {} failed", v.passed, v.failed);
            for item in &v.items {
                let _ = writeln!(
                    s,
                    "[{}] {} (worst {:.3e}, tol {:.1e}){}",
                    if item.passed { "PASS" } else { "FAIL" },
                    item.name,
                    item.worst_error,
                    item.tolerance,
                    if item.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" — {}", item.detail)
                    }
                );
            }
            let _ = writeln!(
                s,
                "discrepancy ledger: {}/{} transcribed expressions matched",
                v.audit_matched, v.audit_total
            );
            for a in &v.audit {
                let status = match &a.resolved {
                    Some(r) => format!("matched ({r})"),
                    None => "MISMATCH under both readings".to_string(),
                };
                let _ = writeln!(
                    s,
                    "  {:<6} {} {}",
                    a.name,
                    if a.quarantined {
                        "[quarantined]"
                    } else {
                        "[clean]     "
                    },
                    status
                );
                for r in &a.readings {
                    let _ = writeln!(
                        s,
                        "         {}: max |err| {:.3e}{}",
                        r.symbol_map,
                        r.max_abs_err,
                        if r.matched { "" } else { " (no match)" }
                    );
                }
            }
        }
    }
    s
}

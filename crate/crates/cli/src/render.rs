//! Text and JSON payloads. The two modes carry the same numeric content;
//! rationals are rendered as `p/q` strings, infinities as `"inf"`/`"-inf"`,
//! and arbitrary-precision counts as decimal strings, so nothing is ever
//! coerced through floating point.

use jetlct_core::fp::{FpCountReport, LctEstimateReport};
use jetlct_core::jet::JetSystem;
use jetlct_core::jet_dim::{JetDimReport, JetLctCertificate};
use jetlct_core::newton::{LctCertificate, LctValue};
use jetlct_core::poly::render_polynomial;
use jetlct_core::theorems::{TrialConfig, Violation};
use serde_json::{json, Value};

pub fn jet_system_text(system: &JetSystem) -> String {
    let names = system.var_names();
    let mut out = String::new();
    for g in system.generators() {
        out.push_str(&render_polynomial(g, &names));
        out.push('\n');
    }
    out
}

pub fn jet_system_json(system: &JetSystem) -> Value {
    let names = system.var_names();
    json!({
        "ambient_dim": system.source().ambient_dim(),
        "level": system.level(),
        "convention": system.convention().to_string(),
        "variables": names,
        "generators": system
            .generators()
            .iter()
            .map(|g| render_polynomial(g, &names))
            .collect::<Vec<_>>(),
    })
}

pub fn lct_text(cert: &LctCertificate, jet: Option<&JetLctCertificate>) -> String {
    let mut out = format!(
        "lct = {}\nvertex = ({})\ntight generators = {:?}\n",
        cert.lct,
        cert.vertex
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", "),
        cert.tight_rows,
    );
    if let Some(jet) = jet {
        out.push_str(&format!(
            "jet cross-check: dim {} at level {} gives {}, bound verified to level {}\n",
            jet.dim_at_certificate, jet.certificate_level, jet.lct, jet.swept_to,
        ));
    }
    out
}

pub fn lct_json(cert: &LctCertificate, jet: Option<&JetLctCertificate>) -> Value {
    let mut value = json!({
        "lct": cert.lct.to_string(),
        "vertex": cert.vertex.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "tight_generators": cert.tight_rows,
    });
    if let Some(jet) = jet {
        value["via_jets"] = json!({
            "lct": jet.lct.to_string(),
            "certificate_level": jet.certificate_level,
            "dim_at_certificate": jet.dim_at_certificate,
            "bound_checked_to": jet.swept_to,
        });
    }
    value
}

fn dim_value(report: &JetDimReport) -> Value {
    match report.dim {
        Some(d) => json!(d),
        None => json!("-inf"),
    }
}

fn jet_dim_entry(report: &JetDimReport) -> Value {
    json!({
        "m": report.level,
        "dim": dim_value(report),
        "argmin": report.argmin,
        "normalized": report.normalized.as_ref().map(|r| r.to_string()),
    })
}

pub fn jet_dim_text(reports: &[JetDimReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let dim = r
            .dim
            .map(|d| d.to_string())
            .unwrap_or_else(|| "-inf".to_string());
        let normalized = r
            .normalized
            .as_ref()
            .map(|v| v.to_string())
            .unwrap_or_else(|| "-inf".to_string());
        let argmin = r
            .argmin
            .as_ref()
            .map(|a| format!("{a:?}"))
            .unwrap_or_else(|| "none".to_string());
        out.push_str(&format!(
            "m={} dim={} argmin={} normalized={}\n",
            r.level, dim, argmin, normalized
        ));
    }
    out
}

pub fn jet_dim_json(reports: &[JetDimReport], sweep: bool) -> Value {
    if sweep {
        json!({ "levels": reports.iter().map(jet_dim_entry).collect::<Vec<_>>() })
    } else {
        jet_dim_entry(&reports[0])
    }
}

fn count_report_json(report: &FpCountReport) -> Value {
    json!({
        "prime": report.prime,
        "fiber_origin": report.fiber_over_origin,
        "visited": report.visited,
        "levels": report
            .levels
            .iter()
            .map(|l| {
                json!({
                    "m": l.level,
                    "count": l.count.to_string(),
                    "est_dim": l.est_dim,
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn count_report_text(report: &FpCountReport) -> String {
    let mut out = String::new();
    for l in &report.levels {
        let est = l
            .est_dim
            .map(|d| d.to_string())
            .unwrap_or_else(|| "none".to_string());
        out.push_str(&format!(
            "p={} m={} count={} est_dim={}\n",
            report.prime, l.level, l.count, est
        ));
    }
    out
}

pub fn estimate_text(report: &LctEstimateReport) -> String {
    let mut out = String::new();
    for r in &report.reports {
        out.push_str(&count_report_text(r));
    }
    let best = report
        .best_level
        .map(|m| format!(" at level {m}"))
        .unwrap_or_default();
    out.push_str(&format!(
        "est_lct = {} (estimate{best}; levels swept to {}; disagreeing levels {:?})\n",
        report.est_lct, report.m_max, report.disagreeing_levels
    ));
    out
}

pub fn estimate_json(report: &LctEstimateReport) -> Value {
    json!({
        "ambient_dim": report.ambient_dim,
        "levels_requested": report.m_max,
        "fiber_origin": report.fiber_over_origin,
        "reports": report.reports.iter().map(count_report_json).collect::<Vec<_>>(),
        "agreeing_levels": report.agreeing_levels,
        "disagreeing_levels": report.disagreeing_levels,
        "est_lct": match &report.est_lct {
            LctValue::Finite(r) => json!(r.to_string()),
            LctValue::Infinite => json!("inf"),
        },
        "best_level": report.best_level,
    })
}

pub fn partial_count_text(report: &FpCountReport) -> String {
    let mut out = count_report_text(report);
    out.push_str(&format!(
        "budget exhausted after {} completed levels ({} candidates visited)\n",
        report.levels.len(),
        report.visited
    ));
    out
}

pub fn partial_count_json(report: &FpCountReport) -> Value {
    json!({
        "budget_exhausted": true,
        "partial": count_report_json(report),
    })
}

fn violation_json(v: &Violation) -> Value {
    json!({
        "property": v.property,
        "trial": v.trial,
        "seed": v.seed,
        "inputs": v.inputs,
        "relation": v.relation,
        "values": v.values,
    })
}

pub fn check_text(property: &str, cfg: &TrialConfig, violations: &[Violation]) -> String {
    let mut out = format!(
        "property={} seed={} trials={} violations={}\n",
        property,
        cfg.seed,
        cfg.trials,
        violations.len()
    );
    for v in violations {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn check_json(property: &str, cfg: &TrialConfig, violations: &[Violation]) -> Value {
    json!({
        "property": property,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "violations": violations.iter().map(violation_json).collect::<Vec<_>>(),
    })
}

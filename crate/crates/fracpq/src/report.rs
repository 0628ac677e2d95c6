//! Markdown summaries.

use std::fmt::Write;

use fracpq_core::verifiers::{
    BARRIER_Q_BOUNDED, BARRIER_SUPER, CACCIOPPOLI, SINGULAR_SCP, STRONG_COMPARISON, STRONG_MAX,
    WEAK_COMPARISON,
};

use crate::artifacts::passed_field;
use crate::config::Settings;
use crate::criteria::CriterionResult;
use crate::pipeline::{RunOutcome, MONOTONE_IN_EPS};

pub const RUN_REPORT: &str = "report.md";

/// The statement a check or fit is evidence for.
pub fn statement(name: &str) -> &'static str {
    let table: [(&str, &str); 11] = [
        (STRONG_MAX, "either u ≡ 0 or u > 0 in Ω"),
        (WEAK_COMPARISON, "f1 ≤ f2 implies u1 ≤ u2"),
        (STRONG_COMPARISON, "u > v in Ω, with (u - v)/d^s1 bounded below"),
        (BARRIER_SUPER, "(-Δ)_p^s1 w̄ ≥ C (d + κ^(1/α))^(α(p-1) - ps1) near ∂Ω"),
        (BARRIER_Q_BOUNDED, "(-Δ)_q^s2 d^s1 stays bounded near ∂Ω when s1 ≠ q's2"),
        (CACCIOPPOLI, "nonlocal Caccioppoli inequality for (u - k)±"),
        (SINGULAR_SCP, "inf_K (v - w) > 0 for ordered singular problems"),
        (MONOTONE_IN_EPS, "v_ε is nondecreasing as ε decreases"),
        ("regular", "η d^s1 ≤ u ≤ Γ d^σ for every σ < s1"),
        ("singular_strong", "v ~ d^((ps1 - γ)/(p - 1 + δ)) in the strongly singular case"),
        ("singular_mild", "v ~ d^s1 when γ - s1(1 - δ) ≤ 0"),
    ];
    table
        .iter()
        .find(|(k, _)| name.starts_with(k))
        .map(|(_, s)| *s)
        .unwrap_or("")
}

pub fn run_report(settings: &Settings, outcome: &RunOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} run\n", outcome.kind.as_str());
    let _ = writeln!(s, "- config hash: `{}`", settings.hash);
    let _ = writeln!(
        s,
        "- grid: Ω = ({}, {}), n = {}, h = {:e}",
        settings.grid.a(),
        settings.grid.b(),
        settings.grid.n(),
        settings.grid.spacing()
    );
    let p = &settings.params;
    let _ = writeln!(s, "- operator: p = {}, q = {}, s1 = {}, s2 = {}", p.p, p.q, p.s1, p.s2);
    let _ = writeln!(s, "- status: {}", if outcome.success() { "ok" } else { "failed" });
    let _ = writeln!(s, "- wall time: {:.3} s\n", outcome.wall_time);
    if !outcome.fits.is_empty() {
        let _ = writeln!(s, "## Boundary exponents\n");
        let _ = writeln!(s, "| kind | side | window | exponent | r² | statement |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for (kind, f) in &outcome.fits {
            let _ = writeln!(
                s,
                "| {kind} | {} | [{:.3e}, {:.3e}] | {:.4} | {:.4} | {} |",
                f.side.as_str(),
                f.window.d_lo,
                f.window.d_hi,
                f.exponent,
                f.r_squared,
                statement(kind)
            );
        }
        s.push('\n');
    }
    if !outcome.verdicts.is_empty() {
        let _ = writeln!(s, "## Checks\n");
        let _ = writeln!(s, "| check | passed | margin | statement | details |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for v in &outcome.verdicts {
            let _ = writeln!(
                s,
                "| {} | {} | {:.3e} | {} | {} |",
                v.name,
                passed_field(v.outcome),
                v.margin,
                statement(&v.name),
                v.details.replace('|', "/")
            );
        }
        s.push('\n');
    }
    if !outcome.notes.is_empty() {
        let _ = writeln!(s, "## Notes\n");
        for n in &outcome.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    s
}

pub fn criteria_report(results: &[CriterionResult]) -> String {
    let mut s = String::new();
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(s, "# Acceptance criteria\n");
    let _ = writeln!(s, "{passed} of {} pass.\n", results.len());
    let _ = writeln!(s, "| # | criterion | result | measured | target | statement | time |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    for r in results {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {:.1} s |",
            r.id,
            r.title,
            if r.passed { "pass" } else { "FAIL" },
            r.measured,
            r.target,
            r.statement,
            r.seconds
        );
    }
    let details: Vec<_> = results.iter().filter(|r| !r.detail.is_empty()).collect();
    if !details.is_empty() {
        let _ = writeln!(s, "\n## Details\n");
        for r in details {
            let _ = writeln!(s, "- {}: {}", r.id, r.detail);
        }
    }
    s
}

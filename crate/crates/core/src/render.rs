//! Text and JSON rendering of period tables and reports.

use std::fmt::Write;

use crate::modular::PeriodTable;
use crate::verifier::{ProofTrace, VerificationReport};

/// `k | r0, r1, ... | period`
pub fn render_table(t: &PeriodTable) -> String {
    let residues: Vec<String> = t.residues.iter().map(u64::to_string).collect();
    format!("{} | {} | {}", t.modulus, residues.join(", "), t.period)
}

pub fn render_trace(trace: &ProofTrace) -> String {
    let mut out = String::new();
    for (i, s) in trace.steps.iter().enumerate() {
        let mark = if s.matched { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  {mark} {:>2}. {}", i + 1, s.description);
        let _ = writeln!(out, "         computed {}", s.computed);
        if !s.matched {
            let _ = writeln!(out, "         expected {}", s.expected);
        }
    }
    out
}

pub fn render_report(r: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}: {:?}", r.claim_id, r.status);
    if !r.params.is_empty() {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  params: {}", params.join(" "));
    }
    for w in &r.witnesses {
        let idx: Vec<String> = w.index.iter().map(u64::to_string).collect();
        let flag = if w.violation { " !" } else { "" };
        let _ = writeln!(out, "  witness ({}) {}  {}{flag}", idx.join(","), w.value, w.note);
    }
    if !r.unresolved.is_empty() {
        let idx: Vec<String> = r.unresolved.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "  unresolved: {}", idx.join(", "));
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    if let Some(t) = &r.trace {
        let _ = writeln!(out, "  trace ({}):", if t.passes() { "passes" } else { "fails" });
        out.push_str(&render_trace(t));
    }
    let _ = writeln!(
        out,
        "  elapsed {:.3}s, budget {}s",
        r.meta.elapsed.as_secs_f64(),
        r.meta.budget.as_secs_f64()
    );
    out
}

pub fn to_json(r: &VerificationReport) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize")
}

pub fn from_json(s: &str) -> Result<VerificationReport, serde_json::Error> {
    serde_json::from_str(s)
}

//! Text, JSON and DOT renderings of command results.

use chorreal_core::checkers::{RealisabilityVerdict, SubtypeVerdict, Witness};
use chorreal_core::complement::ComplementReport;
use chorreal_core::global::{
    is_commutation_closed, is_commutation_deterministic, is_sender_driven, CfsmSystem, GlobalType,
};
use chorreal_core::models::CommModel;
use chorreal_core::msc::Arrow;
use chorreal_core::oracle::ExplorationReport;
use serde::Serialize;
use serde_json::json;
use std::fmt::Write;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn global_type(g: &GlobalType, format: Format) -> String {
    match format {
        Format::Json => to_json(&g.to_json()),
        Format::Dot => g.dfa().to_dot("global"),
        Format::Text => {
            let d = g.dfa();
            let mut s = String::new();
            let _ = writeln!(s, "processes: {}", join(g.processes(), ", "));
            let _ = writeln!(
                s,
                "states: {} (initial {}, accepting {})",
                d.num_states(),
                d.initial(),
                join(d.accepting_states(), " ")
            );
            for (from, label, to) in d.transitions() {
                let _ = writeln!(s, "  {from} --{label}--> {to}");
            }
            let _ = writeln!(s, "sender-driven: {}", is_sender_driven(g));
            let _ = writeln!(s, "commutation-closed: {}", is_commutation_closed(g));
            let _ = writeln!(s, "commutation-deterministic: {}", is_commutation_deterministic(g));
            s
        }
    }
}

pub fn system(sys: &CfsmSystem, format: Format) -> String {
    match format {
        Format::Json => sys.to_json_string() + "\n",
        Format::Dot => sys.to_dot(),
        Format::Text => {
            let mut s = String::new();
            for m in sys.machines() {
                let a = m.nfa();
                let _ = writeln!(
                    s,
                    "{}: {} states (initial {}, accepting {})",
                    m.process(),
                    a.num_states(),
                    a.initial(),
                    join(a.accepting_states(), " ")
                );
                for (from, label, to) in a.transitions() {
                    let label = label.map_or_else(|| "ε".to_string(), ToString::to_string);
                    let _ = writeln!(s, "  {from} --{label}--> {to}");
                }
            }
            s
        }
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Execution(e) => e.to_string(),
        Witness::Arrows(a) => join(a, " "),
        Witness::Msc(m) => serde_json::to_string(m).expect("serialisable"),
    }
}

pub fn realisability(v: &RealisabilityVerdict, model: CommModel, json: bool) -> String {
    if json {
        return to_json(&json!({ "model": model.name(), "verdict": v }));
    }
    let mut s = match (&v.failed_condition, &v.witness) {
        (Some(c), Some(w)) => format!("not realisable in {model}: {c:?} fails\nwitness: {}\n", witness_text(w)),
        _ => format!("realisable in {model}\n"),
    };
    if v.bounded {
        s.push_str("note: bounded checks contributed to this verdict\n");
    }
    if v.truncated {
        s.push_str("note: some exploration hit its bound; the verdict is inconclusive\n");
    }
    s
}

pub fn subtype(v: &SubtypeVerdict, json: bool) -> String {
    if json {
        return to_json(v);
    }
    match &v.witness {
        None => "subtype\n".into(),
        Some(w) => format!("not a subtype\nwitness: {}\n", words(w)),
    }
}

fn words(w: &[Arrow]) -> String {
    if w.is_empty() {
        "(empty)".into()
    } else {
        join(w, " ")
    }
}

pub fn complement_report(r: &ComplementReport, json: bool) -> String {
    if json {
        return to_json(r);
    }
    match &r.counterexample {
        None => format!(
            "complement verified on {} MSCs with at most {} arrows\n",
            r.checked, r.max_arrows
        ),
        Some(c) => format!(
            "not a complement: {} is in the type: {}, in the complement: {}\n",
            words(&c.word),
            c.in_type,
            c.in_complement
        ),
    }
}

pub fn exploration(r: &ExplorationReport, json: bool) -> String {
    if json {
        return to_json(r);
    }
    let mut s = format!(
        "{} accepted executions, {} deadlocks, {} orphan executions{}\n",
        r.executions.len(),
        r.deadlocks.len(),
        r.orphans.len(),
        if r.truncated { " (bound reached)" } else { "" }
    );
    for d in &r.deadlocks {
        let _ = writeln!(s, "deadlock: {}", d.trace);
    }
    for o in &r.orphans {
        let _ = writeln!(s, "orphans: {o}");
    }
    s
}

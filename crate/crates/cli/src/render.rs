use std::fmt::Write as _;

use crate::run::{Envelope, Item, Status};
use crate::Format;

pub fn render(format: Format, env: &Envelope<'_>, items: &[Item]) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Table => table(env, items),
        Format::Csv => csv_rows(env, items),
    }
}

pub fn matrix(rows: &[Vec<String>]) -> String {
    rows.iter().map(|row| row.join(" ")).collect::<Vec<_>>().join("; ")
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
        Status::Computed => "OK",
    }
}

fn table(env: &Envelope<'_>, items: &[Item]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}  p={}  T={}  config {}",
        env.command,
        env.config.p,
        env.config.truncation,
        &env.config_hash[..12]
    );
    for item in items {
        match item {
            Item::Zeta(r) => {
                let _ = write!(s, "{r}");
                if !s.ends_with('\n') {
                    s.push('\n');
                }
            }
            Item::Check(r) => {
                let mark = if r.ok { "ok" } else { "FAILED" };
                let _ = writeln!(s, "{}: {}/{} {mark}", r.name, r.passed, r.samples);
                for f in &r.failures {
                    let _ = writeln!(s, "  {f}");
                }
            }
            Item::Propagation(r) => {
                let _ = writeln!(s, "g = [{}]  α' = ({})", matrix(&r.g), r.alpha.join(", "));
                let _ = writeln!(s, "  lhs = {}", r.lhs);
                let _ = writeln!(s, "  rhs = {}  (k = {}..={})", r.rhs_partial, r.k_min, r.k_max);
                let _ = writeln!(
                    s,
                    "  tail ≤ {}  bound {}  gap ≤ {}  {:?}",
                    r.tail_majorant, r.tail_bound, r.gap, r.status
                );
            }
            Item::Series { label, coeffs } => {
                let _ = writeln!(s, "{label}");
                for (k, c) in coeffs.iter().enumerate() {
                    let _ = writeln!(s, "  X^{k}: {c}");
                }
            }
            Item::Value { label, text, .. } => {
                let _ = writeln!(s, "{label} = {text}");
            }
        }
    }
    if let Some(ms) = env.runtime_ms {
        let _ = writeln!(s, "runtime {ms} ms");
    }
    let _ = writeln!(s, "{}", status_word(env.status));
    s
}

/// One row per coefficient or sample group: `kind,label,index,lhs,rhs,ok`.
fn csv_rows(env: &Envelope<'_>, items: &[Item]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |fields: [&str; 6]| w.write_record(fields).expect("in-memory csv write");
    row(["kind", "label", "index", "lhs", "rhs", "ok"]);
    for item in items {
        match item {
            Item::Zeta(r) => {
                let label = format!("{} {}", r.datum, r.phi);
                for (k, (l, rr)) in r.lhs_text.iter().zip(&r.rhs_text).enumerate() {
                    let ok = !r.diff.contains(&k);
                    row(["zeta", &label, &k.to_string(), l, rr, &ok.to_string()]);
                }
            }
            Item::Check(r) => {
                let frac = format!("{}/{}", r.passed, r.samples);
                row(["check", &r.name, "", &frac, "", &r.ok.to_string()]);
            }
            Item::Propagation(r) => {
                let ok = r.passed().to_string();
                row(["propagation", &matrix(&r.g), &r.k_max.to_string(), &r.lhs, &r.rhs_partial, &ok]);
            }
            Item::Series { label, coeffs } => {
                for (k, c) in coeffs.iter().enumerate() {
                    row(["series", label, &k.to_string(), &c.to_string(), "", ""]);
                }
            }
            Item::Value { label, text, .. } => row(["value", label, "", text, "", ""]),
        }
    }
    row(["status", &env.command, "", "", "", status_word(env.status)]);
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

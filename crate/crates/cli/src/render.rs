//! Human-readable and JSON renderings of verdicts and solution lists.

use std::fmt::Write as _;

use serde_json::{json, Value};

use imagclass::diophantine::DioSolution;
use imagclass::theorem::{ConditionReport, SignMode, Verdict};

use crate::jsonnum::to_number;

fn condition_line(name: &str, r: &ConditionReport) -> String {
    if r.holds {
        return format!("condition {name}: holds");
    }
    let mut parts: Vec<String> = r
        .witnesses
        .iter()
        .map(|w| format!("b={} l={} sign {}", w.b, w.ell, w.sign.symbol()))
        .collect();
    if r.d_is_three {
        parts.push("d = 3".into());
    }
    format!("condition {name}: fails ({})", parts.join("; "))
}

pub fn verdict_text(v: &Verdict) -> String {
    let p = &v.params;
    let mut s = String::new();
    let _ = writeln!(s, "a = {}, p = {}, n = {}", p.a, p.p, p.n);
    let _ = writeln!(s, "a^2 - 4p^n = {} = -({}^2 * {})", p.signed_value(), p.c, p.d);
    let _ = writeln!(s, "d = {}, discriminant {}", p.d, p.delta);
    let _ = writeln!(s, "{}", condition_line("(i)", &v.cond_i));
    let mode = match v.cond_ii.sign_mode {
        SignMode::BothSigns => "both signs",
        SignMode::PlusOnly => "plus sign only",
    };
    let _ = writeln!(s, "{} [{mode}]", condition_line("(ii)", &v.cond_ii));
    let _ = writeln!(s, "exceptional: {}", if v.exceptional { "yes" } else { "no" });
    let _ = writeln!(s, "order of the class above p: {}", v.order_of_class);
    if let Some(h) = v.class_number {
        let div = if v.n_divides_h == Some(true) {
            "divisible"
        } else {
            "not divisible"
        };
        let _ = writeln!(s, "class number: {h} ({div} by n)");
    }
    let status = if v.subgroup_verified {
        "verified".to_string()
    } else if v.violates_theorem() {
        "VIOLATION: hypotheses hold but the order is not n".to_string()
    } else if v.exceptional {
        "absent (exceptional triple)".to_string()
    } else {
        "absent (hypotheses fail)".to_string()
    };
    let _ = writeln!(s, "cyclic subgroup of order {}: {status}", p.n);
    s
}

fn condition_json(r: &ConditionReport) -> Value {
    json!({
        "holds": r.holds,
        "sign_mode": match r.sign_mode {
            SignMode::BothSigns => "both",
            SignMode::PlusOnly => "plus",
        },
        "d_is_three": r.d_is_three,
        "witnesses": r.witnesses.iter().map(|w| json!({
            "b": to_number(&w.b),
            "ell": w.ell,
            "sign": w.sign.symbol().to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(v: &Verdict) -> Value {
    let p = &v.params;
    json!({
        "a": to_number(&p.a),
        "p": to_number(&p.p),
        "n": p.n,
        "a2_minus_4pn": to_number(&p.signed_value()),
        "c": to_number(&p.c),
        "d": to_number(&p.d),
        "discriminant": to_number(&p.delta),
        "exceptional": v.exceptional,
        "cond_i": condition_json(&v.cond_i),
        "cond_ii": condition_json(&v.cond_ii),
        "hypotheses_hold": v.hypotheses_hold(),
        "order": v.order_of_class,
        "class_number": v.class_number,
        "subgroup_verified": v.subgroup_verified,
        "n_divides_h": v.n_divides_h,
        "violation": v.violates_theorem(),
    })
}

pub fn solution_text(s: &DioSolution) -> String {
    let i = &s.instance;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} x^2 + {} = {} * {}^y, 1 <= y <= {}",
        i.d1(),
        i.d2(),
        i.lambda_sq(),
        i.p(),
        s.y_bound
    );
    if s.solutions.is_empty() {
        let _ = writeln!(out, "no solutions within the bound");
    }
    for (x, y) in &s.solutions {
        let _ = writeln!(out, "(x, y) = ({x}, {y})");
    }
    let tags: Vec<&str> = s.classification.iter().map(|t| t.name()).collect();
    let tags = if tags.is_empty() {
        "none".to_string()
    } else {
        tags.join(", ")
    };
    let _ = writeln!(out, "tags: {tags}");
    out
}

pub fn solution_json(s: &DioSolution) -> Value {
    let i = &s.instance;
    json!({
        "d1": to_number(i.d1()),
        "d2": to_number(i.d2()),
        "lambda_sq": i.lambda_sq(),
        "p": to_number(i.p()),
        "y_bound": s.y_bound,
        "solutions": s.solutions.iter().map(|(x, y)| json!({"x": to_number(x), "y": y})).collect::<Vec<_>>(),
        "tags": s.classification.iter().map(|t| t.name()).collect::<Vec<_>>(),
    })
}

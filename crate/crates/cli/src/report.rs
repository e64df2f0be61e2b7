use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use setfusion::solvers::{ComplexityResult, SearchBudget, Status, Witness};

/// One run of the tool: what was asked, under which budget, and what came out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub budget: BudgetEcho,
    pub results: Vec<Value>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetEcho {
    pub depth: usize,
    pub states: u64,
    pub seconds: f64,
}

impl From<&SearchBudget> for BudgetEcho {
    fn from(b: &SearchBudget) -> Self {
        Self {
            depth: b.max_depth,
            states: b.max_states,
            seconds: b.max_time.as_secs_f64(),
        }
    }
}

pub fn result_value(r: &ComplexityResult, verified: Option<bool>) -> Value {
    let mut m = Map::new();
    m.insert("measure".into(), r.measure.tag().into());
    m.insert("status".into(), r.status.to_string().into());
    m.insert("value".into(), r.value.into());
    if let Some(v) = verified {
        m.insert("verified".into(), v.into());
    }
    match &r.witness {
        Witness::NotFinite(w) => {
            m.insert("finiteness".into(), format!("{w:?}").into());
        }
        w => {
            if let Some(Ok(text)) = w.certificate() {
                m.insert("certificate".into(), text.into());
            }
        }
    }
    m.insert(
        "spent".into(),
        json!({
            "states": r.spent.states,
            "elapsed_ms": r.spent.elapsed.as_millis() as u64,
            "depth": r.spent.depth,
        }),
    );
    Value::Object(m)
}

pub fn needs_more_budget(r: &ComplexityResult) -> bool {
    matches!(r.status, Status::BudgetExhausted | Status::LowerBoundOnly)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_short(v: &Value) -> bool {
    match v {
        Value::String(s) => !s.contains('\n'),
        Value::Object(_) | Value::Array(_) => false,
        _ => true,
    }
}

fn render_value(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::String(s) if s.contains('\n') => {
            writeln!(out, "{pad}{key}").unwrap();
            for line in s.lines() {
                writeln!(out, "{pad}  | {line}").unwrap();
            }
        }
        Value::Object(m) if m.values().all(is_short) => {
            let inline: Vec<String> = m.iter().map(|(k, x)| format!("{k}: {}", scalar(x))).collect();
            writeln!(out, "{pad}{key:<13} {}", inline.join(", ")).unwrap();
        }
        Value::Object(m) => {
            writeln!(out, "{pad}{key}").unwrap();
            for (k, x) in m {
                render_value(out, k, x, indent + 2);
            }
        }
        Value::Array(items) if items.iter().all(is_short) => {
            let inline: Vec<String> = items.iter().map(scalar).collect();
            writeln!(out, "{pad}{key:<13} {}", inline.join(", ")).unwrap();
        }
        Value::Array(items) => {
            writeln!(out, "{pad}{key}").unwrap();
            for (i, x) in items.iter().enumerate() {
                render_value(out, &format!("[{}]", i + 1), x, indent + 2);
            }
        }
        other => writeln!(out, "{pad}{key:<13} {}", scalar(other)).unwrap(),
    }
}

impl Report {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Table rendering of the machine document.
    pub fn to_human(&self) -> String {
        let doc = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        writeln!(out, "$ {}", self.command.join(" ")).unwrap();
        render_value(&mut out, "budget", &doc["budget"], 0);
        for (i, r) in self.results.iter().enumerate() {
            render_value(&mut out, &format!("result {}", i + 1), r, 0);
        }
        writeln!(out, "elapsed       {} ms", self.elapsed_ms).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            command: vec!["setfusion".into(), "bounds".into()],
            budget: BudgetEcho {
                depth: 3,
                states: 100_000_000,
                seconds: 300.0,
            },
            results: vec![json!({"kind": "counting", "value": 2, "certificate": "a\nb\n"})],
            elapsed_ms: 4,
        }
    }

    #[test]
    fn machine_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_machine()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn human_lists_every_field() {
        let text = sample().to_human();
        assert!(text.contains("kind          counting"));
        assert!(text.contains("  | b"));
        assert!(text.contains("depth: 3, states: 100000000"));
    }
}

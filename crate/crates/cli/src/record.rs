//! One output record per command: what was asked, what came back, and which
//! route produced it.

use serde_json::{Map, Value};

pub struct Record {
    command: String,
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
    path: Option<String>,
}

impl Record {
    pub fn new(command: &str) -> Self {
        Record { command: command.to_string(), inputs: Map::new(), outputs: Map::new(), path: None }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }

    /// An exact value is written as its text form next to the float.
    pub fn number(&mut self, key: &str, exact: Option<String>, value: f64) {
        if let Some(e) = exact {
            self.output(&format!("{key}_exact"), e);
        }
        self.output(key, float(value));
    }

    pub fn path(&mut self, p: &str) {
        self.path = Some(p.to_string());
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.clone().into());
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("outputs".into(), Value::Object(self.outputs.clone()));
        if let Some(p) = &self.path {
            m.insert("path".into(), p.clone().into());
        }
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.outputs {
            out.push_str(&format!("{k}: {}\n", plain(v)));
        }
        if let Some(p) = &self.path {
            out.push_str(&format!("path={p}\n"));
        }
        out
    }
}

/// NaN and infinities are not JSON numbers.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

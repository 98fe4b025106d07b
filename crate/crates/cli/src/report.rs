//! Deterministic report assembly.
//!
//! Reports are JSON objects with insertion-ordered fields and every float
//! serialized at a fixed 15 significant digits, so re-running a command on
//! the same inputs yields byte-identical output. The CSV rendering flattens
//! scalar blocks into `# key=value` comment lines and tabular blocks into
//! sections.

use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// Fixed-precision float formatting: 15 significant digits, exponent form.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        // reports never contain non-finite values on valid paths
        return "null".to_owned();
    }
    format!("{x:.14e}")
}

/// A float as a JSON number with the fixed 15-significant-digit rendering.
pub fn jnum(x: f64) -> Value {
    let s = fmt_f64(x);
    if s == "null" {
        Value::Null
    } else {
        Value::Number(Number::from_string_unchecked(s))
    }
}

pub fn jobj(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_owned(), v);
    }
    Value::Object(m)
}

#[derive(Debug, Clone)]
pub struct Report {
    root: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config_echo: Value) -> Self {
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert("command".into(), Value::String(command.to_owned()));
        root.insert("config".into(), config_echo);
        Report { root }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.root.insert(key.to_owned(), value);
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.root.clone()))
            .expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    /// CSV rendering: scalars become `# path=value` lines, arrays of objects
    /// become header+row sections introduced by `# block=<path>`.
    pub fn to_csv_string(&self) -> String {
        let mut comments = Vec::new();
        let mut tables = Vec::new();
        for (key, value) in &self.root {
            flatten(key, value, &mut comments, &mut tables);
        }
        let mut out = String::new();
        for line in comments {
            out.push_str(&line);
            out.push('\n');
        }
        for (path, rows) in tables {
            out.push_str(&format!("# block={path}\n"));
            out.push_str(&rows);
        }
        out
    }
}

fn scalar_to_string(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => unreachable!("scalar expected"),
    }
}

fn is_scalar(v: &Value) -> bool {
    matches!(
        v,
        Value::Null | Value::Bool(_) | Value::Number(_) | Value::String(_)
    )
}

fn flatten(path: &str, value: &Value, comments: &mut Vec<String>, tables: &mut Vec<(String, String)>) {
    match value {
        v if is_scalar(v) => comments.push(format!("# {path}={}", scalar_to_string(v))),
        Value::Array(items) => {
            if items.iter().all(is_scalar) {
                let joined: Vec<String> = items.iter().map(scalar_to_string).collect();
                comments.push(format!("# {path}={}", joined.join(";")));
            } else {
                tables.push((path.to_owned(), array_to_csv(items)));
            }
        }
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{path}.{k}"), v, comments, tables);
            }
        }
        _ => unreachable!(),
    }
}

fn array_to_csv(items: &[Value]) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    if let Some(Value::Object(first)) = items.first() {
        let headers: Vec<&String> = first.keys().collect();
        writer
            .write_record(headers.iter().map(|h| h.as_str()))
            .expect("in-memory csv");
        for item in items {
            if let Value::Object(m) = item {
                let row: Vec<String> = headers
                    .iter()
                    .map(|h| m.get(*h).map(scalar_to_string).unwrap_or_default())
                    .collect();
                writer.write_record(&row).expect("in-memory csv");
            }
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf-8")
}

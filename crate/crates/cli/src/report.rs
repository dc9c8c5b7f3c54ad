//! Report assembly: every command emits one JSON object (or a
//! flattened CSV table) with the fixed key set
//! `{command, inputs, result, enclosures, warnings, timing_ms}`.

use serde_json::{json, Map, Value};
use siegel_core::scalar::RealScalar;

pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    result: Value,
    enclosures: Map<String, Value>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            result: Value::Null,
            enclosures: Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn set_result(&mut self, value: Value) {
        self.result = value;
    }

    /// Registers a named enclosure; numeric outputs carry their widths.
    pub fn enclosure(&mut self, key: &str, s: &RealScalar) {
        self.enclosures
            .insert(key.to_string(), scalar_enclosure(s));
    }

    pub fn finish(self, timing_ms: f64) -> Value {
        json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs),
            "result": self.result,
            "enclosures": Value::Object(self.enclosures),
            "warnings": self.warnings,
            "timing_ms": timing_ms,
        })
    }
}

/// Decimal digits used when rendering enclosure endpoints. Endpoints
/// are rounded outward, so the printed interval still contains the
/// value.
const ENDPOINT_DIGITS: u32 = 40;

pub fn scalar_enclosure(s: &RealScalar) -> Value {
    json!({
        "lo": s.lo().to_decimal_string(ENDPOINT_DIGITS, siegel_core::dyadic::Dir::Down),
        "hi": s.hi().to_decimal_string(ENDPOINT_DIGITS, siegel_core::dyadic::Dir::Up),
        "mid": s.to_f64(),
        "width": s.width().to_f64(),
        "precision_bits": s.precision_bits(),
    })
}

/// Flattens the report into `path,value` CSV rows.
pub fn to_csv(v: &Value) -> String {
    let mut rows = vec![("key".to_string(), "value".to_string())];
    flatten("", v, &mut rows);
    rows.iter()
        .map(|(k, val)| format!("{},{}", csv_quote(k), csv_quote(val)))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&p, val, rows);
            }
        }
        Value::Array(a) => {
            for (i, val) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), val, rows);
            }
        }
        other => {
            let s = match other {
                Value::String(s) => s.clone(),
                x => x.to_string(),
            };
            rows.push((prefix.to_string(), s));
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

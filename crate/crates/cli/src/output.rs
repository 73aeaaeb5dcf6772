//! CSV and JSON artifact writers. Both echo the resolved configuration and
//! the library version so that identical runs give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use shiryaev_qsd::VERSION;

/// A number with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => num(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

/// Table with `# key: value` comment lines for the config, one header row
/// and LF line endings.
pub fn csv<C: Serialize>(
    command: &str,
    config: &C,
    header: &[&str],
    rows: &[Vec<String>],
) -> String {
    let mut out = String::new();
    writeln!(out, "# shiryaev-qsd {VERSION}").unwrap();
    writeln!(out, "# command: {command}").unwrap();
    if let Value::Object(map) = serde_json::to_value(config).expect("config serializes") {
        for (k, v) in &map {
            writeln!(out, "# {k}: {}", scalar(v)).unwrap();
        }
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// `{"version", "command", "config", <key>: result}` pretty-printed with a
/// trailing newline.
pub fn json<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    key: &str,
    result: &R,
) -> String {
    let mut map = Map::new();
    map.insert("version".into(), Value::from(VERSION));
    map.insert("command".into(), Value::from(command));
    map.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    map.insert(
        key.into(),
        serde_json::to_value(result).expect("result serializes"),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
    s.push('\n');
    s
}

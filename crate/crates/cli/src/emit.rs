//! Report emission: JSON with floats rounded to 12 significant digits and
//! rationals as `p/q` strings, CSV with a `#`-prefixed configuration header.
//! Field ordering is stable (struct order / insertion order).

use itercode::rat::sig12;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

/// Round every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    if let Some(rounded) = serde_json::Number::from_f64(sig12(f)) {
                        *v = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json_string<T: serde::Serialize>(value: &T) -> Result<String, String> {
    let mut v = serde_json::to_value(value).map_err(|e| e.to_string())?;
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).map_err(|e| e.to_string())
}

/// Write to the path, or stdout when none; errors carry the path context.
pub fn write_output(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| {
                    if content.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| format!("cannot write stdout: {e}"))
        }
    }
}

pub fn fmt_float(x: f64) -> String {
    format!("{}", sig12(x))
}

/// CSV with `# key=value` configuration lines before the header row.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(config_lines: &[String], header: &str) -> Csv {
        let mut lines: Vec<String> = config_lines.iter().map(|l| format!("# {l}")).collect();
        lines.push(header.to_string());
        Csv { lines }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

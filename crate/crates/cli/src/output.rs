//! Report rendering.

use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

pub fn render(report: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"])
                .map_err(|e| CliError::Io(e.to_string()))?;
            for (k, v) in rows {
                w.write_record([k, v])
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Nested objects become dotted keys; arrays of scalars are joined with `;`.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join(";")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_nested_values() {
        let v = json!({"a": 1, "b": {"c": [1.5, 2], "d": null}, "e": "x,y"});
        let s = render(&v, Format::Csv).unwrap();
        assert_eq!(s, "key,value\na,1\nb.c,1.5;2\nb.d,\ne,\"x,y\"\n");
    }

    #[test]
    fn json_ends_with_newline() {
        let s = render(&json!({"a": 1}), Format::Json).unwrap();
        assert!(s.ends_with("}\n"));
    }
}

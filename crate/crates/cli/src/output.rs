//! JSON and CSV emission.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        // [re, im]
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            out.push((key("re"), a[0].to_string()));
            out.push((key("im"), a[1].to_string()));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// One CSV row per record, columns in order of first appearance.
pub fn to_csv(records: &[Value]) -> anyhow::Result<String> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for r in &rows {
        for (k, _) in r {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in &rows {
        w.write_record(header.iter().map(|h| r.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str())))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes `value` as pretty JSON, or as CSV rows of `rows` (defaults to
/// the value itself, an array giving one row per element).
pub fn emit<T: Serialize>(format: Format, value: &T, rows: Option<Vec<Value>>) -> anyhow::Result<()> {
    let v = serde_json::to_value(value)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&v)? + "\n",
        Format::Csv => {
            let rows = rows.unwrap_or_else(|| match v {
                Value::Array(a) => a,
                other => vec![other],
            });
            to_csv(&rows)?
        }
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_pairs_split() {
        let v = serde_json::json!({"value": [1.0, -2.0], "n": 3, "tag": "x"});
        let csv = to_csv(&[v]).unwrap();
        assert_eq!(csv, "n,tag,value.re,value.im\n3,x,1.0,-2.0\n");
    }

    #[test]
    fn union_of_columns() {
        let a = serde_json::json!({"a": 1});
        let b = serde_json::json!({"b": 2});
        assert_eq!(to_csv(&[a, b]).unwrap(), "a,b\n1,\n,2\n");
    }
}

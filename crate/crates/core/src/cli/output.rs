use serde_json::Value;

use super::config::Format;
use crate::error::{Error, Result};

/// Serializes a report document. JSON is pretty-printed with keys in
/// sorted order and floats in shortest round-trip form.
pub fn render(doc: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc)
                .map_err(|e| Error::Data(format!("cannot serialize report: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let rows = match doc.get("records").and_then(Value::as_array) {
                Some(records) => records.iter().map(flatten).collect(),
                None => vec![flatten(doc)],
            };
            write_csv(&rows)
        }
    }
}

/// Scalars keyed by dotted paths. Arrays of scalars become `key.0`,
/// `key.1`, ...; arrays holding arrays or objects are left out.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                walk(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                for (i, x) in items.iter().enumerate() {
                    walk(&join(&i.to_string()), x, out);
                }
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn write_csv(rows: &[Vec<(String, String)>]) -> Result<String> {
    let mut header: Vec<&str> = Vec::new();
    for row in rows {
        for (k, _) in row {
            if !header.contains(&k.as_str()) {
                header.push(k);
            }
        }
    }
    let err = |e: csv::Error| Error::Data(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(&header).map_err(err)?;
    }
    for row in rows {
        let cells = header.iter().map(|h| {
            row.iter()
                .find(|(k, _)| k == h)
                .map_or("", |(_, v)| v.as_str())
        });
        w.write_record(cells).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(format!("cannot write CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let v = json!({"a": 1.5, "b": {"c": [1, 2]}, "m": [[1.0]], "s": "x", "z": null});
        let f = flatten(&v);
        let keys: Vec<_> = f.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a", "b.c.0", "b.c.1", "s", "z"]);
        let csv = render(&v, Format::Csv).unwrap();
        assert_eq!(csv, "a,b.c.0,b.c.1,s,z\n1.5,1,2,x,\n");
    }

    #[test]
    fn records_become_rows() {
        let v = json!({"records": [{"p": 1, "q": 2}, {"p": 3}]});
        assert_eq!(render(&v, Format::Csv).unwrap(), "p,q\n1,2\n3,\n");
        assert_eq!(render(&json!({"records": []}), Format::Csv).unwrap(), "");
    }

    #[test]
    fn floats_round_trip() {
        let x: f64 = 0.1 + 0.2;
        let s = render(&json!({ "x": x }), Format::Json).unwrap();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap().to_bits(), x.to_bits());
    }
}

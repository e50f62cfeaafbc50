use serde_json::Value;

/// Indented rendering of a report tree; polynomials print as their text.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.contains_key("terms") && m.contains_key("text") => m["text"].as_str().map(str::to_string),
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::Number(_) | Value::String(_))) => {
            Some(format!("[{}]", items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(m) if m.len() <= 4 && m.values().all(|c| matches!(c, Value::Number(_) | Value::String(_) | Value::Bool(_))) => {
            let parts: Vec<String> = m.iter().map(|(k, c)| format!("{k}={}", scalar(c).unwrap_or_default())).collect();
            Some(format!("{{{}}}", parts.join(", ")))
        }
        _ => None,
    }
}

fn walk(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                match scalar(child) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        walk(child, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                match scalar(child) {
                    Some(s) => out.push_str(&format!("{pad}[{i}] {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        walk(child, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

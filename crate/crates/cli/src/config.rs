//! Defaults from a JSON config file, merged into argv before parsing.

use std::fs;

use serde_json::Value;

/// Appends `--key value` for every config entry whose flag is absent from
/// `argv`, so flags given on the command line win. Keys use the flag names
/// with `_` or `-`.
pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = find_config(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path} is not valid JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path} must hold a JSON object"));
    };
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || argv.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(scalar).collect::<Result<_, _>>()?;
                argv.push(format!("{flag}={}", joined.join(",")));
            }
            other => argv.push(format!("{flag}={}", scalar(&other)?)),
        }
    }
    Ok(argv)
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(format!("unsupported config value {other}")),
    }
}

fn find_config(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

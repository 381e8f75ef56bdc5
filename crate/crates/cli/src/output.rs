//! Deterministic numeric output: every float is rounded to 12 significant
//! digits before it is written, in JSON and CSV alike.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Rounds to 12 significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let rounded = round_value(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&rounded)? + "\n")
}

/// CSV with a header row; float fields are rounded.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for (i, row) in rows.iter().enumerate() {
        // route through JSON values so rounding matches the JSON output exactly
        let Value::Object(map) = round_value(serde_json::to_value(row)?) else {
            return Err(CliError::Usage("CSV rows must be flat records".into()));
        };
        if i == 0 {
            writer.write_record(map.keys())?;
        }
        writer.write_record(map.values().map(csv_field))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes `text` to the output file when given, otherwise to `stdout`.
pub fn emit(
    text: &str,
    output: Option<&std::path::Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(2.0 / 3.0e-7), 6666666.66667);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.0), 1.0);
    }

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        x: f64,
        n: usize,
        missing: Option<f64>,
    }

    #[test]
    fn csv_and_json_agree() {
        let rows = [Row {
            name: "a",
            x: 1.0 / 3.0,
            n: 2,
            missing: None,
        }];
        let csv = to_csv(&rows).unwrap();
        assert_eq!(csv, "name,x,n,missing\na,0.333333333333,2,\n");
        let json: Value = serde_json::from_str(&to_json(&rows).unwrap()).unwrap();
        assert_eq!(json[0]["x"].as_f64().unwrap(), 0.333333333333);
    }
}

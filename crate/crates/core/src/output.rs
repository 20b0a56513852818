//! Deterministic serialization: floats are rounded to 12 significant digits
//! and printed in shortest round-trip form, JSON keeps struct field order.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Rounded value in shortest round-trip form (exponent notation for very
/// small or large magnitudes, matching the JSON encoder).
pub fn fmt_float(x: f64) -> String {
    format!("{:?}", round_sig(x))
}

fn round_value(value: &mut Value) {
    match value {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            *value = serde_json::Number::from_f64(round_sig(x))
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut tree = serde_json::to_value(value).expect("serializable value");
    round_value(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree).expect("json encoding");
    text.push('\n');
    text
}

/// Header plus rows of already-formatted cells.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory csv");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("flush csv")).expect("utf-8 csv")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar describing how a results file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Map<String, Value>,
    pub artifact_version: String,
    pub duration_seconds: f64,
    pub results_path: String,
    pub results_sha256: String,
}

impl RunManifest {
    pub fn sidecar_path(results: &Path) -> PathBuf {
        let mut name = results.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(fmt_float(0.999_833_053_425_699_3), "0.999833053426");
        assert_eq!(fmt_float(1214.3), "1214.3");
        assert_eq!(fmt_float(-0.0), "0.0");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(6.123_233_995_736_766e-17), "6.12323399574e-17");
    }

    #[test]
    fn json_keeps_field_order() {
        #[derive(Serialize)]
        struct Row {
            zeta: f64,
            alpha: usize,
        }
        let text = to_json(&Row {
            zeta: 2.0_f64.sqrt(),
            alpha: 3,
        });
        assert_eq!(text, "{\n  \"zeta\": 1.41421356237,\n  \"alpha\": 3\n}\n");
    }

    #[test]
    fn csv_round_trip() {
        let mut table = CsvTable::new(&["a", "b"]);
        table.push(vec!["1".into(), fmt_float(0.5)]);
        assert_eq!(table.to_csv(), "a,b\n1,0.5\n");
    }
}

//! Byte-stable JSON and CSV output.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::CliResult;

/// 17 significant digits, so values round-trip exactly.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with sorted keys and fixed float formatting. Non-finite
/// floats become `null`.
pub fn json_bytes<T: Serialize>(report: &T) -> CliResult<Vec<u8>> {
    // `Value` maps are ordered by key
    let value = serde_json::to_value(report)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Header plus rows ordered by their first column.
pub fn csv_bytes(columns: &[String], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut sorted: Vec<&Vec<f64>> = rows.iter().collect();
    sorted.sort_by(|a, b| match (a.first(), b.first()) {
        (Some(x), Some(y)) => x.total_cmp(y),
        _ => a.len().cmp(&b.len()),
    });
    let mut out = columns.join(",");
    out.push('\n');
    for row in sorted {
        out.push_str(
            &row.iter()
                .map(|v| format_float(*v))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let bytes =
            json_bytes(&json!({"zeta": 1.5, "alpha": [0.1, 2], "mid": {"b": null, "a": true}}))
                .unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "{\"alpha\":[1.0000000000000001e-1,2],\"mid\":{\"a\":true,\"b\":null},\"zeta\":1.5000000000000000e0}\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for v in [std::f64::consts::PI, 1e-300, 123456789.12345679, -2.5e17] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_sorted_and_header_only_when_empty() {
        let cols = vec!["r".to_string(), "v".to_string()];
        assert_eq!(csv_bytes(&cols, &[]), b"r,v\n");
        let rows = vec![vec![2.0, f64::INFINITY], vec![1.0, 0.5]];
        assert_eq!(
            String::from_utf8(csv_bytes(&cols, &rows)).unwrap(),
            "r,v\n1.0000000000000000e0,5.0000000000000000e-1\n2.0000000000000000e0,inf\n"
        );
    }
}

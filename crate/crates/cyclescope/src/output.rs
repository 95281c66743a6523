//! CSV and JSON rendering.

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Full double precision: 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn optional_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| crate::error::CliError::Encode(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [
            0.1,
            -4.0 * std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -1e-300,
        ] {
            let s = real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn csv_shape() {
        let text = csv_table(&["h", "I"], &[vec!["0.5".into(), real(1.0)]]).unwrap();
        assert_eq!(text, "h,I\n0.5,1.0000000000000000e0\n");
    }
}

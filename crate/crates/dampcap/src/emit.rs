//! Result emission: CSV and JSON tables of capacity reports.
//!
//! CSV columns come in a fixed order — family, d, one column per parameter
//! name (sorted), the capacity metrics, the prior entries, and a trailing
//! error column for skipped points. Floating values are printed with 12
//! significant digits, so identical sweeps produce byte-identical files.

use crate::families::ParamValue;
use crate::sweep::SweepRow;
use serde_json::Value;
use std::collections::BTreeSet;
use std::io::{self, Write};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format \"{other}\"; use csv or json")),
        }
    }
}

/// Formats a float with 12 significant digits, `%.12g`-style: positional
/// notation for moderate exponents, scientific otherwise, trailing zeros
/// trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("float formatting yields an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-4..12).contains(&exp) {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() > int_len {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        } else {
            out.push_str(digits);
            out.push_str(&"0".repeat(int_len - digits.len()));
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exp - 1) as usize));
        out.push_str(digits);
    }
    out
}

fn fmt_param(value: &ParamValue) -> String {
    match value {
        ParamValue::Integer(i) => i.to_string(),
        ParamValue::Real(x) => fmt_sig(*x),
        ParamValue::RealList(xs) => xs.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(";"),
    }
}

/// Writes rows in the requested format.
pub fn emit<W: Write>(rows: &[SweepRow], format: OutputFormat, out: &mut W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => emit_csv(rows, out),
        OutputFormat::Json => emit_json(rows, out),
    }
}

fn emit_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    let param_names: BTreeSet<&str> = rows
        .iter()
        .flat_map(|row| row.spec.params.keys().map(String::as_str))
        .collect();
    let max_dim = rows.iter().map(|row| row.spec.dim).max().unwrap_or(0);

    let mut header = vec!["family".to_string(), "d".to_string()];
    header.extend(param_names.iter().map(|s| s.to_string()));
    header.extend(
        [
            "i_direct",
            "i_fourier",
            "c_det",
            "winner",
            "chi_direct",
            "chi_fourier",
            "delta",
            "prior_entropy",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    header.extend((0..max_dim).map(|i| format!("prior_{i}")));
    header.push("error".to_string());
    writeln!(out, "{}", header.join(","))?;

    for row in rows {
        let mut fields = vec![row.spec.family.to_string(), row.spec.dim.to_string()];
        for &name in &param_names {
            fields.push(row.spec.params.get(name).map(fmt_param).unwrap_or_default());
        }
        match &row.outcome {
            Ok(report) => {
                fields.push(fmt_sig(report.i_direct));
                fields.push(fmt_sig(report.i_fourier));
                fields.push(fmt_sig(report.c_det));
                fields.push(report.winner.to_string());
                fields.push(fmt_sig(report.chi_direct));
                fields.push(fmt_sig(report.chi_fourier));
                fields.push(fmt_sig(report.delta));
                fields.push(fmt_sig(report.prior_entropy));
                for i in 0..max_dim {
                    if i < report.prior_direct.len() {
                        fields.push(fmt_sig(report.prior_direct.get(i)));
                    } else {
                        fields.push(String::new());
                    }
                }
                fields.push(String::new());
            }
            Err(reason) => {
                fields.extend(std::iter::repeat_n(String::new(), 8 + max_dim));
                // commas inside the reason would shift columns
                fields.push(reason.replace(',', ";"));
            }
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("checked is_f64");
                let rounded: f64 = fmt_sig(x).parse().expect("fmt_sig output parses back");
                if let Some(num) = serde_json::Number::from_f64(rounded) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn emit_json<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    let mut items = Vec::with_capacity(rows.len());
    for row in rows {
        let mut value = match &row.outcome {
            Ok(report) => serde_json::to_value(report).map_err(io::Error::other)?,
            Err(reason) => serde_json::json!({
                "spec": serde_json::to_value(&row.spec).map_err(io::Error::other)?,
                "error": reason,
            }),
        };
        round_floats(&mut value);
        items.push(value);
    }
    serde_json::to_writer_pretty(&mut *out, &Value::Array(items)).map_err(io::Error::other)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{detected_capacity, CapacityReport};
    use crate::families::{ChannelSpec, Family, ParamValue};
    use crate::sweep::{parse_config, run_sweep};

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(3.0), "3");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-0.5), "-0.5");
        assert_eq!(fmt_sig(1.074), "1.074");
        assert_eq!(fmt_sig(0.05), "0.05");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(1e-5), "1e-5");
        assert_eq!(fmt_sig(1.5e13), "1.5e13");
        assert_eq!(fmt_sig(123.456), "123.456");
        assert_eq!(fmt_sig(1e11), "100000000000");
    }

    #[test]
    fn csv_shape_single_report() {
        let spec = ChannelSpec::new(
            Family::Bosonic,
            3,
            [("gamma".to_string(), ParamValue::Real(0.25))].into(),
        );
        let rows = run_sweep(&crate::sweep::SweepSpec::point(spec), 1e-9, 100_000);
        let mut buf = Vec::new();
        emit(&rows, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "family,d,gamma,i_direct,i_fourier,c_det,winner,chi_direct,chi_fourier,delta,prior_entropy,prior_0,prior_1,prior_2,error"
        );
        assert!(lines[1].starts_with("bosonic,3,0.25,"));
        assert!(lines[1].ends_with(",")); // empty error column
    }

    #[test]
    fn csv_skipped_rows_carry_reason() {
        let spec = parse_config(
            r#"{"family":"constant_ratio","d":5,"sweep":{"gamma":{"values":[0.1,0.9]}}}"#,
        )
        .unwrap();
        let rows = run_sweep(&spec, 1e-9, 100_000);
        let mut buf = Vec::new();
        emit(&rows, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].contains("inadmissible"));
        // every line has the same number of separators
        let commas = lines[0].matches(',').count();
        for line in &lines {
            assert_eq!(line.matches(',').count(), commas);
        }
    }

    #[test]
    fn json_round_trips_schema() {
        let spec = ChannelSpec::new(
            Family::Hypergeometric,
            4,
            [
                ("M".to_string(), ParamValue::Integer(3)),
                ("L".to_string(), ParamValue::Integer(9)),
            ]
            .into(),
        );
        let report = detected_capacity(&spec, 1e-9, 100_000).unwrap();
        let rows = vec![crate::sweep::SweepRow {
            spec,
            outcome: Ok(report.clone()),
        }];
        let mut buf = Vec::new();
        emit(&rows, OutputFormat::Json, &mut buf).unwrap();
        let parsed: Vec<CapacityReport> =
            serde_json::from_slice(&buf).expect("emitted JSON parses back into reports");
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].spec, report.spec);
        assert_eq!(parsed[0].winner, report.winner);
        assert!((parsed[0].c_det - report.c_det).abs() < 1e-11);
        assert!((parsed[0].delta - report.delta).abs() < 1e-11);
    }
}

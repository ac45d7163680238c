//! Number formatting and the display log base.
//!
//! Everything is computed in bits. Quantities measured in bits are converted
//! to the display base only when written out, and every number is rounded to
//! 12 significant digits so that output is stable across platforms.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Significant digits of every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum LogBase {
    #[default]
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
    #[value(name = "10")]
    Ten,
}

impl LogBase {
    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
            LogBase::Ten => "10",
        }
    }

    /// Multiplier taking a value in bits to this base: `log_b(2)`.
    pub fn per_bit(self) -> f64 {
        match self {
            LogBase::Two => 1.0,
            LogBase::E => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LOG10_2,
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// A rounded number; non-finite values become the strings `"inf"`, `"-inf"`
/// and `"nan"` since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::from("nan")
    } else if x.is_infinite() {
        Value::from(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        Value::from(round(x))
    }
}

/// A rounded number written for CSV.
pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        round(x).to_string()
    }
}

/// Converts bit-valued quantities for display.
#[derive(Clone, Copy, Debug)]
pub struct Units {
    pub base: LogBase,
}

impl Units {
    /// A quantity in bits, converted to the display base.
    pub fn info(&self, bits: f64) -> Value {
        num(bits * self.base.per_bit())
    }

    pub fn info_opt(&self, bits: Option<f64>) -> Value {
        bits.map_or(Value::Null, |b| self.info(b))
    }

    /// The raw converted value, for CSV.
    pub fn info_raw(&self, bits: f64) -> f64 {
        bits * self.base.per_bit()
    }

    /// Starts a summary object that records the log base.
    pub fn summary(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(command));
        m.insert("log_base".into(), Value::from(self.base.label()));
        m
    }
}

pub fn print_json(summary: Map<String, Value>) -> CliResult<()> {
    let text =
        serde_json::to_string_pretty(&Value::Object(summary)).expect("JSON values serialize");
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|source| CliError::Write {
        path: "<stdout>".into(),
        source,
    })
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round(1.2), 1.2);
        assert_eq!(round(0.1 + 0.2), 0.3);
        assert_eq!(round(1.234_567_890_123_4), 1.234_567_890_12);
        assert_eq!(round(-2.0 / 3.0), -0.666_666_666_667);
        assert_eq!(round(1e-300 / 3.0), 3.333_333_333_33e-301);
        assert_eq!(round(0.0), 0.0);
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(num(f64::NAN), Value::from("nan"));
        assert_eq!(csv_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn conversion_factors() {
        let nats = Units { base: LogBase::E };
        assert_eq!(nats.info(1.0), num(std::f64::consts::LN_2));
        let dits = Units { base: LogBase::Ten };
        assert!((dits.info_raw(10f64.log2()) - 1.0).abs() < 1e-15);
    }
}

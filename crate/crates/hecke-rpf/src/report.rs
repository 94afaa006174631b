//! Verification reports and their JSON / CSV renderings.

use std::io::Write;

use hecke_rpf_core::C64;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Residual at one grid point (`s`, or `z` for the RPF relations).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    #[serde(serialize_with = "ser_f64")]
    pub s_re: f64,
    #[serde(serialize_with = "ser_f64")]
    pub s_im: f64,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
}

impl Row {
    pub fn at(s: C64, residual: f64) -> Row {
        Row {
            s_re: s.re,
            s_im: s.im,
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(serialize_with = "ser_f64")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub details: Value,
    pub rows: Vec<Row>,
}

impl Check {
    /// A pass/fail check with residual 0 or 1.
    pub fn boolean(name: &str, pass: bool, details: Value) -> Check {
        Check {
            name: name.into(),
            pass,
            max_residual: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            details,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(name: &str, rows: Vec<Row>, tolerance: f64, details: Value) -> Check {
        let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        let finite = rows.iter().all(|r| r.residual.is_finite());
        Check {
            name: name.into(),
            pass: finite && max_residual <= tolerance,
            max_residual: if finite { max_residual } else { f64::INFINITY },
            tolerance,
            details,
            rows,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: Value, checks: Vec<Check>) -> Report {
        Report {
            command: command.into(),
            config,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out).map_err(|e| CliError::Io(e.to_string()))
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["check", "s_re", "s_im", "residual"])
                    .map_err(|e| CliError::Io(e.to_string()))?;
                for c in &self.checks {
                    let rows = if c.rows.is_empty() {
                        vec![Row {
                            s_re: f64::NAN,
                            s_im: f64::NAN,
                            residual: c.max_residual,
                        }]
                    } else {
                        c.rows.clone()
                    };
                    for r in rows {
                        w.write_record([
                            c.name.clone(),
                            r.s_re.to_string(),
                            r.s_im.to_string(),
                            r.residual.to_string(),
                        ])
                        .map_err(|e| CliError::Io(e.to_string()))?;
                    }
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

/// JSON has no infinities or NaN; those are written as strings.
fn ser_f64<S: serde::Serializer>(x: &f64, ser: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        ser.serialize_f64(*x)
    } else {
        ser.serialize_str(&x.to_string())
    }
}

/// `f64` for a report field, as a string when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

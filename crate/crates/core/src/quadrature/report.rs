use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub h: f64,
    pub quantity: String,
    pub value: f64,
    pub reference: f64,
    pub residual: f64,
}

impl ReportRow {
    pub fn new(h: f64, quantity: impl Into<String>, value: f64, reference: f64) -> Self {
        Self { h, quantity: quantity.into(), value, reference, residual: (value - reference).abs() }
    }
}

/// Writes rows as CSV with header `h,quantity,value,reference,residual`.
pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

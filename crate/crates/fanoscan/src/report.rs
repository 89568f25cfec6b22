//! Table emission and re-parsing for search results.
//!
//! A [`CandidateRecord`] that has survived the whole pipeline is flattened
//! into a [`RecordRow`] with seven fixed columns:
//!
//! ```text
//! basket, r_X, rX_c1cubed, rX_c2c1, q, n, chi_minusK
//! ```
//!
//! These are the table's own columns plus the two derived integers (`n` and
//! `chi(-K)`) that make the degree identities auditable from the file alone:
//! `rX_c1cubed = n * q^2` and `chi_minusK` is the integral value of the
//! degree-3 identity. All columns are exact: baskets in the text syntax of
//! [`Basket`], everything else a plain integer. Re-parsing a CSV or JSON
//! table reconstructs structurally equal records, and tampered rows (bad
//! basket text, broken `n * q^2` relation, zero `r_X`) are rejected rather
//! than silently recomputed.
//!
//! The markdown format is one-way and mirrors the reference table's five
//! columns: basket, `r_X`, `r_X c1^3`, `r_X c2c1`, `q`.

use serde::{Deserialize, Serialize};

use crate::basket::Basket;
use crate::error::Error;
use crate::rational::Rational;
use crate::search::CandidateRecord;

/// Output format of the `search` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Md,
}

/// One emitted table row; field order is the column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    pub basket: String,
    #[serde(rename = "r_X")]
    pub r_x: u64,
    #[serde(rename = "rX_c1cubed")]
    pub rx_c1cubed: u64,
    #[serde(rename = "rX_c2c1")]
    pub rx_c2c1: u64,
    pub q: u64,
    pub n: u64,
    #[serde(rename = "chi_minusK")]
    pub chi_minus_k: u64,
}

impl RecordRow {
    /// Flattens a fully assigned record. Records that stopped before weight
    /// assignment (no basket, hence no `chi(-K)`) are not serializable.
    pub fn from_record(rec: &CandidateRecord) -> Result<Self, Error> {
        let basket = rec.basket.as_ref().ok_or_else(|| {
            Error::InvalidConfig("only records with an assigned basket can be emitted".into())
        })?;
        let chi_minus_k = rec.chi_minus_k.ok_or_else(|| {
            Error::InvalidConfig("record lacks an integral chi(-K)".into())
        })?;
        Ok(RecordRow {
            basket: basket.to_string(),
            r_x: rec.r_x,
            rx_c1cubed: rec.rx_c1_cubed(),
            rx_c2c1: rec.rx_c2c1(),
            q: rec.q,
            n: rec.n,
            chi_minus_k,
        })
    }

    /// Reconstructs the structured record, re-deriving the rational
    /// invariants from the integer columns and rejecting inconsistent rows.
    pub fn to_record(&self) -> Result<CandidateRecord, Error> {
        let basket: Basket = self.basket.parse()?;
        if self.r_x == 0 {
            return Err(Error::Parse(format!("row q={}: r_X must be positive", self.q)));
        }
        if self.n == 0 || self.n * self.q * self.q != self.rx_c1cubed {
            return Err(Error::Parse(format!(
                "row q={}: rX_c1cubed = {} is not n*q^2 with n = {}",
                self.q, self.rx_c1cubed, self.n
            )));
        }
        Ok(CandidateRecord {
            r_multiset: basket.r_multiset(),
            c2c1: Rational::from(self.rx_c2c1) / Rational::from(self.r_x),
            c1_cubed: Rational::from(self.rx_c1cubed) / Rational::from(self.r_x),
            basket: Some(basket),
            q: self.q,
            r_x: self.r_x,
            n: self.n,
            chi_minus_k: Some(self.chi_minus_k),
        })
    }
}

/// Serializes records as CSV with a header row.
pub fn records_to_csv(records: &[CandidateRecord]) -> Result<String, Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for rec in records {
        writer
            .serialize(RecordRow::from_record(rec)?)
            .expect("serializing plain integers and strings to memory cannot fail");
    }
    let bytes = writer
        .into_inner()
        .expect("flushing an in-memory buffer cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses a CSV table produced by [`records_to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<CandidateRecord>, Error> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<RecordRow>() {
        let row = row.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        out.push(row.to_record()?);
    }
    Ok(out)
}

/// Serializes records as a pretty-printed JSON array.
pub fn records_to_json(records: &[CandidateRecord]) -> Result<String, Error> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(RecordRow::from_record)
        .collect::<Result<_, _>>()?;
    Ok(serde_json::to_string_pretty(&rows)
        .expect("serializing plain integers and strings cannot fail"))
}

/// Parses a JSON array produced by [`records_to_json`].
pub fn records_from_json(text: &str) -> Result<Vec<CandidateRecord>, Error> {
    let rows: Vec<RecordRow> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
    rows.iter().map(RecordRow::to_record).collect()
}

/// Renders records as a markdown table in the reference column order.
pub fn records_to_md(records: &[CandidateRecord]) -> Result<String, Error> {
    let mut out = String::from("| basket | r_X | rX_c1cubed | rX_c2c1 | q |\n");
    out.push_str("| --- | --- | --- | --- | --- |\n");
    for rec in records {
        let row = RecordRow::from_record(rec)?;
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            row.basket, row.r_x, row.rx_c1cubed, row.rx_c2c1, row.q
        ));
    }
    Ok(out)
}

/// Dispatches to the requested format.
pub fn render(records: &[CandidateRecord], format: OutputFormat) -> Result<String, Error> {
    match format {
        OutputFormat::Csv => records_to_csv(records),
        OutputFormat::Json => records_to_json(records),
        OutputFormat::Md => records_to_md(records),
    }
}

//! Reading and writing stratified datasets as CSV.
//!
//! The header selects the schema and must match exactly:
//!
//! ```text
//! group,cause,successes,total     counts schema
//! group,cause,rate,weight         rates schema, weight = P(g|x)
//! ```
//!
//! Lines starting with `#` are directives when the text before the first
//! comma is a known keyword, and comments otherwise:
//!
//! ```text
//! #name,<dataset name>
//! #outcome,<outcome label>
//! #reference,<cause>              reference cause x0 (default: first cause seen)
//! #prior,<group>,<P(g)>           group prior, rates schema
//! #cause_prior,<cause>,<P(x)>     cause marginal, rates schema
//! #outcome_prior,<P(y1)>          external reference for D(x, y1)
//! #tolerance,<value>              sum tolerance for weights and priors
//! #note,<text>                    free-form provenance note
//! ```
//!
//! Values are proportions in `[0, 1]` written with a `.` decimal point and no
//! exponent or thousands separators. A group labelled `sum` is a totals row
//! and is skipped.

use crate::tables::{
    RatesOptions, Schema, StratifiedDataset, TableError, DEFAULT_SUM_TOLERANCE,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

pub const COUNTS_HEADER: &str = "group,cause,successes,total";
pub const RATES_HEADER: &str = "group,cause,rate,weight";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("line {line}: unrecognized header `{found}` (expected `{COUNTS_HEADER}` or `{RATES_HEADER}`)")]
    Schema { line: u64, found: String },
    #[error("no header line found")]
    MissingHeader,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_error(line: u64, column: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parse a plain decimal number: optional sign, digits, optional fraction.
pub fn parse_decimal(text: &str) -> Option<f64> {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    let ok = digits(int)
        && frac.is_none_or(digits)
        && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    if ok {
        text.parse().ok()
    } else {
        None
    }
}

/// Descriptive data carried alongside a dataset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metadata {
    pub name: Option<String>,
    pub outcome: Option<String>,
    /// Reference `P(y1)` for the incremental measure D.
    pub outcome_prior: Option<f64>,
    pub notes: Vec<String>,
}

/// A parsed dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub source: String,
    pub dataset: StratifiedDataset,
    pub metadata: Metadata,
    pub sum_tolerance: f64,
}

impl DatasetFile {
    pub fn schema(&self) -> Schema {
        self.dataset.schema()
    }

    pub fn name(&self) -> &str {
        self.metadata.name.as_deref().unwrap_or(&self.source)
    }

    pub fn outcome_label(&self) -> &str {
        self.metadata.outcome.as_deref().unwrap_or("y1")
    }
}

const DIRECTIVES: [&str; 8] = [
    "#name",
    "#outcome",
    "#reference",
    "#prior",
    "#cause_prior",
    "#outcome_prior",
    "#tolerance",
    "#note",
];

enum Rows {
    Counts(Vec<(String, String, u64, u64)>),
    Rates(Vec<(String, String, f64, f64)>),
}

fn field(record: &csv::StringRecord, i: usize, line: u64) -> Result<&str, IngestError> {
    record
        .get(i)
        .ok_or_else(|| parse_error(line, i + 1, "missing field"))
}

fn probability(text: &str, line: u64, column: usize) -> Result<f64, IngestError> {
    match parse_decimal(text) {
        Some(v) if (0.0..=1.0).contains(&v) => Ok(v),
        Some(v) => Err(parse_error(line, column, format!("{v} is not a proportion in [0, 1]"))),
        None => Err(parse_error(line, column, format!("malformed number `{text}`"))),
    }
}

/// Parse dataset CSV text. `source` names the input in messages.
pub fn parse_dataset(text: &str, source: &str) -> Result<DatasetFile, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut metadata = Metadata::default();
    let mut reference: Option<String> = None;
    let mut prior: Vec<(String, f64)> = Vec::new();
    let mut cause_prior: Vec<(String, f64, u64)> = Vec::new();
    let mut tolerance = DEFAULT_SUM_TOLERANCE;
    let mut rows: Option<Rows> = None;
    let mut seen: HashMap<(String, String), u64> = HashMap::new();

    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let first = record.get(0).unwrap_or("");
        if record.len() == 1 && first.is_empty() {
            continue;
        }
        if first.starts_with('#') {
            if !DIRECTIVES.contains(&first) {
                continue;
            }
            let rest = |i: usize| field(&record, i, line);
            match first {
                "#name" => metadata.name = Some(rest(1)?.to_string()),
                "#outcome" => metadata.outcome = Some(rest(1)?.to_string()),
                "#reference" => reference = Some(rest(1)?.to_string()),
                "#note" => {
                    let text: Vec<&str> = record.iter().skip(1).collect();
                    metadata.notes.push(text.join(", "));
                }
                "#prior" => prior.push((rest(1)?.to_string(), probability(rest(2)?, line, 3)?)),
                "#cause_prior" => {
                    cause_prior.push((rest(1)?.to_string(), probability(rest(2)?, line, 3)?, line))
                }
                "#outcome_prior" => metadata.outcome_prior = Some(probability(rest(1)?, line, 2)?),
                "#tolerance" => {
                    tolerance = parse_decimal(rest(1)?)
                        .filter(|t| *t >= 0.0)
                        .ok_or_else(|| parse_error(line, 2, "malformed tolerance"))?
                }
                _ => unreachable!(),
            }
            continue;
        }

        let Some(rows) = rows.as_mut() else {
            let header: Vec<&str> = record.iter().collect();
            let header = header.join(",");
            rows = Some(match header.as_str() {
                COUNTS_HEADER => Rows::Counts(Vec::new()),
                RATES_HEADER => Rows::Rates(Vec::new()),
                _ => return Err(IngestError::Schema { line, found: header }),
            });
            continue;
        };

        if record.len() != 4 {
            return Err(parse_error(
                line,
                record.len().min(4) + 1,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        let group = field(&record, 0, line)?;
        let cause = field(&record, 1, line)?;
        if group.eq_ignore_ascii_case("sum") {
            continue;
        }
        if let Some(first) = seen.insert((group.to_string(), cause.to_string()), line) {
            return Err(parse_error(
                line,
                1,
                format!("group `{group}`, cause `{cause}` already given on line {first}"),
            ));
        }
        match rows {
            Rows::Counts(rows) => {
                let count = |i: usize| -> Result<u64, IngestError> {
                    let text = field(&record, i, line)?;
                    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(parse_error(line, i + 1, format!("malformed count `{text}`")));
                    }
                    text.parse()
                        .map_err(|_| parse_error(line, i + 1, format!("count `{text}` is too large")))
                };
                let (successes, total) = (count(2)?, count(3)?);
                if total == 0 {
                    return Err(parse_error(line, 4, "total must be positive"));
                }
                if successes > total {
                    return Err(parse_error(
                        line,
                        3,
                        format!("{successes} successes exceed the total of {total}"),
                    ));
                }
                rows.push((group.to_string(), cause.to_string(), successes, total));
            }
            Rows::Rates(rows) => {
                let rate = probability(field(&record, 2, line)?, line, 3)?;
                let weight = probability(field(&record, 3, line)?, line, 4)?;
                rows.push((group.to_string(), cause.to_string(), rate, weight));
            }
        }
    }

    let dataset = match rows.ok_or(IngestError::MissingHeader)? {
        Rows::Counts(rows) => StratifiedDataset::from_counts(&rows)?,
        Rows::Rates(rows) => {
            let causes = first_seen_causes(&rows);
            let mut marginals = None;
            if !cause_prior.is_empty() {
                let mut m = [f64::NAN; 2];
                for (cause, p, line) in &cause_prior {
                    let i = causes.iter().position(|c| c == cause).ok_or_else(|| {
                        parse_error(*line, 2, format!("unknown cause `{cause}`"))
                    })?;
                    m[i] = *p;
                }
                // a single declared marginal implies the other
                for i in 0..2 {
                    if m[i].is_nan() && !m[1 - i].is_nan() {
                        m[i] = 1.0 - m[1 - i];
                    }
                }
                marginals = Some(m);
            }
            let options = RatesOptions {
                sum_tolerance: tolerance,
                cause_prior: marginals,
            };
            let prior_ref: Vec<(&str, f64)> = prior.iter().map(|(g, p)| (g.as_str(), *p)).collect();
            let rows: Vec<(&str, &str, f64, f64)> = rows
                .iter()
                .map(|(g, c, r, w)| (g.as_str(), c.as_str(), *r, *w))
                .collect();
            StratifiedDataset::from_rates(
                &rows,
                (!prior_ref.is_empty()).then_some(prior_ref.as_slice()),
                options,
            )?
        }
    };
    let dataset = match reference {
        Some(cause) => dataset.with_reference(&cause)?,
        None => dataset,
    };

    Ok(DatasetFile {
        source: source.to_string(),
        dataset,
        metadata,
        sum_tolerance: tolerance,
    })
}

fn first_seen_causes(rows: &[(String, String, f64, f64)]) -> Vec<String> {
    let mut causes: Vec<String> = Vec::new();
    for (_, c, _, _) in rows {
        if !causes.contains(c) {
            causes.push(c.clone());
        }
    }
    causes
}

/// Load and validate a dataset file.
pub fn load_dataset(path: &Path) -> Result<DatasetFile, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, &path.display().to_string())
}

/// Write a dataset back out in the CSV grammar accepted by [`parse_dataset`].
pub fn export_dataset(file: &DatasetFile) -> String {
    use crate::tables::{Cell, PriorSource};

    let d = &file.dataset;
    let mut out = String::new();
    let m = &file.metadata;
    if let Some(name) = &m.name {
        out.push_str(&format!("#name,{name}\n"));
    }
    if let Some(outcome) = &m.outcome {
        out.push_str(&format!("#outcome,{outcome}\n"));
    }
    for note in &m.notes {
        out.push_str(&format!("#note,{}\n", note.replace(", ", ",")));
    }
    if let Some(p) = m.outcome_prior {
        out.push_str(&format!("#outcome_prior,{p}\n"));
    }
    if file.sum_tolerance != DEFAULT_SUM_TOLERANCE {
        out.push_str(&format!("#tolerance,{}\n", file.sum_tolerance));
    }
    out.push_str(match d.schema() {
        Schema::Counts => COUNTS_HEADER,
        Schema::Rates => RATES_HEADER,
    });
    out.push('\n');
    for g in d.groups() {
        for (ci, cause) in d.causes().iter().enumerate() {
            match g.cells[ci] {
                Cell::Count { successes, total } => {
                    out.push_str(&format!("{},{cause},{successes},{total}\n", g.label))
                }
                Cell::Rate { rate, weight } => {
                    out.push_str(&format!("{},{cause},{rate},{weight}\n", g.label))
                }
            }
        }
    }
    if d.schema() == Schema::Rates {
        if d.prior_source() == PriorSource::Supplied {
            for (g, p) in d.groups().iter().zip(d.group_prior()) {
                out.push_str(&format!("#prior,{},{p}\n", g.label));
            }
        }
        if let Some(px) = d.cause_marginals() {
            for (cause, p) in d.causes().iter().zip(px) {
                out.push_str(&format!("#cause_prior,{cause},{p}\n"));
            }
        }
    }
    if d.reference() != 0 {
        out.push_str(&format!("#reference,{}\n", d.causes()[d.reference()]));
    }
    out
}

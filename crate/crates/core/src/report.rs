//! Analysis reports: observed vs do-adjusted rates, the paradox check and
//! the requested measures, rendered as text, CSV or JSON.

use crate::adjust::{detect_simpson, do_adjust, AdjustError, DoTable, ParadoxReport};
use crate::builtin::NamedTable;
use crate::ingest::DatasetFile;
use crate::measures::{evaluate, evaluate_interventional, MeasureId, MeasureResult};
use crate::tables::{CausalRole, JointTable, PriorSource, Schema};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text|csv|json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    /// Show rates as percentages.
    pub percent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub source: String,
    pub schema: Schema,
    pub causes: [String; 2],
    pub reference: String,
    pub treatment: String,
    pub outcome: String,
    pub group_prior: PriorSource,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauseRate {
    pub cause: String,
    pub p_y1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    /// `P(y1|x)` pooled with the observed weights `P(g|x)`, in cause order.
    pub rates: Vec<CauseRate>,
    /// `P(x)` in cause order when known from the data.
    pub cause_marginals: Option<[f64; 2]>,
    /// External reference `P(y1)` used for D, when the dataset declares one.
    pub outcome_prior: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedMeasures {
    pub role: CausalRole,
    pub results: Vec<MeasureResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub observed: Vec<MeasureResult>,
    pub adjusted: Vec<AdjustedMeasures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub prior: f64,
    /// `P(y1|x,g)` in cause order.
    pub rates: [f64; 2],
    /// `P(g|x)` in cause order.
    pub weights: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dataset: DatasetInfo,
    pub observed: Observed,
    pub adjusted: Vec<DoTable>,
    pub paradox: Option<ParadoxReport>,
    pub measures: Measures,
    pub groups: Vec<GroupRow>,
}

/// D for each cause against an external `P(y1)`.
fn d_against_reference(table: &JointTable, causes: [(&str, f64); 2], reference: f64) -> Vec<MeasureResult> {
    causes
        .iter()
        .map(|(cause, rate)| MeasureResult {
            id: MeasureId::D,
            value: rate - reference,
            direction: format!("({cause},{})", table.label_y1),
            defined: true,
            note: Some(format!("against reference P({})={reference}", table.label_y1)),
        })
        .collect()
}

impl AnalysisReport {
    /// Run the full pipeline on a dataset: pool, adjust under each role,
    /// check for the paradox and evaluate the measures.
    pub fn build(file: &DatasetFile, roles: &[CausalRole], measures: &[MeasureId]) -> Result<Self, AdjustError> {
        let d = &file.dataset;
        let (t, r) = (d.treatment(), d.reference());
        let outcome = file.outcome_label().to_string();
        let observed_table = d.pool().with_outcome_labels(outcome.clone(), format!("not_{outcome}"));

        let adjusted: Vec<DoTable> = roles
            .iter()
            .map(|&role| do_adjust(d, role))
            .collect::<Result<_, _>>()?;

        let mut observed_measures = Vec::new();
        for &id in measures {
            match (id, file.metadata.outcome_prior) {
                (MeasureId::D, Some(p)) => observed_measures.extend(d_against_reference(
                    &observed_table,
                    [
                        (d.causes()[0].as_str(), d.pooled_rate(0)),
                        (d.causes()[1].as_str(), d.pooled_rate(1)),
                    ],
                    p,
                )),
                _ => observed_measures.push(evaluate(id, &observed_table)),
            }
        }
        let adjusted_measures = adjusted
            .iter()
            .map(|a| AdjustedMeasures {
                role: a.role_used,
                results: measures
                    .iter()
                    .map(|&id| {
                        let mut m = evaluate_interventional(id, a);
                        m.direction = m.direction.replace("y1", &outcome);
                        m
                    })
                    .collect(),
            })
            .collect();

        let groups = d
            .groups()
            .iter()
            .enumerate()
            .map(|(gi, g)| GroupRow {
                group: g.label.clone(),
                prior: d.group_prior()[gi],
                rates: [d.rate(gi, 0), d.rate(gi, 1)],
                weights: [d.weight(gi, 0), d.weight(gi, 1)],
            })
            .collect();

        Ok(AnalysisReport {
            dataset: DatasetInfo {
                name: file.name().to_string(),
                source: file.source.clone(),
                schema: d.schema(),
                causes: d.causes().clone(),
                reference: d.causes()[r].clone(),
                treatment: d.causes()[t].clone(),
                outcome,
                group_prior: d.prior_source(),
                notes: file.metadata.notes.clone(),
            },
            observed: Observed {
                rates: (0..2)
                    .map(|c| CauseRate {
                        cause: d.causes()[c].clone(),
                        p_y1: d.pooled_rate(c),
                    })
                    .collect(),
                cause_marginals: d.cause_marginals(),
                outcome_prior: file.metadata.outcome_prior,
            },
            adjusted,
            paradox: detect_simpson(d).ok(),
            measures: Measures {
                observed: observed_measures,
                adjusted: adjusted_measures,
            },
            groups,
        })
    }

    pub fn render(&self, format: Format, options: RenderOptions) -> String {
        match format {
            Format::Text => self.render_text(options),
            Format::Csv => self.render_csv(),
            Format::Json => to_json(self),
        }
    }

    fn render_text(&self, options: RenderOptions) -> String {
        let info = &self.dataset;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dataset: {} ({}, {} groups)",
            info.name,
            info.schema,
            self.groups.len()
        );
        let _ = writeln!(
            out,
            "causes: {} (reference), {} (treatment); outcome: {}",
            info.reference, info.treatment, info.outcome
        );
        for note in &info.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out.push('\n');

        let rate = |v: f64| format_rate(v, options.percent);
        let [a, b] = &info.causes;
        let mut rows = vec![vec![
            "group".to_string(),
            "P(g)".to_string(),
            format!("P(y1|{a},g)"),
            format!("P(g|{a})"),
            format!("P(y1|{b},g)"),
            format!("P(g|{b})"),
        ]];
        for g in &self.groups {
            rows.push(vec![
                g.group.clone(),
                format_sig(g.prior),
                rate(g.rates[0]),
                format_sig(g.weights[0]),
                rate(g.rates[1]),
                format_sig(g.weights[1]),
            ]);
        }
        out.push_str(&align(&rows, &[0]));
        out.push('\n');

        let mut rows = vec![vec![String::new(), a.clone(), b.clone(), String::new()]];
        rows.push(vec![
            "P(y1|x)".to_string(),
            rate(self.observed.rates[0].p_y1),
            rate(self.observed.rates[1].p_y1),
            "observed, weights P(g|x)".to_string(),
        ]);
        for adj in &self.adjusted {
            let how = match adj.role_used {
                CausalRole::Confounder => "do-adjusted as confounder, weights P(g)",
                CausalRole::Mediator => "do-adjusted as mediator, weights P(g|x)",
            };
            rows.push(vec![
                "P(y1|do(x))".to_string(),
                rate(adj.rates[0]),
                rate(adj.rates[1]),
                how.to_string(),
            ]);
        }
        out.push_str(&align(&rows, &[0, 3]));

        if let Some(p) = &self.paradox {
            let favored = |d: crate::adjust::Direction| d.favored(&p.treatment, &p.reference).to_string();
            let groups = match p.common_direction() {
                Some(d) => format!("every group favors {}", favored(d)),
                None => "groups disagree".to_string(),
            };
            let adjusted = p
                .adjusted_direction
                .map(|d| format!(", adjusted favors {}", favored(d)))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "\nsimpson's paradox: {} ({groups}, pooled favors {}{adjusted})",
                if p.paradox_present { "present" } else { "absent" },
                favored(p.overall_direction)
            );
        }

        if !self.measures.observed.is_empty() {
            out.push('\n');
            let mut header = vec!["measure".to_string(), "rule".to_string(), "observed".to_string()];
            header.extend(self.measures.adjusted.iter().map(|a| format!("adjusted ({})", a.role)));
            let mut rows = vec![header];
            let mut notes: Vec<String> = Vec::new();
            for (i, m) in self.measures.observed.iter().enumerate() {
                let mut row = vec![m.id.to_string(), m.direction.clone(), format_measure(m, options)];
                for adj in &self.measures.adjusted {
                    let cell = adj
                        .results
                        .iter()
                        .find(|r| r.id == m.id && i == first_index(&self.measures.observed, m.id))
                        .map(|r| format_measure(r, options))
                        .unwrap_or_else(|| "-".to_string());
                    row.push(cell);
                }
                if let Some(n) = &m.note {
                    let line = format!("{}: {n}", m.id);
                    if !notes.contains(&line) {
                        notes.push(line);
                    }
                }
                rows.push(row);
            }
            out.push_str(&align(&rows, &[0, 1]));
            for n in notes {
                let _ = writeln!(out, "  {n}");
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = CsvOut::new();
        let info = &self.dataset;
        w.row("dataset", "name", "", &info.name, true);
        w.row("dataset", "schema", "", &info.schema.to_string(), true);
        w.row("dataset", "reference", "", &info.reference, true);
        w.row("dataset", "treatment", "", &info.treatment, true);
        w.row("dataset", "outcome", "", &info.outcome, true);
        for g in &self.groups {
            w.num("group", &g.group, "P(g)", g.prior);
            for (c, cause) in info.causes.iter().enumerate() {
                w.num("group", &g.group, &format!("P(y1|{cause},g)"), g.rates[c]);
                w.num("group", &g.group, &format!("P(g|{cause})"), g.weights[c]);
            }
        }
        for r in &self.observed.rates {
            w.num("observed", "P(y1|x)", &r.cause, r.p_y1);
        }
        for adj in &self.adjusted {
            for (c, cause) in adj.causes.iter().enumerate() {
                w.num(&format!("adjusted:{}", adj.role_used), "P(y1|do(x))", cause, adj.rates[c]);
            }
        }
        if let Some(p) = &self.paradox {
            w.row("paradox", "unanimous", "", &p.unanimous.to_string(), true);
            w.row("paradox", "paradox_present", "", &p.paradox_present.to_string(), true);
            w.row("paradox", "overall_direction", "", &p.overall_direction.to_string(), true);
            if let Some(d) = p.adjusted_direction {
                w.row("paradox", "adjusted_direction", "", &d.to_string(), true);
            }
        }
        for m in &self.measures.observed {
            w.measure("measure:observed", m);
        }
        for adj in &self.measures.adjusted {
            for m in &adj.results {
                w.measure(&format!("measure:{}", adj.role), m);
            }
        }
        w.finish()
    }
}

fn first_index(list: &[MeasureResult], id: MeasureId) -> usize {
    list.iter().position(|m| m.id == id).unwrap_or(0)
}

/// Report for a bundle of flat tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatReport {
    pub dataset: String,
    pub tables: Vec<FlatEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatEntry {
    pub name: String,
    pub cause: String,
    pub reference: String,
    pub outcome: String,
    pub p_y1_given_x1: f64,
    pub p_y1_given_x0: f64,
    pub cause_prior: Option<f64>,
    pub note: Option<String>,
    pub measures: Vec<MeasureResult>,
}

impl FlatReport {
    pub fn build(dataset: &str, tables: &[NamedTable], measures: &[MeasureId]) -> Self {
        FlatReport {
            dataset: dataset.to_string(),
            tables: tables
                .iter()
                .map(|nt| FlatEntry {
                    name: nt.name.clone(),
                    cause: nt.table.label_x1.clone(),
                    reference: nt.table.label_x0.clone(),
                    outcome: nt.table.label_y1.clone(),
                    p_y1_given_x1: nt.table.p_y1_given_x1(),
                    p_y1_given_x0: nt.table.p_y1_given_x0(),
                    cause_prior: nt.table.declared_cause_prior(),
                    note: nt.note.clone(),
                    measures: measures.iter().map(|&id| evaluate(id, &nt.table)).collect(),
                })
                .collect(),
        }
    }

    pub fn render(&self, format: Format, options: RenderOptions) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut w = CsvOut::new();
                for t in &self.tables {
                    w.num(&t.name, "P(y1|x1)", &t.cause, t.p_y1_given_x1);
                    w.num(&t.name, "P(y1|x0)", &t.reference, t.p_y1_given_x0);
                    for m in &t.measures {
                        w.measure(&t.name, m);
                    }
                }
                w.finish()
            }
            Format::Text => {
                let mut out = format!("dataset: {}\n", self.dataset);
                for t in &self.tables {
                    let _ = writeln!(out, "\n[{}] {} vs {} => {}", t.name, t.cause, t.reference, t.outcome);
                    if let Some(n) = &t.note {
                        let _ = writeln!(out, "note: {n}");
                    }
                    let mut rows = vec![
                        vec![
                            format!("P({}|{})", t.outcome, t.cause),
                            format_rate(t.p_y1_given_x1, options.percent),
                        ],
                        vec![
                            format!("P({}|{})", t.outcome, t.reference),
                            format_rate(t.p_y1_given_x0, options.percent),
                        ],
                    ];
                    for m in &t.measures {
                        rows.push(vec![format!("{} {}", m.id, m.direction), format_measure(m, options)]);
                    }
                    out.push_str(&align(&rows, &[0]));
                }
                out
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

struct CsvOut {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvOut {
    fn new() -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["section", "item", "key", "value", "defined"])
            .expect("in-memory write");
        CsvOut { writer }
    }

    fn row(&mut self, section: &str, item: &str, key: &str, value: &str, defined: bool) {
        self.writer
            .write_record([section, item, key, value, if defined { "true" } else { "false" }])
            .expect("in-memory write");
    }

    fn num(&mut self, section: &str, item: &str, key: &str, value: f64) {
        self.row(section, item, key, &format_full(value), true);
    }

    fn measure(&mut self, section: &str, m: &MeasureResult) {
        self.row(section, m.id.as_str(), &m.direction, &format_full(m.value), m.defined);
    }

    fn finish(self) -> String {
        String::from_utf8(self.writer.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Full-precision, round-trippable decimal.
pub fn format_full(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

/// Four significant digits, keeping trailing zeros.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return format_full(v);
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".to_string()
    } else {
        s
    }
}

fn format_rate(v: f64, percent: bool) -> String {
    if percent {
        format!("{}%", format_sig(v * 100.0))
    } else {
        format_sig(v)
    }
}

fn format_measure(m: &MeasureResult, options: RenderOptions) -> String {
    if !m.defined {
        return "undefined".to_string();
    }
    let is_rate_scale = matches!(
        m.id,
        MeasureId::F | MeasureId::D | MeasureId::M | MeasureId::S | MeasureId::N | MeasureId::Rd
    );
    format_rate(m.value, options.percent && is_rate_scale)
}

/// Pad cells into columns; `left` lists the left-aligned columns, the rest
/// are right-aligned.
fn align(rows: &[Vec<String>], left: &[usize]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = " ".repeat(widths[c] - cell.chars().count());
            if left.contains(&c) {
                line.push_str(cell);
                line.push_str(&pad);
            } else {
                line.push_str(&pad);
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin, Builtin};

    fn kidney() -> DatasetFile {
        match builtin("kidney_stones") {
            Some(Builtin::Stratified(f)) => f,
            _ => unreachable!(),
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.83), "0.8300");
        assert_eq!(format_sig(0.0104324), "0.01043");
        assert_eq!(format_sig(-0.0588), "-0.05880");
        assert_eq!(format_sig(12.5), "12.50");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn kidney_text_report() {
        let report = AnalysisReport::build(&kidney(), &[CausalRole::Confounder], &[MeasureId::Cc]).unwrap();
        let text = report.render(Format::Text, RenderOptions::default());
        // exact arithmetic on the counts: 290/350, 273/350; standardized 0.78073, 0.83255
        assert!(text.contains("P(y1|x)      0.8286  0.7800"), "{text}");
        assert!(text.contains("P(y1|do(x))  0.7808  0.8325"), "{text}");
        assert!(text.contains("simpson's paradox: present"), "{text}");
        assert!(text.contains("x2/x1=>success"), "{text}");
    }

    #[test]
    fn rates_only_without_measures() {
        let report = AnalysisReport::build(&kidney(), &[CausalRole::Confounder], &[]).unwrap();
        assert!(report.measures.observed.is_empty());
        let text = report.render(Format::Text, RenderOptions::default());
        assert!(!text.contains("measure"));
    }

    #[test]
    fn json_round_trips() {
        let report = AnalysisReport::build(
            &kidney(),
            &[CausalRole::Confounder, CausalRole::Mediator],
            &MeasureId::ALL,
        )
        .unwrap();
        let json = report.render(Format::Json, RenderOptions::default());
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["dataset", "observed", "adjusted", "paradox", "measures", "groups"] {
            assert!(value.get(key).is_some(), "{key}");
        }
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.render(Format::Json, RenderOptions::default()), json);
    }

    #[test]
    fn rendering_is_deterministic() {
        let build = || AnalysisReport::build(&kidney(), &[CausalRole::Confounder], &MeasureId::ALL).unwrap();
        for format in [Format::Text, Format::Csv, Format::Json] {
            assert_eq!(
                build().render(format, RenderOptions::default()),
                build().render(format, RenderOptions::default())
            );
        }
    }

    #[test]
    fn csv_report_has_full_precision() {
        let report = AnalysisReport::build(&kidney(), &[CausalRole::Confounder], &[MeasureId::Cc]).unwrap();
        let csv = report.render(Format::Csv, RenderOptions::default());
        assert!(csv.starts_with("section,item,key,value,defined\n"));
        let expected = format!("observed,P(y1|x),x1,{},true", 290.0 / 350.0);
        assert!(csv.contains(&expected), "{csv}");
    }

    #[test]
    fn percent_display() {
        let Some(Builtin::Stratified(f)) = builtin("covid_cfr_by_age") else {
            unreachable!()
        };
        let report = AnalysisReport::build(&f, &[CausalRole::Mediator], &[MeasureId::D]).unwrap();
        let text = report.render(Format::Text, RenderOptions { percent: true });
        assert!(text.contains("1.043%"), "{text}");
        assert_eq!(report.measures.observed.len(), 2);
    }
}

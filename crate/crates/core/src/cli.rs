//! Command-line front end. Exit codes: 0 success, 1 data error, 2 usage error.

use crate::adjust::do_adjust;
use crate::builtin::{builtin, Builtin, NamedTable, CATALOG};
use crate::chart::emit_group_chart;
use crate::ingest::{load_dataset, parse_decimal, DatasetFile};
use crate::measures::MeasureId;
use crate::report::{format_full, format_sig, AnalysisReport, FlatReport, Format, RenderOptions};
use crate::semantic::{predict_from_cc, predict_from_ce, BinaryDist};
use crate::tables::{CausalRole, JointTable};
use crate::verify::{all_passed, render_text, run_checks};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "causal-confirm", version, about = "Causal confirmation measures for stratified 2x2 data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pool, do-adjust and score a stratified dataset.
    Analyze(AnalyzeArgs),
    /// Compute measures on a flat 2x2 table given by its two conditionals.
    Measures(MeasuresArgs),
    /// Predict posteriors from a confirmation value.
    Predict(PredictArgs),
    /// Recompute the published figures for the bundled datasets.
    Verify(VerifyArgs),
    /// List the bundled datasets.
    Datasets,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoleArg {
    Confounder,
    Mediator,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Dataset file (counts or rates schema).
    #[arg(long, value_name = "FILE", conflicts_with = "dataset", required_unless_present = "dataset")]
    input: Option<PathBuf>,
    /// Bundled dataset name.
    #[arg(long, value_name = "NAME")]
    dataset: Option<String>,
    /// Role of the grouping variable; required with two or more groups.
    #[arg(long, value_enum)]
    role: Option<RoleArg>,
    /// Comma-separated measure ids, or `all`.
    #[arg(long, value_name = "LIST", default_value = "cc")]
    measures: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Display rates as percentages (text format only).
    #[arg(long)]
    percent: bool,
    /// Write `<name>-groups.csv` and `<name>-groups.svg` into this directory.
    #[arg(long, value_name = "DIR")]
    chart: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasuresArgs {
    /// P(y1|x1).
    #[arg(long, allow_hyphen_values = true)]
    p11: String,
    /// P(y1|x0).
    #[arg(long, allow_hyphen_values = true)]
    p10: String,
    /// P(x1); measures that need it fall back to 0.5 when omitted.
    #[arg(long, allow_hyphen_values = true)]
    px1: Option<String>,
    #[arg(long, value_name = "LIST", default_value = "all")]
    measures: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long)]
    percent: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("value").required(true).args(["cc", "ce"]))]
struct PredictArgs {
    /// Causal confirmation Cc in [-1, 1]; needs --px1.
    #[arg(long, allow_hyphen_values = true, requires = "px1")]
    cc: Option<String>,
    /// P(x1) in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    px1: Option<String>,
    /// Confirmation Ce in [-1, 1].
    #[arg(long, allow_hyphen_values = true, conflicts_with = "px1")]
    ce: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Restrict to one bundled dataset.
    #[arg(long, value_name = "NAME")]
    dataset: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn data(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: message.to_string(),
    }
}

type Outcome = Result<i32, Failure>;

/// Parse arguments, run the command and return the exit code. Normal output
/// goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Measures(a) => measures(a, out),
        Command::Predict(a) => predict(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Datasets => datasets(out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(data)?;
    Ok(EXIT_OK)
}

fn parse_measures(list: &str) -> Result<Vec<MeasureId>, Failure> {
    MeasureId::parse_list(list).map_err(|e| usage(e.to_string()))
}

fn parse_probability(flag: &str, text: &str) -> Result<f64, Failure> {
    let v = parse_decimal(text).ok_or_else(|| usage(format!("--{flag}: `{text}` is not a plain decimal number")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(usage(format!("--{flag}: {text} is outside [0, 1]")));
    }
    Ok(v)
}

fn parse_confirmation(flag: &str, text: &str) -> Result<f64, Failure> {
    let v = parse_decimal(text).ok_or_else(|| usage(format!("--{flag}: `{text}` is not a plain decimal number")))?;
    if !(-1.0..=1.0).contains(&v) {
        return Err(usage(format!("--{flag}: {text} is outside [-1, 1]")));
    }
    Ok(v)
}

fn analyze(args: AnalyzeArgs, out: &mut dyn Write) -> Outcome {
    let ids = parse_measures(&args.measures)?;
    let options = RenderOptions { percent: args.percent };
    let file: DatasetFile = match (&args.input, &args.dataset) {
        (Some(path), _) => load_dataset(path).map_err(data)?,
        (None, Some(name)) => match builtin(name) {
            Some(Builtin::Stratified(f)) => f,
            Some(Builtin::Flat(tables)) => {
                if args.chart.is_some() {
                    return Err(usage(format!("`{name}` has no groups to chart")));
                }
                let report = FlatReport::build(name, &tables, &ids);
                return emit(out, &report.render(args.format.into(), options));
            }
            None => return Err(usage(format!("unknown dataset `{name}`; run `datasets` for the list"))),
        },
        (None, None) => unreachable!("clap requires one input source"),
    };

    let groups = file.dataset.groups().len();
    let roles = match args.role {
        Some(RoleArg::Confounder) => vec![CausalRole::Confounder],
        Some(RoleArg::Mediator) => vec![CausalRole::Mediator],
        Some(RoleArg::Both) => vec![CausalRole::Confounder, CausalRole::Mediator],
        None if groups >= 2 => {
            return Err(usage(format!(
                "--role confounder|mediator|both is required: the dataset has {groups} groups"
            )))
        }
        None => Vec::new(),
    };

    let report = AnalysisReport::build(&file, &roles, &ids).map_err(data)?;

    if let Some(dir) = &args.chart {
        let role = roles.first().copied().unwrap_or(CausalRole::Mediator);
        let adjusted = do_adjust(&file.dataset, role).map_err(data)?;
        let chart = emit_group_chart(&file.dataset, &adjusted);
        let stem = file.name().to_string();
        for (ext, body) in [("csv", &chart.csv), ("svg", &chart.svg)] {
            let path = dir.join(format!("{stem}-groups.{ext}"));
            std::fs::write(&path, body).map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    emit(out, &report.render(args.format.into(), options))
}

fn measures(args: MeasuresArgs, out: &mut dyn Write) -> Outcome {
    let ids = parse_measures(&args.measures)?;
    let p11 = parse_probability("p11", &args.p11)?;
    let p10 = parse_probability("p10", &args.p10)?;
    let mut table = JointTable::new(p11, p10).map_err(|e| usage(e.to_string()))?;
    if let Some(text) = &args.px1 {
        let px1 = parse_probability("px1", text)?;
        table = table.with_cause_prior(px1).map_err(|e| usage(e.to_string()))?;
    }
    let named = NamedTable {
        name: "input".to_string(),
        table,
        note: None,
    };
    let report = FlatReport::build("command line", &[named], &ids);
    emit(out, &report.render(args.format.into(), RenderOptions { percent: args.percent }))
}

fn key_values(rows: &[(&str, f64)], format: Format) -> String {
    match format {
        Format::Text => {
            let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, v)| format!("{k:width$}  {}\n", format_sig(*v)))
                .collect()
        }
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in rows {
                s.push_str(&format!("\"{k}\",{}\n", format_full(*v)));
            }
            s
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect();
            let mut s = serde_json::to_string_pretty(&map).expect("map serializes");
            s.push('\n');
            s
        }
    }
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> Outcome {
    let format: Format = args.format.into();
    if let Some(text) = &args.cc {
        let cc = parse_confirmation("cc", text)?;
        let px1_text = args.px1.as_deref().expect("clap enforces --px1 with --cc");
        let px1 = parse_probability("px1", px1_text)?;
        if px1 <= 0.0 || px1 >= 1.0 {
            return Err(usage(format!("--px1: {px1_text} must be strictly between 0 and 1")));
        }
        let prior = BinaryDist::new(px1).map_err(|e| usage(e.to_string()))?;
        let posterior = predict_from_cc(cc, prior).map_err(|e| usage(e.to_string()))?;
        return emit(
            out,
            &key_values(&[("P(x1|θ1)", posterior.p_x1()), ("P(x0|θ1)", posterior.p_x0())], format),
        );
    }
    let text = args.ce.as_deref().expect("clap requires --cc or --ce");
    let ce = parse_confirmation("ce", text)?;
    let p = predict_from_ce(ce).map_err(|e| usage(e.to_string()))?;
    emit(out, &key_values(&[("P(y1|θ_x1)", p), ("P(y0|θ_x1)", 1.0 - p)], format))
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let checks = run_checks(args.dataset.as_deref()).map_err(|e| usage(e.to_string()))?;
    let body = match args.format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&checks).expect("checks serialize");
            s.push('\n');
            s
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["dataset", "check", "computed", "expected", "tolerance", "status"])
                .expect("in-memory write");
            for c in &checks {
                w.write_record([
                    c.dataset.to_string(),
                    c.name.clone(),
                    format_full(c.computed),
                    format_full(c.expected),
                    format_full(c.tolerance),
                    c.status.to_string(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        FormatArg::Text => render_text(&checks),
    };
    emit(out, &body)?;
    Ok(if all_passed(&checks) { EXIT_OK } else { EXIT_DATA })
}

fn datasets(out: &mut dyn Write) -> Outcome {
    let width = CATALOG.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let text: String = CATALOG
        .iter()
        .map(|e| format!("{:width$}  {}\n", e.name, e.description))
        .collect();
    emit(out, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("causal-confirm").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn kidney_cc() {
        let (code, out, _) = call(&["analyze", "--dataset", "kidney_stones", "--role", "confounder"]);
        assert_eq!(code, 0);
        assert!(out.contains("x2/x1=>success"), "{out}");
        assert!(out.contains("0.06220"), "{out}");
    }

    #[test]
    fn role_required_for_groups() {
        let (code, _, err) = call(&["analyze", "--dataset", "kidney_stones"]);
        assert_eq!(code, 2);
        assert!(err.contains("--role"));
    }

    #[test]
    fn table_one_measures() {
        let (code, out, _) = call(&["measures", "--p11", "0.9", "--p10", "0.8", "--measures", "pd,delta_star", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.contains(&format!("input,pd,x1/x0=>y1,{},true", (0.9 - 0.8) / 0.9)), "{out}");
        assert!(out.contains("delta_star"));
    }

    #[test]
    fn malformed_numbers_are_usage_errors() {
        for bad in ["0.00034e0", "abc", "1.5", "-0.1", ""] {
            let (code, _, _) = call(&["measures", "--p11", bad, "--p10", "0.1"]);
            assert_eq!(code, 2, "{bad}");
        }
    }

    #[test]
    fn predictions() {
        let (code, out, _) = call(&["predict", "--cc", "0", "--px1", "0.3"]);
        assert_eq!(code, 0);
        assert!(out.contains("0.3000") && out.contains("0.7000"), "{out}");
        let (_, out, _) = call(&["predict", "--ce", "0.5"]);
        assert!(out.contains("0.6667"), "{out}");
        let (_, out, _) = call(&["predict", "--cc", "1", "--px1", "0.1", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["P(x1|θ1)"], 1.0);
        assert_eq!(v["P(x0|θ1)"], 0.0);
        assert_eq!(call(&["predict", "--cc", "0.5"]).0, 2);
        assert_eq!(call(&["predict"]).0, 2);
        assert_eq!(call(&["predict", "--ce", "1.2"]).0, 2);
    }

    #[test]
    fn verify_exit_codes() {
        assert_eq!(call(&["verify", "--dataset", "kidney_stones"]).0, 0);
        assert_eq!(call(&["verify", "--dataset", "nosuch"]).0, 2);
        let (code, out, _) = call(&["verify"]);
        assert!(out.contains("pass (widened tolerance)"));
        assert_eq!(code, 1);
    }

    #[test]
    fn unknown_flags_and_datasets() {
        assert_eq!(call(&["datasets", "--bogus"]).0, 2);
        assert_eq!(call(&["analyze", "--dataset", "nosuch", "--role", "mediator"]).0, 2);
        assert_eq!(call(&["analyze", "--input", "/nonexistent/file.csv", "--role", "mediator"]).0, 1);
        let (code, out, _) = call(&["datasets"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), CATALOG.len());
    }
}

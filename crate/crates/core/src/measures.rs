//! Risk measures, causal confirmation measures and the Bayesian
//! confirmation catalog, all evaluated on a [`JointTable`].
//!
//! Orientation: the treatment `x1` is compared against the reference `x0`
//! and the measured outcome is `y1`. For the Bayesian catalog the evidence
//! `e` is the cause and the hypothesis `h` is the outcome, so for example
//! `D(x1, y1) = P(y1|x1) − P(y1)` and `b*(x1 → y1)` uses `P(x1|y1)` and
//! `P(x1|y0)`. Logarithms are base 2.
//!
//! Degenerate inputs never panic: the result is flagged `defined = false`
//! with value 0 and a note.

use crate::adjust::DoTable;
use crate::tables::{JointTable, TableError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("outcome marginal P({0}) is 0")]
    DegenerateOutcome(String),
    #[error("marginal {0} is degenerate")]
    DegenerateMarginal(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Stable measure identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureId {
    #[serde(rename = "f")]
    F,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "z")]
    Z,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "n")]
    N,
    #[serde(rename = "l")]
    L,
    #[serde(rename = "fko")]
    Fko,
    #[serde(rename = "bstar")]
    BStar,
    #[serde(rename = "cstar")]
    CStar,
    #[serde(rename = "rd")]
    Rd,
    #[serde(rename = "rr")]
    Rr,
    #[serde(rename = "pd")]
    Pd,
    #[serde(rename = "delta_star")]
    DeltaStar,
    #[serde(rename = "or")]
    Or,
    #[serde(rename = "or_n")]
    OrN,
    #[serde(rename = "cc")]
    Cc,
    #[serde(rename = "ce")]
    Ce,
}

impl MeasureId {
    /// The full catalog, in report order.
    pub const ALL: [MeasureId; 20] = [
        MeasureId::F,
        MeasureId::D,
        MeasureId::M,
        MeasureId::R,
        MeasureId::C,
        MeasureId::Z,
        MeasureId::S,
        MeasureId::N,
        MeasureId::L,
        MeasureId::Fko,
        MeasureId::BStar,
        MeasureId::CStar,
        MeasureId::Rd,
        MeasureId::Rr,
        MeasureId::Pd,
        MeasureId::DeltaStar,
        MeasureId::Or,
        MeasureId::OrN,
        MeasureId::Cc,
        MeasureId::Ce,
    ];

    /// The Bayesian confirmation catalog.
    pub const BAYESIAN: [MeasureId; 12] = [
        MeasureId::F,
        MeasureId::D,
        MeasureId::M,
        MeasureId::R,
        MeasureId::C,
        MeasureId::Z,
        MeasureId::S,
        MeasureId::N,
        MeasureId::L,
        MeasureId::Fko,
        MeasureId::BStar,
        MeasureId::CStar,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureId::F => "f",
            MeasureId::D => "d",
            MeasureId::M => "m",
            MeasureId::R => "r",
            MeasureId::C => "c",
            MeasureId::Z => "z",
            MeasureId::S => "s",
            MeasureId::N => "n",
            MeasureId::L => "l",
            MeasureId::Fko => "fko",
            MeasureId::BStar => "bstar",
            MeasureId::CStar => "cstar",
            MeasureId::Rd => "rd",
            MeasureId::Rr => "rr",
            MeasureId::Pd => "pd",
            MeasureId::DeltaStar => "delta_star",
            MeasureId::Or => "or",
            MeasureId::OrN => "or_n",
            MeasureId::Cc => "cc",
            MeasureId::Ce => "ce",
        }
    }

    /// Measures that depend on the cause marginal `P(x)` and not only on
    /// the channel `P(y|x)`.
    pub fn needs_cause_prior(&self) -> bool {
        matches!(
            self,
            MeasureId::D
                | MeasureId::M
                | MeasureId::R
                | MeasureId::C
                | MeasureId::Z
                | MeasureId::N
                | MeasureId::L
                | MeasureId::Fko
                | MeasureId::BStar
        )
    }

    /// Measures whose values are confined to `[-1, 1]`.
    pub fn is_normalized(&self) -> bool {
        matches!(
            self,
            MeasureId::Cc
                | MeasureId::Ce
                | MeasureId::BStar
                | MeasureId::CStar
                | MeasureId::Z
                | MeasureId::Fko
                | MeasureId::OrN
        )
    }

    /// Parse a comma-separated list; `all` expands to [`MeasureId::ALL`].
    pub fn parse_list(list: &str) -> Result<Vec<MeasureId>, MeasureError> {
        let mut out: Vec<MeasureId> = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                for id in MeasureId::ALL {
                    if !out.contains(&id) {
                        out.push(id);
                    }
                }
                continue;
            }
            let id: MeasureId = item.parse()?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureId {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| MeasureError::UnknownMeasure(s.to_string()))
    }
}

/// Serializes non-finite values as the strings `"inf"` / `"-inf"` / `"nan"`.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad number `{other}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub id: MeasureId,
    #[serde(with = "extended_f64")]
    pub value: f64,
    /// The rule evaluated, e.g. `x2/x1=>y1`.
    pub direction: String,
    pub defined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MeasureResult {
    fn ok(id: MeasureId, value: f64, table: &JointTable) -> Self {
        MeasureResult {
            id,
            value,
            direction: direction(id, table),
            defined: true,
            note: None,
        }
    }

    fn undefined(id: MeasureId, table: &JointTable, note: impl Into<String>) -> Self {
        MeasureResult {
            id,
            value: 0.0,
            direction: direction(id, table),
            defined: false,
            note: Some(note.into()),
        }
    }

    fn from_option(id: MeasureId, value: Option<f64>, table: &JointTable, note: &str) -> Self {
        match value {
            Some(v) => MeasureResult::ok(id, v, table),
            None => MeasureResult::undefined(id, table, note),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn direction(id: MeasureId, t: &JointTable) -> String {
    let (x1, x0, y1) = (&t.label_x1, &t.label_x0, &t.label_y1);
    match id {
        MeasureId::Rd
        | MeasureId::Rr
        | MeasureId::Pd
        | MeasureId::DeltaStar
        | MeasureId::Or
        | MeasureId::OrN
        | MeasureId::Cc => format!("{x1}/{x0}=>{y1}"),
        MeasureId::Ce | MeasureId::F => format!("{x1}=>{y1}"),
        MeasureId::BStar | MeasureId::CStar => format!("{x1}->{y1}"),
        _ => format!("({x1},{y1})"),
    }
}

/// `(a − b) / max(a, b)`, the normalized difference behind Cc, b* and c*.
/// `None` when both are zero.
pub fn normalized_difference(a: f64, b: f64) -> Option<f64> {
    let m = a.max(b);
    if m > 0.0 {
        Some((a - b) / m)
    } else {
        None
    }
}

/// `(r − 1) / max(r, 1)` for a ratio that may be infinite.
pub fn normalized_ratio(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        (r - 1.0) / r.max(1.0)
    }
}

/// `Cc = (P(y1|x1) − P(y1|x0)) / max(P(y1|x1), P(y1|x0))`.
pub fn cc_value(p_y1_given_x1: f64, p_y1_given_x0: f64) -> Option<f64> {
    normalized_difference(p_y1_given_x1, p_y1_given_x0)
}

/// `Ce = (2 P(y1|x1) − 1) / max(P(y1|x1), P(y0|x1))`.
pub fn ce_value(p_y1_given_x1: f64, p_y0_given_x1: f64) -> f64 {
    (p_y1_given_x1 - p_y0_given_x1) / p_y1_given_x1.max(p_y0_given_x1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskMeasures {
    pub rd: MeasureResult,
    pub rr: MeasureResult,
    pub pd: MeasureResult,
    pub delta_star: MeasureResult,
}

pub fn risk_measures(table: &JointTable) -> RiskMeasures {
    let (p1, p0) = (table.p_y1_given_x1(), table.p_y1_given_x0());
    let both_zero = p1 == 0.0 && p0 == 0.0;

    let rd = MeasureResult::ok(MeasureId::Rd, p1 - p0, table);
    let rr = if both_zero {
        MeasureResult::undefined(MeasureId::Rr, table, "both rates are 0")
    } else if p0 == 0.0 {
        MeasureResult::ok(MeasureId::Rr, f64::INFINITY, table)
    } else {
        MeasureResult::ok(MeasureId::Rr, p1 / p0, table)
    };
    let pd = if both_zero {
        MeasureResult::undefined(MeasureId::Pd, table, "both rates are 0")
    } else if p0 == 0.0 {
        MeasureResult::ok(MeasureId::Pd, 1.0, table)
    } else {
        MeasureResult::ok(MeasureId::Pd, ((p1 - p0) / p1).max(0.0), table)
    };
    let delta_star = if p0 == 1.0 {
        MeasureResult::undefined(MeasureId::DeltaStar, table, "reference rate is 1")
    } else {
        MeasureResult::ok(MeasureId::DeltaStar, (p1 - p0) / (1.0 - p0), table)
    };
    RiskMeasures { rd, rr, pd, delta_star }
}

pub fn causal_confirmation_cc(table: &JointTable) -> MeasureResult {
    MeasureResult::from_option(
        MeasureId::Cc,
        cc_value(table.p_y1_given_x1(), table.p_y1_given_x0()),
        table,
        "both rates are 0",
    )
}

pub fn causal_confirmation_ce(table: &JointTable) -> MeasureResult {
    MeasureResult::ok(
        MeasureId::Ce,
        ce_value(table.p_y1_given_x1(), table.p_y0_given_x1()),
        table,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsMeasures {
    pub or: MeasureResult,
    pub or_n: MeasureResult,
}

pub fn odds_measures(table: &JointTable) -> OddsMeasures {
    let num = table.p_y1_given_x1() * table.p_y0_given_x0();
    let den = table.p_y1_given_x0() * table.p_y0_given_x1();
    let ratio = if den > 0.0 {
        Some(num / den)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    };
    match ratio {
        Some(r) => OddsMeasures {
            or: MeasureResult::ok(MeasureId::Or, r, table),
            or_n: MeasureResult::ok(MeasureId::OrN, normalized_ratio(r), table),
        },
        None => OddsMeasures {
            or: MeasureResult::undefined(MeasureId::Or, table, "odds ratio is 0/0"),
            or_n: MeasureResult::undefined(MeasureId::OrN, table, "odds ratio is 0/0"),
        },
    }
}

/// Quantities shared by the Bayesian catalog.
struct Association {
    p1: f64,
    p0: f64,
    px1: f64,
    py1: f64,
    /// `P(x1|y1)`, `P(x1|y0)`.
    px1_y1: Option<f64>,
    px1_y0: Option<f64>,
}

impl Association {
    fn of(table: &JointTable) -> Self {
        Association {
            p1: table.p_y1_given_x1(),
            p0: table.p_y1_given_x0(),
            px1: table.cause_prior(),
            py1: table.outcome_marginals()[0],
            px1_y1: table.inverse_conditional(0, 0),
            px1_y0: table.inverse_conditional(0, 1),
        }
    }
}

fn log2_ratio(a: f64, b: f64) -> Option<f64> {
    if a > 0.0 && b > 0.0 {
        Some((a / b).log2())
    } else {
        None
    }
}

fn bayesian_measure(id: MeasureId, table: &JointTable) -> MeasureResult {
    let a = Association::of(table);
    let no_y1 = "outcome marginal P(y1) is 0";
    let no_y0 = "outcome marginal P(y0) is 0";
    let result = match id {
        MeasureId::F => MeasureResult::ok(id, a.p1, table),
        MeasureId::D => MeasureResult::ok(id, a.p1 - a.py1, table),
        MeasureId::M => MeasureResult::from_option(id, a.px1_y1.map(|v| v - a.px1), table, no_y1),
        MeasureId::R => MeasureResult::from_option(id, log2_ratio(a.p1, a.py1), table, "log of 0"),
        MeasureId::C => MeasureResult::ok(id, a.px1 * a.p1 - a.px1 * a.py1, table),
        MeasureId::Z => {
            let diff = a.p1 - a.py1;
            let value = if diff >= 0.0 {
                (a.py1 < 1.0).then(|| diff / (1.0 - a.py1))
            } else {
                (a.py1 > 0.0).then(|| diff / a.py1)
            };
            MeasureResult::from_option(id, value, table, "outcome marginal is degenerate")
        }
        MeasureId::S => MeasureResult::ok(id, a.p1 - a.p0, table),
        MeasureId::N => match (a.px1_y1, a.px1_y0) {
            (Some(u), Some(v)) => MeasureResult::ok(id, u - v, table),
            (None, _) => MeasureResult::undefined(id, table, no_y1),
            _ => MeasureResult::undefined(id, table, no_y0),
        },
        MeasureId::L => {
            let v = a.px1_y1.zip(a.px1_y0).and_then(|(u, v)| log2_ratio(u, v));
            MeasureResult::from_option(id, v, table, "likelihood ratio is 0 or undefined")
        }
        MeasureId::Fko => {
            let v = a.px1_y1.zip(a.px1_y0).and_then(|(u, v)| {
                let s = u + v;
                (s > 0.0).then(|| (u - v) / s)
            });
            MeasureResult::from_option(id, v, table, "both likelihoods are 0 or undefined")
        }
        MeasureId::BStar => {
            let v = a
                .px1_y1
                .zip(a.px1_y0)
                .and_then(|(u, v)| normalized_difference(u, v));
            MeasureResult::from_option(id, v, table, "both likelihoods are 0 or undefined")
        }
        MeasureId::CStar => MeasureResult::ok(id, ce_value(a.p1, table.p_y0_given_x1()), table),
        _ => unreachable!("not a Bayesian measure: {id}"),
    };
    if id.needs_cause_prior() && table.declared_cause_prior().is_none() {
        let note = match &result.note {
            Some(n) => format!("{n}; default P(x1)=0.5"),
            None => "default P(x1)=0.5".to_string(),
        };
        result.with_note(note)
    } else {
        result
    }
}

/// The twelve Bayesian confirmation measures, in catalog order.
pub fn bayesian_suite(table: &JointTable) -> Vec<MeasureResult> {
    MeasureId::BAYESIAN
        .iter()
        .map(|&id| bayesian_measure(id, table))
        .collect()
}

/// Evaluate one measure on an observed table.
pub fn evaluate(id: MeasureId, table: &JointTable) -> MeasureResult {
    match id {
        MeasureId::Rd => risk_measures(table).rd,
        MeasureId::Rr => risk_measures(table).rr,
        MeasureId::Pd => risk_measures(table).pd,
        MeasureId::DeltaStar => risk_measures(table).delta_star,
        MeasureId::Or => odds_measures(table).or,
        MeasureId::OrN => odds_measures(table).or_n,
        MeasureId::Cc => causal_confirmation_cc(table),
        MeasureId::Ce => causal_confirmation_ce(table),
        _ => bayesian_measure(id, table),
    }
}

/// The interventional rates as a table without a cause prior.
pub fn do_table_as_joint(table: &DoTable) -> JointTable {
    let (t, r) = (table.treatment(), table.reference);
    JointTable::new(table.rates[t], table.rates[r])
        .expect("do-adjusted rates are probabilities")
        .with_cause_labels(table.causes[t].clone(), table.causes[r].clone())
}

/// Evaluate one measure on interventional rates. Measures that need a cause
/// marginal are reported undefined, since `P(do(x))` is not a distribution.
pub fn evaluate_interventional(id: MeasureId, table: &DoTable) -> MeasureResult {
    let joint = do_table_as_joint(table);
    if id.needs_cause_prior() {
        MeasureResult::undefined(id, &joint, "needs P(x); undefined under intervention")
    } else {
        evaluate(id, &joint)
    }
}

/// `m(x_i, y_j) = P(y_j|x_i) / P(y_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    /// Same indexing as [`JointTable::conditional`].
    pub m: [[f64; 2]; 2],
}

impl CorrelationMatrix {
    pub fn get(&self, cause: usize, outcome: usize) -> f64 {
        self.m[cause][outcome]
    }

    /// Cc from the coupling: `(m(x1,y1) − m(x0,y1)) / max(m(x1,y1), m(x0,y1))`.
    pub fn cc(&self) -> Option<f64> {
        normalized_difference(self.m[0][0], self.m[1][0])
    }

    /// Optimal degree of disbelief `m(x0,y1) / m(x1,y1)` of `x1 ⇒ y1`.
    pub fn disbelief(&self) -> Option<f64> {
        (self.m[0][0] > 0.0).then(|| self.m[1][0] / self.m[0][0])
    }
}

pub fn correlation_matrix(table: &JointTable) -> Result<CorrelationMatrix, MeasureError> {
    let py = table.outcome_marginals();
    for (j, label) in [&table.label_y1, &table.label_y0].into_iter().enumerate() {
        if !(py[j] > 0.0) {
            return Err(MeasureError::DegenerateOutcome(label.clone()));
        }
    }
    let mut m = [[0.0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = table.conditional(i, j) / py[j];
        }
    }
    Ok(CorrelationMatrix { m })
}

/// Conditionals predicted from a coupling and the two marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    /// `P(y_j | x_i)`, indexed `[i][j]`.
    pub outcome_given_cause: [[f64; 2]; 2],
    /// `P(x_i | y_j)`, indexed `[j][i]`.
    pub cause_given_outcome: [[f64; 2]; 2],
}

/// `P(y|x) = P(y) m(x,y) / Σ_y P(y) m(x,y)` and symmetrically for `P(x|y)`.
pub fn predict_with_correlation(
    m: &CorrelationMatrix,
    p_x1: f64,
    p_y1: f64,
) -> Result<Predictions, MeasureError> {
    for (name, p) in [("P(x1)", p_x1), ("P(y1)", p_y1)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(MeasureError::DegenerateMarginal(name.into()));
        }
    }
    let px = [p_x1, 1.0 - p_x1];
    let py = [p_y1, 1.0 - p_y1];
    let mut out = Predictions {
        outcome_given_cause: [[0.0; 2]; 2],
        cause_given_outcome: [[0.0; 2]; 2],
    };
    for i in 0..2 {
        let norm: f64 = (0..2).map(|j| py[j] * m.m[i][j]).sum();
        if !(norm > 0.0) {
            return Err(MeasureError::DegenerateMarginal(format!("m(x{})", 1 - i)));
        }
        for j in 0..2 {
            out.outcome_given_cause[i][j] = py[j] * m.m[i][j] / norm;
        }
    }
    for j in 0..2 {
        let norm: f64 = (0..2).map(|i| px[i] * m.m[i][j]).sum();
        if !(norm > 0.0) {
            return Err(MeasureError::DegenerateMarginal(format!("m(y{})", 1 - j)));
        }
        for i in 0..2 {
            out.cause_given_outcome[j][i] = px[i] * m.m[i][j] / norm;
        }
    }
    Ok(out)
}

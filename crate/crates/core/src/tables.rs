//! Data model for binary-cause / binary-outcome data.
//!
//! A [`JointTable`] is a flat 2×2 table: the outcome rate under a treatment
//! cause `x1` and under a reference cause `x0`, plus an optional cause
//! marginal `P(x1)`. A [`StratifiedDataset`] holds the same comparison split
//! by a third variable (the groups `g`), either as raw counts or as rates
//! with their within-cause group weights `P(g|x)`.
//!
//! Cause pairs follow a default-first convention: unless told otherwise, the
//! first cause seen is the reference (`x0`) and the second one is the
//! treatment (`x1`) whose effect is measured against it.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Default tolerance on probability-vector sums for rate-shaped input.
pub const DEFAULT_SUM_TOLERANCE: f64 = 1e-6;

/// Default cause marginal when none is known.
pub const DEFAULT_CAUSE_PRIOR: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("probability `{name}` = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: String, value: f64 },
    #[error("duplicate cell for group `{group}`, cause `{cause}`")]
    DuplicateCell { group: String, cause: String },
    #[error("group `{group}` has no cell for cause `{cause}`")]
    MissingCell { group: String, cause: String },
    #[error("invalid count for group `{group}`, cause `{cause}`: {successes} successes out of {total}")]
    InvalidCount {
        group: String,
        cause: String,
        successes: u64,
        total: u64,
    },
    #[error("rate {rate} for group `{group}`, cause `{cause}` is outside [0, 1]")]
    RateOutOfRange {
        group: String,
        cause: String,
        rate: f64,
    },
    #[error("{what} sums to {sum}, expected 1 (tolerance {tolerance})")]
    WeightSumViolation {
        what: String,
        sum: f64,
        tolerance: f64,
    },
    #[error("negative weight {weight} for group `{group}`, cause `{cause}`")]
    NegativeWeight {
        group: String,
        cause: String,
        weight: f64,
    },
    #[error("expected exactly two causes, found {found}: {causes:?}")]
    CauseCount { found: usize, causes: Vec<String> },
    #[error("unknown cause `{0}`")]
    UnknownCause(String),
    #[error("unknown group `{0}` in group prior")]
    UnknownGroup(String),
    #[error("dataset has no groups")]
    Empty,
    #[error("outcome marginal P({0}) is degenerate, the table cannot be transposed")]
    DegenerateOutcome(String),
}

fn check_probability(name: &str, value: f64) -> Result<f64, TableError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(TableError::ProbabilityOutOfRange {
            name: name.to_string(),
            value,
        })
    }
}

/// Flat 2×2 table `P(y|x)` with an optional cause marginal.
///
/// Conditionals are stored for both outcomes so that swapping the outcome
/// labels is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    /// `cond[i][j]`: i = 0 treatment `x1`, 1 reference `x0`; j = 0 `y1`, 1 `y0`.
    cond: [[f64; 2]; 2],
    p_x1: Option<f64>,
    pub label_x1: String,
    pub label_x0: String,
    pub label_y1: String,
    pub label_y0: String,
}

impl JointTable {
    pub fn new(p_y1_given_x1: f64, p_y1_given_x0: f64) -> Result<Self, TableError> {
        check_probability("P(y1|x1)", p_y1_given_x1)?;
        check_probability("P(y1|x0)", p_y1_given_x0)?;
        Ok(JointTable {
            cond: [
                [p_y1_given_x1, 1.0 - p_y1_given_x1],
                [p_y1_given_x0, 1.0 - p_y1_given_x0],
            ],
            p_x1: None,
            label_x1: "x1".into(),
            label_x0: "x0".into(),
            label_y1: "y1".into(),
            label_y0: "y0".into(),
        })
    }

    pub fn with_cause_prior(mut self, p_x1: f64) -> Result<Self, TableError> {
        self.p_x1 = Some(check_probability("P(x1)", p_x1)?);
        Ok(self)
    }

    pub fn with_cause_labels(mut self, x1: impl Into<String>, x0: impl Into<String>) -> Self {
        self.label_x1 = x1.into();
        self.label_x0 = x0.into();
        self
    }

    pub fn with_outcome_labels(mut self, y1: impl Into<String>, y0: impl Into<String>) -> Self {
        self.label_y1 = y1.into();
        self.label_y0 = y0.into();
        self
    }

    pub fn p_y1_given_x1(&self) -> f64 {
        self.cond[0][0]
    }

    pub fn p_y1_given_x0(&self) -> f64 {
        self.cond[1][0]
    }

    pub fn p_y0_given_x1(&self) -> f64 {
        self.cond[0][1]
    }

    pub fn p_y0_given_x0(&self) -> f64 {
        self.cond[1][1]
    }

    /// Conditional `P(y_j | x_i)` with 0 = `x1`/`y1`, 1 = `x0`/`y0`.
    pub fn conditional(&self, cause: usize, outcome: usize) -> f64 {
        self.cond[cause][outcome]
    }

    /// The declared cause marginal, if any.
    pub fn declared_cause_prior(&self) -> Option<f64> {
        self.p_x1
    }

    /// `P(x1)`, falling back to [`DEFAULT_CAUSE_PRIOR`].
    pub fn cause_prior(&self) -> f64 {
        self.p_x1.unwrap_or(DEFAULT_CAUSE_PRIOR)
    }

    /// `[P(x1), P(x0)]`.
    pub fn cause_marginals(&self) -> [f64; 2] {
        let q = self.cause_prior();
        [q, 1.0 - q]
    }

    /// Joint `P(x_i, y_j)` with the same indexing as [`JointTable::conditional`].
    pub fn joint(&self) -> [[f64; 2]; 2] {
        let px = self.cause_marginals();
        [
            [px[0] * self.cond[0][0], px[0] * self.cond[0][1]],
            [px[1] * self.cond[1][0], px[1] * self.cond[1][1]],
        ]
    }

    /// `[P(y1), P(y0)]`.
    pub fn outcome_marginals(&self) -> [f64; 2] {
        let j = self.joint();
        [j[0][0] + j[1][0], j[0][1] + j[1][1]]
    }

    /// `P(x_i | y_j)` by Bayes inversion; `None` when `P(y_j) = 0`.
    pub fn inverse_conditional(&self, cause: usize, outcome: usize) -> Option<f64> {
        let py = self.outcome_marginals()[outcome];
        if py > 0.0 {
            Some(self.joint()[cause][outcome] / py)
        } else {
            None
        }
    }

    /// Exchange the roles of treatment and reference.
    pub fn swap_causes(&self) -> JointTable {
        JointTable {
            cond: [self.cond[1], self.cond[0]],
            p_x1: self.p_x1.map(|q| 1.0 - q),
            label_x1: self.label_x0.clone(),
            label_x0: self.label_x1.clone(),
            label_y1: self.label_y1.clone(),
            label_y0: self.label_y0.clone(),
        }
    }

    /// Exchange the outcome labels, so measures are evaluated for `y0`.
    pub fn swap_outcomes(&self) -> JointTable {
        JointTable {
            cond: [
                [self.cond[0][1], self.cond[0][0]],
                [self.cond[1][1], self.cond[1][0]],
            ],
            p_x1: self.p_x1,
            label_x1: self.label_x1.clone(),
            label_x0: self.label_x0.clone(),
            label_y1: self.label_y0.clone(),
            label_y0: self.label_y1.clone(),
        }
    }

    /// The association read the other way round: outcomes become causes.
    ///
    /// The result has `P(x1)' = P(y1)` and `P(y1|x1)' = P(x1|y1)`.
    pub fn transpose(&self) -> Result<JointTable, TableError> {
        let py = self.outcome_marginals();
        if !(py[0] > 0.0 && py[1] > 0.0) {
            return Err(TableError::DegenerateOutcome(self.label_y1.clone()));
        }
        let j = self.joint();
        let a = j[0][0] / py[0];
        let b = j[0][1] / py[1];
        Ok(JointTable {
            cond: [[a, 1.0 - a], [b, 1.0 - b]],
            p_x1: Some(py[0]),
            label_x1: self.label_y1.clone(),
            label_x0: self.label_y0.clone(),
            label_y1: self.label_x1.clone(),
            label_y0: self.label_x0.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    Counts,
    Rates,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schema::Counts => f.write_str("counts"),
            Schema::Rates => f.write_str("rates"),
        }
    }
}

/// Role of the stratifying variable in the causal structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalRole {
    /// Affects both cause and outcome; groups are reweighted by `P(g)`.
    Confounder,
    /// Lies on the path from cause to outcome; pooled rates are causal.
    Mediator,
}

impl fmt::Display for CausalRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalRole::Confounder => f.write_str("confounder"),
            CausalRole::Mediator => f.write_str("mediator"),
        }
    }
}

impl std::str::FromStr for CausalRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "confounder" => Ok(CausalRole::Confounder),
            "mediator" => Ok(CausalRole::Mediator),
            other => Err(format!("unknown role `{other}` (expected confounder|mediator)")),
        }
    }
}

/// One (group, cause) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    /// Exact ratio; converted to floating point only when read.
    Count { successes: u64, total: u64 },
    /// Outcome rate and the group's share `P(g|x)` within the cause.
    Rate { rate: f64, weight: f64 },
}

impl Cell {
    pub fn rate(&self) -> f64 {
        match *self {
            Cell::Count { successes, total } => successes as f64 / total as f64,
            Cell::Rate { rate, .. } => rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub label: String,
    /// Indexed like [`StratifiedDataset::causes`].
    pub cells: [Cell; 2],
}

/// Where a dataset's group prior `P(g)` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSource {
    /// Pooled group totals over the grand total.
    Counts,
    /// Given explicitly by the caller.
    Supplied,
    /// Averaged from the per-cause weights using the cause marginals.
    Derived,
}

/// Outcome rates of two causes, split by the groups of a third variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedDataset {
    causes: [String; 2],
    reference: usize,
    groups: Vec<GroupRecord>,
    schema: Schema,
    group_prior: Vec<f64>,
    prior_source: PriorSource,
    cause_prior: Option<[f64; 2]>,
}

/// Collects group and cause labels in first-seen order.
struct CellGrid<C> {
    groups: Vec<String>,
    causes: Vec<String>,
    cells: HashMap<(usize, usize), C>,
}

impl<C: Copy> CellGrid<C> {
    fn new() -> Self {
        CellGrid {
            groups: Vec::new(),
            causes: Vec::new(),
            cells: HashMap::new(),
        }
    }

    fn insert(&mut self, group: &str, cause: &str, cell: C) -> Result<(), TableError> {
        let gi = index_of(&mut self.groups, group);
        let ci = index_of(&mut self.causes, cause);
        if self.cells.insert((gi, ci), cell).is_some() {
            return Err(TableError::DuplicateCell {
                group: group.to_string(),
                cause: cause.to_string(),
            });
        }
        Ok(())
    }

    fn into_records(self, wrap: impl Fn(C) -> Cell) -> Result<([String; 2], Vec<GroupRecord>), TableError> {
        if self.groups.is_empty() {
            return Err(TableError::Empty);
        }
        if self.causes.len() != 2 {
            return Err(TableError::CauseCount {
                found: self.causes.len(),
                causes: self.causes,
            });
        }
        let mut records = Vec::with_capacity(self.groups.len());
        for (gi, label) in self.groups.iter().enumerate() {
            let mut cells = [None, None];
            for (ci, slot) in cells.iter_mut().enumerate() {
                *slot = self.cells.get(&(gi, ci)).copied().map(&wrap);
                if slot.is_none() {
                    return Err(TableError::MissingCell {
                        group: label.clone(),
                        cause: self.causes[ci].clone(),
                    });
                }
            }
            records.push(GroupRecord {
                label: label.clone(),
                cells: [cells[0].unwrap(), cells[1].unwrap()],
            });
        }
        let causes = [self.causes[0].clone(), self.causes[1].clone()];
        Ok((causes, records))
    }
}

fn index_of(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|s| s == name) {
        Some(i) => i,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

fn check_sum(what: String, sum: f64, tolerance: f64) -> Result<(), TableError> {
    if (sum - 1.0).abs() <= tolerance {
        Ok(())
    } else {
        Err(TableError::WeightSumViolation { what, sum, tolerance })
    }
}

/// Options for rate-shaped input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesOptions {
    /// Allowed deviation from 1 of the weight and prior sums.
    pub sum_tolerance: f64,
    /// Cause marginals `[P(first cause), P(second cause)]`, if known.
    pub cause_prior: Option<[f64; 2]>,
}

impl Default for RatesOptions {
    fn default() -> Self {
        RatesOptions {
            sum_tolerance: DEFAULT_SUM_TOLERANCE,
            cause_prior: None,
        }
    }
}

impl StratifiedDataset {
    /// Build from `(group, cause, successes, total)` rows.
    pub fn from_counts<S: AsRef<str>>(rows: &[(S, S, u64, u64)]) -> Result<Self, TableError> {
        let mut grid = CellGrid::new();
        for (group, cause, successes, total) in rows {
            let (group, cause) = (group.as_ref(), cause.as_ref());
            if *total == 0 || successes > total {
                return Err(TableError::InvalidCount {
                    group: group.to_string(),
                    cause: cause.to_string(),
                    successes: *successes,
                    total: *total,
                });
            }
            grid.insert(group, cause, (*successes, *total))?;
        }
        let (causes, groups) =
            grid.into_records(|(successes, total)| Cell::Count { successes, total })?;

        let grand: u64 = groups.iter().map(group_total).sum();
        let group_prior = groups
            .iter()
            .map(|g| group_total(g) as f64 / grand as f64)
            .collect();
        Ok(StratifiedDataset {
            causes,
            reference: 0,
            groups,
            schema: Schema::Counts,
            group_prior,
            prior_source: PriorSource::Counts,
            cause_prior: None,
        })
    }

    /// Build from `(group, cause, rate, weight)` rows, where `weight` is
    /// `P(g|x)`. `group_prior` supplies `P(g)` by group label.
    pub fn from_rates<S: AsRef<str>>(
        rows: &[(S, S, f64, f64)],
        group_prior: Option<&[(S, f64)]>,
        options: RatesOptions,
    ) -> Result<Self, TableError> {
        let mut grid = CellGrid::new();
        for (group, cause, rate, weight) in rows {
            let (group, cause) = (group.as_ref(), cause.as_ref());
            if !(0.0..=1.0).contains(rate) {
                return Err(TableError::RateOutOfRange {
                    group: group.to_string(),
                    cause: cause.to_string(),
                    rate: *rate,
                });
            }
            if !(*weight >= 0.0) {
                return Err(TableError::NegativeWeight {
                    group: group.to_string(),
                    cause: cause.to_string(),
                    weight: *weight,
                });
            }
            grid.insert(group, cause, (*rate, *weight))?;
        }
        let (causes, groups) = grid.into_records(|(rate, weight)| Cell::Rate { rate, weight })?;

        for (ci, cause) in causes.iter().enumerate() {
            let sum: f64 = groups.iter().map(|g| cell_weight(&g.cells[ci])).sum();
            check_sum(format!("P(g|{cause})"), sum, options.sum_tolerance)?;
        }
        if let Some(prior) = options.cause_prior {
            for (ci, p) in prior.iter().enumerate() {
                check_probability(&format!("P({})", causes[ci]), *p)?;
            }
            check_sum("cause prior".into(), prior[0] + prior[1], options.sum_tolerance)?;
        }

        let (group_prior, prior_source) = match group_prior {
            Some(entries) => {
                let mut prior = vec![None; groups.len()];
                for (label, p) in entries {
                    let label = label.as_ref();
                    let gi = groups
                        .iter()
                        .position(|g| g.label == label)
                        .ok_or_else(|| TableError::UnknownGroup(label.to_string()))?;
                    prior[gi] = Some(check_probability(&format!("P({label})"), *p)?);
                }
                let prior: Vec<f64> = prior
                    .into_iter()
                    .zip(&groups)
                    .map(|(p, g)| {
                        p.ok_or_else(|| TableError::MissingCell {
                            group: g.label.clone(),
                            cause: "P(g)".into(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                check_sum("P(g)".into(), prior.iter().sum(), options.sum_tolerance)?;
                (prior, PriorSource::Supplied)
            }
            None => {
                let px = options.cause_prior.unwrap_or([DEFAULT_CAUSE_PRIOR; 2]);
                let prior = groups
                    .iter()
                    .map(|g| px[0] * cell_weight(&g.cells[0]) + px[1] * cell_weight(&g.cells[1]))
                    .collect();
                (prior, PriorSource::Derived)
            }
        };

        Ok(StratifiedDataset {
            causes,
            reference: 0,
            groups,
            schema: Schema::Rates,
            group_prior,
            prior_source,
            cause_prior: options.cause_prior,
        })
    }

    /// Make `cause` the reference (`x0`) of every comparison.
    pub fn with_reference(mut self, cause: &str) -> Result<Self, TableError> {
        self.reference = self
            .cause_index(cause)
            .ok_or_else(|| TableError::UnknownCause(cause.to_string()))?;
        Ok(self)
    }

    pub fn cause_index(&self, cause: &str) -> Option<usize> {
        self.causes.iter().position(|c| c == cause)
    }

    /// Cause labels in input order.
    pub fn causes(&self) -> &[String; 2] {
        &self.causes
    }

    /// Index of the reference cause in [`StratifiedDataset::causes`].
    pub fn reference(&self) -> usize {
        self.reference
    }

    /// Index of the treatment cause in [`StratifiedDataset::causes`].
    pub fn treatment(&self) -> usize {
        1 - self.reference
    }

    pub fn groups(&self) -> &[GroupRecord] {
        &self.groups
    }

    pub fn schema(&self) -> Schema {
        self.schema
    }

    pub fn prior_source(&self) -> PriorSource {
        self.prior_source
    }

    /// `P(y1 | x, g)`.
    pub fn rate(&self, group: usize, cause: usize) -> f64 {
        self.groups[group].cells[cause].rate()
    }

    /// `P(g | x)`.
    pub fn weight(&self, group: usize, cause: usize) -> f64 {
        match self.schema {
            Schema::Counts => {
                let total: u64 = self.groups.iter().map(|g| cell_total(&g.cells[cause])).sum();
                cell_total(&self.groups[group].cells[cause]) as f64 / total as f64
            }
            Schema::Rates => cell_weight(&self.groups[group].cells[cause]),
        }
    }

    /// `P(g)` for every group, in group order.
    pub fn group_prior(&self) -> &[f64] {
        &self.group_prior
    }

    /// Cause marginals `P(x)` in cause order, if they are known from the data.
    pub fn cause_marginals(&self) -> Option<[f64; 2]> {
        match self.schema {
            Schema::Counts => {
                let t0: u64 = self.groups.iter().map(|g| cell_total(&g.cells[0])).sum();
                let t1: u64 = self.groups.iter().map(|g| cell_total(&g.cells[1])).sum();
                let grand = (t0 + t1) as f64;
                Some([t0 as f64 / grand, t1 as f64 / grand])
            }
            Schema::Rates => self.cause_prior,
        }
    }

    /// Observed outcome rate of one cause: `Σ_g P(g|x) P(y1|x,g)`.
    pub fn pooled_rate(&self, cause: usize) -> f64 {
        match self.schema {
            Schema::Counts => {
                let (s, t) = self.groups.iter().fold((0u64, 0u64), |(s, t), g| match g.cells[cause] {
                    Cell::Count { successes, total } => (s + successes, t + total),
                    Cell::Rate { .. } => unreachable!("counts schema holds count cells"),
                });
                s as f64 / t as f64
            }
            Schema::Rates => {
                // Renormalised so that rounding in printed weights does not
                // leak into the pooled rate.
                let (num, den) = (0..self.groups.len()).fold((0.0, 0.0), |(n, d), gi| {
                    let w = self.weight(gi, cause);
                    (n + w * self.rate(gi, cause), d + w)
                });
                if den > 0.0 {
                    num / den
                } else {
                    0.0
                }
            }
        }
    }

    /// Observed (unadjusted) comparison of treatment against reference.
    pub fn pool(&self) -> JointTable {
        let (t, r) = (self.treatment(), self.reference);
        let mut table = JointTable::new(self.pooled_rate(t), self.pooled_rate(r))
            .expect("pooled rates are convex combinations of valid rates")
            .with_cause_labels(self.causes[t].clone(), self.causes[r].clone());
        if let Some(px) = self.cause_marginals() {
            table = table
                .with_cause_prior(px[t])
                .expect("cause marginals are probabilities");
        }
        table
    }
}

fn group_total(g: &GroupRecord) -> u64 {
    cell_total(&g.cells[0]) + cell_total(&g.cells[1])
}

fn cell_total(cell: &Cell) -> u64 {
    match cell {
        Cell::Count { total, .. } => *total,
        Cell::Rate { .. } => 0,
    }
}

fn cell_weight(cell: &Cell) -> f64 {
    match cell {
        Cell::Rate { weight, .. } => *weight,
        Cell::Count { .. } => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn kidney() -> StratifiedDataset {
        StratifiedDataset::from_counts(&[
            ("small", "x1", 235, 270),
            ("small", "x2", 81, 87),
            ("large", "x1", 55, 80),
            ("large", "x2", 192, 263),
        ])
        .unwrap()
    }

    #[test]
    fn counts_build_rates_and_priors() {
        let d = kidney();
        assert_eq!(d.schema(), Schema::Counts);
        assert_eq!(d.causes(), &["x1".to_string(), "x2".to_string()]);
        assert_abs_diff_eq!(d.rate(0, 0), 235.0 / 270.0);
        assert_abs_diff_eq!(d.rate(0, 0), 0.87, epsilon = 0.005);
        assert_abs_diff_eq!(d.group_prior()[0], 357.0 / 700.0);
        assert_abs_diff_eq!(d.group_prior()[0], 0.51, epsilon = 1e-12);
        assert_abs_diff_eq!(d.weight(0, 0), 270.0 / 350.0);
        assert_eq!(d.prior_source(), PriorSource::Counts);
    }

    #[test]
    fn pool_reproduces_overall_row() {
        let d = kidney();
        assert_abs_diff_eq!(d.pooled_rate(0), 0.83, epsilon = 0.005);
        assert_abs_diff_eq!(d.pooled_rate(1), 0.78, epsilon = 1e-12);
        let t = d.pool();
        // x1 is the reference by default, so x2 is the treatment
        assert_eq!(t.label_x1, "x2");
        assert_abs_diff_eq!(t.p_y1_given_x1(), 273.0 / 350.0);
        assert_abs_diff_eq!(t.cause_prior(), 0.5);
    }

    #[test]
    fn single_group_degenerates_cleanly() {
        let d = StratifiedDataset::from_counts(&[("all", "a", 3, 10), ("all", "b", 3, 10)]).unwrap();
        assert_eq!(d.group_prior(), &[1.0]);
        assert_eq!(d.rate(0, 0), d.rate(0, 1));
        assert_eq!(d.pooled_rate(0), 0.3);
    }

    #[test]
    fn count_errors() {
        let e = StratifiedDataset::from_counts(&[("g", "x1", 5, 4), ("g", "x2", 1, 4)]).unwrap_err();
        assert!(matches!(e, TableError::InvalidCount { .. }));
        let e = StratifiedDataset::from_counts(&[("g", "x1", 0, 0), ("g", "x2", 1, 4)]).unwrap_err();
        assert!(matches!(e, TableError::InvalidCount { .. }));
        let e = StratifiedDataset::from_counts(&[("g", "x1", 1, 4), ("g", "x1", 1, 4)]).unwrap_err();
        assert!(matches!(e, TableError::DuplicateCell { .. }));
        let e = StratifiedDataset::from_counts(&[
            ("g", "x1", 1, 4),
            ("g", "x2", 1, 4),
            ("h", "x1", 1, 4),
        ])
        .unwrap_err();
        assert_eq!(
            e,
            TableError::MissingCell {
                group: "h".into(),
                cause: "x2".into()
            }
        );
        let e = StratifiedDataset::from_counts(&[
            ("g", "a", 1, 4),
            ("g", "b", 1, 4),
            ("g", "c", 1, 4),
        ])
        .unwrap_err();
        assert!(matches!(e, TableError::CauseCount { found: 3, .. }));
    }

    #[test]
    fn rates_build_and_errors() {
        let rows = [("g", "a", 0.3, 1.0), ("g", "b", 0.9, 1.0)];
        let d = StratifiedDataset::from_rates(&rows, None, RatesOptions::default()).unwrap();
        assert_eq!(d.prior_source(), PriorSource::Derived);
        assert_abs_diff_eq!(d.group_prior()[0], 1.0);

        let rows = [
            ("g", "a", 0.3, 0.4),
            ("h", "a", 0.3, 0.4),
            ("g", "b", 0.9, 0.5),
            ("h", "b", 0.9, 0.5),
        ];
        let e = StratifiedDataset::from_rates(&rows, None, RatesOptions::default()).unwrap_err();
        assert!(matches!(e, TableError::WeightSumViolation { .. }));

        let rows = [("g", "a", 1.3, 1.0), ("g", "b", 0.9, 1.0)];
        let e = StratifiedDataset::from_rates(&rows, None, RatesOptions::default()).unwrap_err();
        assert!(matches!(e, TableError::RateOutOfRange { .. }));
    }

    #[test]
    fn supplied_prior_is_checked() {
        let rows = [
            ("g", "a", 0.1, 0.5),
            ("h", "a", 0.2, 0.5),
            ("g", "b", 0.3, 0.5),
            ("h", "b", 0.4, 0.5),
        ];
        let prior = [("g", 0.3), ("h", 0.7)];
        let d = StratifiedDataset::from_rates(&rows, Some(&prior), RatesOptions::default()).unwrap();
        assert_eq!(d.group_prior(), &[0.3, 0.7]);
        assert_eq!(d.prior_source(), PriorSource::Supplied);

        let prior = [("g", 0.3), ("h", 0.6)];
        assert!(StratifiedDataset::from_rates(&rows, Some(&prior), RatesOptions::default()).is_err());
        let prior = [("g", 0.3), ("zz", 0.7)];
        assert_eq!(
            StratifiedDataset::from_rates(&rows, Some(&prior), RatesOptions::default()).unwrap_err(),
            TableError::UnknownGroup("zz".into())
        );
    }

    #[test]
    fn reference_can_be_changed() {
        let d = kidney().with_reference("x2").unwrap();
        assert_eq!(d.treatment(), 0);
        assert_eq!(d.pool().label_x1, "x1");
        assert!(kidney().with_reference("nope").is_err());
    }

    #[test]
    fn joint_table_views() {
        let t = JointTable::new(0.9, 0.8).unwrap().with_cause_prior(0.5).unwrap();
        assert_abs_diff_eq!(t.outcome_marginals()[0], 0.85, epsilon = 1e-15);
        let s = t.swap_outcomes();
        assert_eq!(s.p_y1_given_x1(), t.p_y0_given_x1());
        assert_eq!(s.swap_outcomes(), t);
        assert_eq!(t.swap_causes().swap_causes(), t);
        let tr = t.transpose().unwrap();
        assert_abs_diff_eq!(tr.cause_prior(), 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.p_y1_given_x1(), 0.45 / 0.85, epsilon = 1e-15);
        assert!(JointTable::new(1.2, 0.1).is_err());
        let det = JointTable::new(1.0, 1.0).unwrap();
        assert!(det.transpose().is_err());
    }
}

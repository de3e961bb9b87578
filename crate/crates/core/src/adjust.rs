//! Causal adjustment of stratified rates and Simpson's paradox detection.
//!
//! Under a confounder the group mix must not depend on the cause, so the
//! per-group rates of both causes are re-pooled with the same weights `P(g)`
//! (standardization). Under a mediator the observed mix `P(g|x)` is part of
//! the effect and the pooled rates are already causal.

use crate::tables::{CausalRole, PriorSource, Schema, StratifiedDataset};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdjustError {
    #[error("no group prior P(g) was supplied for this rates dataset and its cause marginals are unknown")]
    MissingGroupPrior,
    #[error("at least two groups are needed to compare directions, found {0}")]
    TooFewGroups(usize),
    #[error("distribution sums to {0}, expected 1")]
    UnnormalizedDistribution(f64),
    #[error("distribution has a non-finite value or a negative probability")]
    InvalidDistribution,
}

/// Weights applied to one group when pooling, per cause (input order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupWeight {
    pub group: String,
    pub weights: [f64; 2],
}

/// Outcome probabilities under intervention, `P(y1 | do(x))`.
///
/// These are two marginals, one per intervention; no cause prior is
/// attached since `P(do(x1)) + P(do(x0))` has no meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoTable {
    pub causes: [String; 2],
    pub reference: usize,
    /// `P(y1 | do(x))` in cause order.
    pub rates: [f64; 2],
    pub role_used: CausalRole,
    pub weights_used: Vec<GroupWeight>,
}

impl DoTable {
    pub fn treatment(&self) -> usize {
        1 - self.reference
    }

    /// `P(y1 | do(x1))` for the treatment cause.
    pub fn p_y1_do_x1(&self) -> f64 {
        self.rates[self.treatment()]
    }

    /// `P(y1 | do(x0))` for the reference cause.
    pub fn p_y1_do_x0(&self) -> f64 {
        self.rates[self.reference]
    }

    pub fn rate_of(&self, cause: &str) -> Option<f64> {
        self.causes.iter().position(|c| c == cause).map(|i| self.rates[i])
    }
}

/// Compute `P(y1 | do(x))` for both causes under the declared role.
pub fn do_adjust(dataset: &StratifiedDataset, role: CausalRole) -> Result<DoTable, AdjustError> {
    let n = dataset.groups().len();
    let weights_used: Vec<GroupWeight> = match role {
        CausalRole::Confounder => {
            if dataset.schema() == Schema::Rates
                && dataset.prior_source() == PriorSource::Derived
                && dataset.cause_marginals().is_none()
            {
                return Err(AdjustError::MissingGroupPrior);
            }
            let prior = dataset.group_prior();
            let total: f64 = prior.iter().sum();
            dataset
                .groups()
                .iter()
                .zip(prior)
                .map(|(g, p)| GroupWeight {
                    group: g.label.clone(),
                    weights: [p / total, p / total],
                })
                .collect()
        }
        CausalRole::Mediator => {
            let totals = [0, 1].map(|c| (0..n).map(|gi| dataset.weight(gi, c)).sum::<f64>());
            dataset
                .groups()
                .iter()
                .enumerate()
                .map(|(gi, g)| GroupWeight {
                    group: g.label.clone(),
                    weights: [0, 1].map(|c| dataset.weight(gi, c) / totals[c]),
                })
                .collect()
        }
    };

    let rates = match role {
        // Pass-through: identical to the observed pooled rates.
        CausalRole::Mediator => [dataset.pooled_rate(0), dataset.pooled_rate(1)],
        CausalRole::Confounder => [0, 1].map(|c| {
            weights_used
                .iter()
                .enumerate()
                .map(|(gi, w)| w.weights[c] * dataset.rate(gi, c))
                .sum::<f64>()
                .clamp(0.0, 1.0)
        }),
    };

    Ok(DoTable {
        causes: dataset.causes().clone(),
        reference: dataset.reference(),
        rates,
        role_used: role,
        weights_used,
    })
}

/// Sign of `treatment − reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The treatment cause has the higher rate.
    Treatment,
    /// The reference cause has the higher rate.
    Reference,
    Tie,
}

impl Direction {
    pub fn of(treatment: f64, reference: f64) -> Direction {
        match treatment.partial_cmp(&reference) {
            Some(Ordering::Greater) => Direction::Treatment,
            Some(Ordering::Less) => Direction::Reference,
            _ => Direction::Tie,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Treatment => Direction::Reference,
            Direction::Reference => Direction::Treatment,
            Direction::Tie => Direction::Tie,
        }
    }

    /// Name of the favored cause, or `"tie"`.
    pub fn favored<'a>(&self, treatment: &'a str, reference: &'a str) -> &'a str {
        match self {
            Direction::Treatment => treatment,
            Direction::Reference => reference,
            Direction::Tie => "tie",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Treatment => f.write_str("treatment"),
            Direction::Reference => f.write_str("reference"),
            Direction::Tie => f.write_str("tie"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDirection {
    pub group: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub treatment: String,
    pub reference: String,
    pub group_direction: Vec<GroupDirection>,
    /// Every group has the same strict direction.
    pub unanimous: bool,
    pub overall_direction: Direction,
    pub paradox_present: bool,
    /// Direction after confounder adjustment; `None` if no group prior is available.
    pub adjusted_direction: Option<Direction>,
}

impl ParadoxReport {
    /// The shared group direction when unanimous.
    pub fn common_direction(&self) -> Option<Direction> {
        if self.unanimous {
            self.group_direction.first().map(|g| g.direction)
        } else {
            None
        }
    }
}

/// Compare each group's direction with the pooled one.
///
/// A tie in any group breaks unanimity. With fewer than two groups the
/// comparison is vacuous and [`AdjustError::TooFewGroups`] is returned.
pub fn detect_simpson(dataset: &StratifiedDataset) -> Result<ParadoxReport, AdjustError> {
    let n = dataset.groups().len();
    if n < 2 {
        return Err(AdjustError::TooFewGroups(n));
    }
    let (t, r) = (dataset.treatment(), dataset.reference());
    let group_direction: Vec<GroupDirection> = dataset
        .groups()
        .iter()
        .enumerate()
        .map(|(gi, g)| GroupDirection {
            group: g.label.clone(),
            direction: Direction::of(dataset.rate(gi, t), dataset.rate(gi, r)),
        })
        .collect();
    let first = group_direction[0].direction;
    let unanimous = first != Direction::Tie && group_direction.iter().all(|g| g.direction == first);
    let overall_direction = Direction::of(dataset.pooled_rate(t), dataset.pooled_rate(r));
    let paradox_present = unanimous && overall_direction == first.opposite();
    let adjusted_direction = do_adjust(dataset, CausalRole::Confounder)
        .ok()
        .map(|d| Direction::of(d.rates[t], d.rates[r]));

    Ok(ParadoxReport {
        treatment: dataset.causes()[t].clone(),
        reference: dataset.causes()[r].clone(),
        group_direction,
        unanimous,
        overall_direction,
        paradox_present,
        adjusted_direction,
    })
}

/// Probability that an ordered quantity `z` reaches the threshold `z0`:
/// `Σ_{z ≥ z0} p(z)`.
///
/// Applied to a post-intervention distribution `p(z | do(x))` this is the
/// causal posterior probability `P(y1 | do(x))` of the thresholded label.
pub fn threshold_outcome_probability(distribution: &[(f64, f64)], z0: f64) -> Result<f64, AdjustError> {
    if distribution
        .iter()
        .any(|&(z, p)| !z.is_finite() || !p.is_finite() || p < 0.0)
    {
        return Err(AdjustError::InvalidDistribution);
    }
    let total: f64 = distribution.iter().map(|&(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(AdjustError::UnnormalizedDistribution(total));
    }
    Ok(distribution
        .iter()
        .filter(|&&(z, _)| z >= z0)
        .map(|&(_, p)| p)
        .sum())
}

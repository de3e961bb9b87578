#![allow(dead_code)]

use causal_confirm::tables::{JointTable, RatesOptions, StratifiedDataset};
use proptest::prelude::*;

pub const CASES: u32 = 1000;

pub fn config() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

/// A probability, with the endpoints drawn often enough to exercise them.
pub fn probability() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 1 => Just(1.0), 8 => 0.0..=1.0f64]
}

/// A probability strictly inside (0, 1).
pub fn interior() -> impl Strategy<Value = f64> {
    0.001..0.999f64
}

pub fn table() -> impl Strategy<Value = JointTable> {
    (probability(), probability(), interior())
        .prop_map(|(p11, p10, px1)| JointTable::new(p11, p10).unwrap().with_cause_prior(px1).unwrap())
}

/// Per group: (successes, total) for each of the two causes.
pub type CountRow = [(u64, u64); 2];

pub fn count_rows(groups: std::ops::Range<usize>) -> impl Strategy<Value = Vec<CountRow>> {
    let cell = (1u64..400).prop_flat_map(|total| (0..=total, Just(total)));
    prop::collection::vec([cell.clone(), cell], groups)
}

pub fn counts_dataset(rows: &[CountRow]) -> StratifiedDataset {
    let flat: Vec<(String, String, u64, u64)> = rows
        .iter()
        .enumerate()
        .flat_map(|(g, cells)| {
            cells
                .iter()
                .enumerate()
                .map(move |(c, &(s, t))| (format!("g{g}"), format!("x{}", c + 1), s, t))
        })
        .collect();
    StratifiedDataset::from_counts(&flat).unwrap()
}

/// Group rates, weights `P(g|x)` per cause and `P(g)`, all normalized.
#[derive(Debug, Clone)]
pub struct RatesCase {
    pub rates: Vec<[f64; 2]>,
    pub weights: Vec<[f64; 2]>,
    pub prior: Vec<f64>,
}

fn normalize(raw: &[f64]) -> Vec<f64> {
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| v / sum).collect()
}

pub fn rates_case(groups: std::ops::Range<usize>) -> impl Strategy<Value = RatesCase> {
    groups.prop_flat_map(|n| {
        (
            prop::collection::vec([0.0..=1.0f64, 0.0..=1.0f64], n),
            prop::collection::vec(0.01..1.0f64, n),
            prop::collection::vec(0.01..1.0f64, n),
            prop::collection::vec(0.01..1.0f64, n),
        )
            .prop_map(|(rates, w1, w2, prior)| {
                let (w1, w2) = (normalize(&w1), normalize(&w2));
                RatesCase {
                    rates,
                    weights: w1.iter().zip(&w2).map(|(a, b)| [*a, *b]).collect(),
                    prior: normalize(&prior),
                }
            })
    })
}

pub fn rates_dataset(case: &RatesCase) -> StratifiedDataset {
    let rows: Vec<(String, String, f64, f64)> = case
        .rates
        .iter()
        .zip(&case.weights)
        .enumerate()
        .flat_map(|(g, (r, w))| {
            (0..2).map(move |c| (format!("g{g}"), format!("x{}", c + 1), r[c], w[c]))
        })
        .collect();
    let prior: Vec<(String, f64)> = case.prior.iter().enumerate().map(|(g, p)| (format!("g{g}"), *p)).collect();
    StratifiedDataset::from_rates(&rows, Some(&prior), RatesOptions::default()).unwrap()
}

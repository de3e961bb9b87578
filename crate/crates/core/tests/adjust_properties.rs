mod common;

use causal_confirm::adjust::{detect_simpson, do_adjust, Direction};
use causal_confirm::tables::{CausalRole, Cell, StratifiedDataset};
use common::{config, count_rows, counts_dataset, rates_case, rates_dataset, CountRow};
use proptest::prelude::*;

fn unanimous(d: &StratifiedDataset) -> Option<Direction> {
    let p = detect_simpson(d).ok()?;
    p.common_direction()
}

/// Force every group to favor the second cause strictly.
fn favor_second(rows: &[CountRow]) -> Vec<CountRow> {
    rows.iter()
        .map(|&[(s0, t0), (_, _)]| {
            // second cause gets a strictly higher rate with the same total
            let t1 = t0 + 1;
            let s1 = ((s0 as f64 / t0 as f64) * t1 as f64).floor() as u64 + 1;
            [(s0.min(t0 - 1), t0), (s1.min(t1), t1)]
        })
        .collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn pooling_is_convex(rows in count_rows(1..6)) {
        let d = counts_dataset(&rows);
        for c in 0..2 {
            let rates: Vec<f64> = (0..d.groups().len()).map(|g| d.rate(g, c)).collect();
            let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pooled = d.pooled_rate(c);
            prop_assert!(lo - 1e-12 <= pooled && pooled <= hi + 1e-12);
        }
    }

    #[test]
    fn counts_round_trip(rows in count_rows(1..6)) {
        let d = counts_dataset(&rows);
        let totals = [0, 1].map(|c| rows.iter().map(|r| r[c].1).sum::<u64>());
        for (g, r) in rows.iter().enumerate() {
            for c in 0..2 {
                let (s, t) = r[c];
                prop_assert_eq!(d.rate(g, c), s as f64 / t as f64);
                prop_assert_eq!(d.weight(g, c), t as f64 / totals[c] as f64);
                prop_assert_eq!(d.groups()[g].cells[c], Cell::Count { successes: s, total: t });
            }
        }
    }

    #[test]
    fn group_prior_is_mixture_of_weights(rows in count_rows(1..6)) {
        let d = counts_dataset(&rows);
        let px = d.cause_marginals().unwrap();
        for g in 0..d.groups().len() {
            let mixed = px[0] * d.weight(g, 0) + px[1] * d.weight(g, 1);
            prop_assert!((d.group_prior()[g] - mixed).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjustment_preserves_unanimity(rows in count_rows(2..6)) {
        let d = counts_dataset(&favor_second(&rows));
        prop_assert_eq!(unanimous(&d), Some(Direction::Treatment));
        let adj = do_adjust(&d, CausalRole::Confounder).unwrap();
        prop_assert!(adj.p_y1_do_x1() > adj.p_y1_do_x0());
        let report = detect_simpson(&d).unwrap();
        prop_assert_eq!(report.adjusted_direction, Some(Direction::Treatment));
    }

    #[test]
    fn adjustment_preserves_unanimity_for_any_prior(case in rates_case(2..8)) {
        let d = rates_dataset(&case);
        if let Some(dir) = unanimous(&d) {
            let adj = do_adjust(&d, CausalRole::Confounder).unwrap();
            prop_assert_eq!(Direction::of(adj.p_y1_do_x1(), adj.p_y1_do_x0()), dir);
        }
    }

    #[test]
    fn mediator_is_pooling(case in rates_case(1..8)) {
        let d = rates_dataset(&case);
        let adj = do_adjust(&d, CausalRole::Mediator).unwrap();
        for c in 0..2 {
            prop_assert!((adj.rates[c] - d.pooled_rate(c)).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjustment_ignores_group_order(rows in count_rows(1..6), seed in any::<u64>()) {
        let mut shuffled = rows.clone();
        let n = shuffled.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        // labels are assigned by position, so only the data moves
        let a = counts_dataset(&rows);
        let b = counts_dataset(&shuffled);
        for role in [CausalRole::Confounder, CausalRole::Mediator] {
            let (ra, rb) = (do_adjust(&a, role).unwrap(), do_adjust(&b, role).unwrap());
            for c in 0..2 {
                prop_assert!((ra.rates[c] - rb.rates[c]).abs() <= 1e-12);
            }
        }
    }

    /// With the cause independent of the group, the pooled comparison
    /// follows a unanimous group direction, so `P(y1|x1) − P(y1)` does too.
    #[test]
    fn unanimity_carries_to_pooled_when_cause_is_independent(case in rates_case(2..8), px1 in 0.05..0.95f64) {
        let mut case = case;
        case.weights = case.prior.iter().map(|&p| [p, p]).collect();
        let d = rates_dataset(&case);
        if let Some(dir) = unanimous(&d) {
            let table = d.pool().with_cause_prior(px1).unwrap();
            let measure = table.p_y1_given_x1() - table.outcome_marginals()[0];
            prop_assert_eq!(Direction::of(measure, 0.0), dir);
        }
    }
}

#[test]
fn ties_break_unanimity() {
    let d = StratifiedDataset::from_counts(&[
        ("a", "x1", 5, 10),
        ("a", "x2", 5, 10),
        ("b", "x1", 2, 10),
        ("b", "x2", 6, 10),
    ])
    .unwrap();
    let report = detect_simpson(&d).unwrap();
    assert!(!report.unanimous);
    assert!(!report.paradox_present);
}

#[test]
fn one_group_cannot_show_a_paradox() {
    let d = StratifiedDataset::from_counts(&[("only", "x1", 3, 10), ("only", "x2", 4, 10)]).unwrap();
    assert!(detect_simpson(&d).is_err());
}

//! Bundled example datasets.

use crate::ingest::{parse_dataset, DatasetFile};
use crate::tables::JointTable;

const KIDNEY_STONES: &str = include_str!("../data/kidney_stones.csv");
const COVID_CFR_BY_AGE: &str = include_str!("../data/covid_cfr_by_age.csv");

/// A flat 2×2 table with a name and a unit note.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTable {
    pub name: String,
    pub table: JointTable,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Stratified(DatasetFile),
    Flat(Vec<NamedTable>),
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
}

pub const CATALOG: [CatalogEntry; 5] = [
    CatalogEntry {
        name: "kidney_stones",
        description: "two treatments by stone size, counts (700 patients)",
    },
    CatalogEntry {
        name: "covid_cfr_by_age",
        description: "COVID-19 CFR of non-Hispanic white vs other people by age, rates with P(g)",
    },
    CatalogEntry {
        name: "vaccine_rates",
        description: "weekly cases and deaths per 100k, unvaccinated vs vaccinated",
    },
    CatalogEntry {
        name: "mortality_covid",
        description: "annual mortality, common causes vs common causes plus COVID-19",
    },
    CatalogEntry {
        name: "pd_vs_deltastar",
        description: "two flat tables contrasting Pd with delta-star P",
    },
];

fn flat(name: &str, p11: f64, p10: f64, labels: (&str, &str, &str, &str), note: Option<&str>) -> NamedTable {
    NamedTable {
        name: name.to_string(),
        table: JointTable::new(p11, p10)
            .expect("bundled rates are probabilities")
            .with_cause_labels(labels.0, labels.1)
            .with_outcome_labels(labels.2, labels.3),
        note: note.map(str::to_string),
    }
}

/// Look up a bundled dataset by name.
pub fn builtin(name: &str) -> Option<Builtin> {
    let per_100k = Some("rates per 100,000 people aged 5+, week of 20-26 June 2022");
    Some(match name {
        "kidney_stones" => Builtin::Stratified(
            parse_dataset(KIDNEY_STONES, "builtin:kidney_stones").expect("bundled file parses"),
        ),
        "covid_cfr_by_age" => Builtin::Stratified(
            parse_dataset(COVID_CFR_BY_AGE, "builtin:covid_cfr_by_age").expect("bundled file parses"),
        ),
        "vaccine_rates" => Builtin::Flat(vec![
            flat(
                "cases",
                189.5e-5,
                512.6e-5,
                ("vaccinated", "unvaccinated", "case", "no_case"),
                per_100k,
            ),
            flat(
                "deaths",
                0.34e-5,
                1.89e-5,
                ("vaccinated", "unvaccinated", "death", "survival"),
                per_100k,
            ),
        ]),
        "mortality_covid" => Builtin::Flat(vec![
            flat(
                "unvaccinated",
                0.014,
                0.013,
                ("common_plus_covid", "common", "death", "survival"),
                Some("annual mortality; COVID-19 adds 0.001"),
            ),
            flat(
                "vaccinated",
                0.01318,
                0.013,
                ("common_plus_covid", "common", "death", "survival"),
                Some("annual mortality; COVID-19 adds 0.00018"),
            ),
        ]),
        "pd_vs_deltastar" => Builtin::Flat(vec![
            flat("no_big_difference", 0.9, 0.8, ("x1", "x0", "y1", "y0"), None),
            flat("no_counterexample", 0.2, 0.0, ("x1", "x0", "y1", "y0"), None),
        ]),
        _ => return None,
    })
}

/// Mortality with an independent extra cause: `a + b − a·b`.
pub fn combined_mortality(base: f64, extra: f64) -> f64 {
    base + extra - base * extra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::Schema;

    #[test]
    fn every_catalog_entry_loads() {
        for entry in CATALOG {
            assert!(builtin(entry.name).is_some(), "{}", entry.name);
        }
        assert!(builtin("nosuch").is_none());
    }

    #[test]
    fn kidney_shape() {
        let Some(Builtin::Stratified(f)) = builtin("kidney_stones") else {
            panic!()
        };
        assert_eq!(f.schema(), Schema::Counts);
        assert_eq!(f.dataset.groups().len(), 2);
        let grand: u64 = f
            .dataset
            .groups()
            .iter()
            .flat_map(|g| g.cells)
            .map(|c| match c {
                crate::tables::Cell::Count { total, .. } => total,
                _ => 0,
            })
            .sum();
        assert_eq!(grand, 700);
    }

    #[test]
    fn covid_shape() {
        let Some(Builtin::Stratified(f)) = builtin("covid_cfr_by_age") else {
            panic!()
        };
        assert_eq!(f.schema(), Schema::Rates);
        assert_eq!(f.dataset.groups().len(), 11);
        assert_eq!(f.dataset.causes()[f.dataset.treatment()], "white");
        assert_eq!(f.metadata.outcome_prior, Some(0.0097));
    }

    #[test]
    fn vaccine_and_mortality_values() {
        let Some(Builtin::Flat(v)) = builtin("vaccine_rates") else {
            panic!()
        };
        assert_eq!(v[0].table.p_y1_given_x0(), 512.6e-5);
        assert_eq!(v[1].table.p_y1_given_x1(), 0.34e-5);
        let Some(Builtin::Flat(m)) = builtin("mortality_covid") else {
            panic!()
        };
        assert_eq!(m[1].table.p_y1_given_x1(), 0.01318);
        assert!((combined_mortality(0.013, 0.001) - 0.014).abs() < 1e-4);
    }
}

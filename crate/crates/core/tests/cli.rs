mod common;

use causal_confirm::builtin::{builtin, Builtin};
use causal_confirm::cli::run;
use causal_confirm::ingest::parse_decimal;
use causal_confirm::measures::{evaluate, MeasureId};
use causal_confirm::tables::CausalRole;
use common::config;
use proptest::prelude::*;
use std::process::Command;

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_causal-confirm"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exited normally"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[String]) -> i32 {
    let argv = std::iter::once("causal-confirm".to_string()).chain(args.iter().cloned());
    run(argv, &mut Vec::new(), &mut Vec::new())
}

#[test]
fn kidney_confounder_cc() {
    let (code, out, _) = bin(&["analyze", "--dataset", "kidney_stones", "--role", "confounder", "--measures", "cc"]);
    assert_eq!(code, 0);
    let line = out.lines().find(|l| l.starts_with("cc")).unwrap();
    assert!(line.contains("x2/x1=>success"), "{line}");
    assert!(line.ends_with("0.06220"), "{line}");
}

#[test]
fn covid_confounder_pd_and_cc() {
    let (code, out, _) = bin(&["analyze", "--dataset", "covid_cfr_by_age", "--role", "confounder", "--measures", "pd,cc"]);
    assert_eq!(code, 0);
    let pd = out.lines().find(|l| l.starts_with("pd")).unwrap();
    assert!(pd.contains("0.2969"), "{pd}");
    let cc = out.lines().find(|l| l.starts_with("cc")).unwrap();
    assert!(cc.ends_with("-0.2316"), "{cc}");
}

#[test]
fn covid_mediator_d_in_percent() {
    let (code, out, _) = bin(&[
        "analyze", "--dataset", "covid_cfr_by_age", "--role", "mediator", "--measures", "d", "--percent",
    ]);
    assert_eq!(code, 0);
    let white = out.lines().find(|l| l.contains("(white,death)")).unwrap();
    assert!(white.contains("0.07334%"), "{white}");
}

#[test]
fn json_numbers_are_the_library_values() {
    let (code, out, _) = bin(&[
        "analyze", "--dataset", "covid_cfr_by_age", "--role", "both", "--measures", "all", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let Some(Builtin::Stratified(f)) = builtin("covid_cfr_by_age") else {
        unreachable!()
    };
    let d = &f.dataset;
    for c in 0..2 {
        assert_eq!(v["observed"]["rates"][c]["p_y1"].as_f64().unwrap(), d.pooled_rate(c));
    }
    let adj = causal_confirm::adjust::do_adjust(d, CausalRole::Confounder).unwrap();
    assert_eq!(v["adjusted"][0]["rates"][0].as_f64().unwrap(), adj.rates[0]);
    assert_eq!(v["adjusted"][0]["rates"][1].as_f64().unwrap(), adj.rates[1]);
    let observed = d.pool().with_outcome_labels("death", "not_death");
    let cc = v["measures"]["observed"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["id"] == "cc")
        .unwrap();
    assert_eq!(cc["value"].as_f64().unwrap(), evaluate(MeasureId::Cc, &observed).value);
}

#[test]
fn flat_measures() {
    let (code, out, _) = bin(&["measures", "--p11", "0.9", "--p10", "0.8", "--measures", "pd,delta_star"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.1111") && out.contains("0.5000"), "{out}");
    let (code, out, _) = bin(&["measures", "--p11", "0.014", "--p10", "0.013", "--measures", "cc"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.07143"), "{out}");
    let (code, _, err) = bin(&["measures", "--p11", "0.00034e0", "--p10", "0.1"]);
    assert_eq!(code, 2);
    assert!(err.contains("plain decimal"), "{err}");
}

#[test]
fn predictions() {
    let (_, out, _) = bin(&["predict", "--cc", "0", "--px1", "0.3"]);
    assert!(out.contains("0.3000") && out.contains("0.7000"), "{out}");
    let (_, out, _) = bin(&["predict", "--ce", "0.5"]);
    assert!(out.contains("0.6667"), "{out}");
    let (code, out, _) = bin(&["predict", "--cc", "1", "--px1", "0.1"]);
    assert_eq!(code, 0);
    assert!(out.contains("1.000") && out.lines().nth(1).unwrap().ends_with(" 0"), "{out}");
}

#[test]
fn verify_and_datasets() {
    assert_eq!(bin(&["verify", "--dataset", "kidney_stones"]).0, 0);
    assert_eq!(bin(&["verify", "--dataset", "nosuch"]).0, 2);
    let (code, out, _) = bin(&["verify"]);
    assert_eq!(code, 1, "the published D(other) slip is reported as a failure");
    assert_eq!(out.matches("pass (widened tolerance)").count(), 2);
    let (code, out, _) = bin(&["datasets"]);
    assert_eq!(code, 0);
    assert!(out.contains("kidney_stones"));
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(bin(&["analyze", "--dataset", "kidney_stones"]).0, 2);
    assert_eq!(bin(&["analyze", "--dataset", "kidney_stones", "--input", "x.csv", "--role", "mediator"]).0, 2);
    assert_eq!(bin(&["analyze", "--dataset", "kidney_stones", "--role", "sideways"]).0, 2);
    assert_eq!(bin(&["analyze", "--dataset", "kidney_stones", "--role", "mediator", "--measures", "cc,zz"]).0, 2);
    assert_eq!(bin(&["frobnicate"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "group,cause,successes,total\na,x1,12,10\na,x2,1,10\n").unwrap();
    let (code, _, err) = bin(&["analyze", "--input", bad.to_str().unwrap(), "--role", "mediator"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn chart_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = bin(&[
        "analyze", "--dataset", "kidney_stones", "--role", "confounder", "--chart", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(dir.path().join("kidney_stones-groups.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"width="800" height="400""#));
    assert_eq!(svg.matches(r#"class="bar""#).count(), 4);
    let csv = std::fs::read_to_string(dir.path().join("kidney_stones-groups.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("group,cause,rate,weight"));
}

fn expected_code(p11: &str, p10: &str) -> i32 {
    let ok = |s: &str| parse_decimal(s).is_some_and(|v| (0.0..=1.0).contains(&v));
    if ok(p11) && ok(p10) {
        0
    } else {
        2
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn measures_exit_codes_follow_the_contract(p11 in "[-+0-9.eE]{0,6}", p10 in "[-+0-9.eEx]{0,6}") {
        let args: Vec<String> = ["measures", "--p11", &p11, "--p10", &p10].iter().map(|s| s.to_string()).collect();
        prop_assert_eq!(in_process(&args), expected_code(&p11, &p10));
    }

    #[test]
    fn predict_exit_codes_follow_the_contract(cc in -2.0..2.0f64, px1 in -0.5..1.5f64) {
        let args: Vec<String> = ["predict", "--cc", &format!("{cc}"), "--px1", &format!("{px1}")]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let valid = (-1.0..=1.0).contains(&cc) && px1 > 0.0 && px1 < 1.0;
        prop_assert_eq!(in_process(&args), if valid { 0 } else { 2 });
    }
}

use serde_json::Value;
use sparse_interp_demo::{limit_curve, one_step, sat_curve};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return json")
}

#[test]
fn one_step_reports_a_nonnegative_margin() {
    for model in ["is", "maxcut", "ising", "coloring", "ksat", "nae"] {
        let v = parse(one_step(model, 6, 5, 3, 0.0, 11));
        assert!(v.get("error").is_none(), "{model}: {v}");
        assert_eq!(v["edges"].as_array().unwrap().len(), 5);
        assert_eq!(v["witness"].as_array().unwrap().len(), 6);
        assert!(v["margin"].as_f64().unwrap() >= -1e-12, "{model}: {v}");
    }
    let v = parse(one_step("is", 6, 5, 3, 2.0, 11));
    assert!(v["margin"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn maxcut_on_a_single_edge_cuts_it() {
    // one edge: the only optimal cuts split its two endpoints (or it is a loop)
    let v = parse(one_step("maxcut", 3, 1, 1, 0.0, 2));
    let e: Vec<usize> = serde_json::from_value(v["edges"][0]["nodes"].clone()).unwrap();
    let expected = if e[0] == e[1] { 0.0 } else { 1.0 };
    assert_eq!(v["ground_value"].as_f64().unwrap(), expected);
}

#[test]
fn limit_curve_recovers_linear_slope() {
    let v = parse(limit_curve("linear", 128, 0.5));
    assert_eq!(v["verdict"], "pass");
    let est = v["estimates"].as_array().unwrap().iter().find(|e| e["name"] == "a_N / N at N_max").unwrap();
    assert_eq!(est["value"].as_f64().unwrap(), 3.0);
    assert!(!v["plot"].as_array().unwrap().is_empty());
    assert_eq!(parse(limit_curve("oscillating", 64, 0.5))["verdict"], "fail");
}

#[test]
fn sat_curve_starts_at_one() {
    let v = parse(sat_curve("ksat", 2, 2, 2));
    assert_eq!(v["verdict"], "pass");
    let pts = v["plot"].as_array().unwrap();
    assert_eq!(pts[0]["y"].as_f64().unwrap(), 1.0);
    // 2-SAT, N = 2: one clause never fails; two fail with probability 4/256
    assert_eq!(pts[1]["y"].as_f64().unwrap(), 1.0);
    assert!((pts[2]["y"].as_f64().unwrap() - 63.0 / 64.0).abs() < 1e-15);
}

#[test]
fn bad_input_is_an_error_document() {
    assert!(parse(one_step("potts", 4, 2, 2, 0.0, 1)).get("error").is_some());
    assert!(parse(limit_curve("cubic", 64, 0.5)).get("error").is_some());
    assert!(parse(sat_curve("ksat", 3, 40, 2)).get("error").is_some());
}

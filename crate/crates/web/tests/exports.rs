use gcdmoment_web::{distribution_json, moment_json, residue_curve_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn moment_lists_routes_and_local_factors() {
    let v = parse(moment_json("6, 4", "1"));
    assert_eq!(v["agree"], true);
    for r in v["routes"].as_array().unwrap() {
        assert_eq!(r["value"]["exact"], "35/6");
    }
    let lf: Vec<&str> =
        v["local_factors"].as_array().unwrap().iter().map(|l| l["value"]["exact"].as_str().unwrap()).collect();
    assert_eq!(lf, ["7/2", "5/3"]);
}

#[test]
fn moment_complex() {
    let v = parse(moment_json("12", "0.5+0.25i"));
    assert_eq!(v["agree"], true);
    assert!((v["routes"][0]["value"]["re"].as_f64().unwrap() - 1.5756010722184977).abs() < 1e-12);
}

#[test]
fn bad_input_is_an_error() {
    assert!(moment_json("", "1").is_err());
    assert!(moment_json("6,x", "1").is_err());
    assert!(moment_json("6", "1+").unwrap_err().contains("a+bi"));
    assert!(distribution_json("1000003,1000033").is_err());
}

#[test]
fn distribution_of_twelve() {
    let v = parse(distribution_json("12"));
    assert_eq!(v["lcm"], 12);
    let bins: Vec<(String, u64)> = v["bins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| (b["x"].as_str().unwrap().to_string(), b["count"].as_u64().unwrap()))
        .collect();
    let want = [("1", 4), ("2", 2), ("3", 2), ("4", 2), ("6", 1), ("12", 1)];
    assert_eq!(bins, want.map(|(x, c)| (x.to_string(), c)));
}

#[test]
fn residue_curve_approaches_first_moment() {
    let v = parse(residue_curve_json(0, "6,4", 7));
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 7);
    let last = curve.last().unwrap()["value"].as_f64().unwrap();
    assert!((last - 35.0 / 6.0).abs() < 1e-2);
    assert_eq!(v["target"], "35/6");
    assert!(v["relative_error"].as_f64().unwrap() < 1e-5);
}

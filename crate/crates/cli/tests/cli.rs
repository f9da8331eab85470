use std::process::Command;
use std::time::Instant;

use gcdmoment_cli::report::{BenchJson, FuzzJson, MomentJson, MuJson, ResidueJson, VerifyJson, ZetaJson};
use gcdmoment_cli::{run, EXIT_DISAGREE, EXIT_ERROR, EXIT_OK};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gcdmoment").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json<T: serde::de::DeserializeOwned>(args: &[&str]) -> (i32, T) {
    let (code, out, err) = call(args);
    let parsed = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out:?} / {err}"));
    (code, parsed)
}

#[test]
fn moment_single_modulus() {
    let (code, r): (_, MomentJson) = json(&["moment", "-n", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.value.render(), "10/3");
    assert!(r.agree);
    assert_eq!(r.results.connes.unwrap().render(), "10/3");
    assert!(r.generated_at.is_some());
}

#[test]
fn moment_two_moduli_with_local_factors() {
    let (code, r): (_, MomentJson) = json(&["moment", "-n", "6,4", "-w", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.value.render(), "35/6");
    let lf: Vec<(u64, String)> = r.diagnostics.local_factors.iter().map(|l| (l.p, l.value.render())).collect();
    assert_eq!(lf, vec![(2, "7/2".to_string()), (3, "5/3".to_string())]);
}

#[test]
fn moment_second_power() {
    let (code, r): (_, MomentJson) = json(&["moment", "-n", "12", "-w", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.value.render(), "121/6");
    assert_eq!(r.results.census.unwrap().render(), "121/6");
}

#[test]
fn moment_complex_exponent() {
    let (code, r): (_, MomentJson) = json(&["moment", "-n", "6,4", "-w", "0.5+0.25i"]);
    assert_eq!(code, EXIT_OK);
    assert!(r.agree);
    assert!(r.diagnostics.max_abs_diff.unwrap() <= 1e-9);
    assert!(r.results.census.is_none());
}

#[test]
fn malformed_exponent_is_a_usage_error() {
    let (code, out, err) = call(&["moment", "-n", "12", "-w", "1+"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.is_empty());
    assert!(err.contains("a+bi"), "{err}");
}

#[test]
fn malformed_moduli_and_unknown_flags_are_rejected() {
    for args in [
        &["moment", "-n", "0"][..],
        &["moment", "-n", "6,,4"],
        &["moment", "-n", "-3"],
        &["moment", "-n", "12", "--bogus"],
        &["frobnicate"],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, EXIT_ERROR, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("moment"));
}

#[test]
fn oversized_enumeration_is_a_resource_error() {
    let (code, _, err) = call(&["moment", "-n", "1000003,1000033", "--cap", "1000"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn json_round_trips_byte_for_byte() {
    for args in [
        &["moment", "-n", "6,4", "--no-timestamp"][..],
        &["moment", "-n", "12", "-w", "0.5+0.25i"],
        &["mu", "-n", "8,12", "-w", "2"],
    ] {
        let (_, out, _) = call(args);
        let text = if args[0] == "mu" {
            let v: MuJson = serde_json::from_str(&out).unwrap();
            serde_json::to_string_pretty(&v).unwrap()
        } else {
            let v: MomentJson = serde_json::from_str(&out).unwrap();
            serde_json::to_string_pretty(&v).unwrap()
        };
        assert_eq!(format!("{text}\n"), out);
    }
}

#[test]
fn mu_census_matches_enumeration() {
    let (code, r): (_, MuJson) = json(&["mu", "-n", "6,4", "-w", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.results.census, r.results.bruteforce.unwrap());
    assert_eq!(r.diagnostics.order, "24");
    assert_eq!(r.diagnostics.exponent, "12");
}

#[test]
fn mu_skips_enumeration_above_cap() {
    let (code, r): (_, MuJson) = json(&["mu", "-n", "1000,1000", "--cap", "100"]);
    assert_eq!(code, EXIT_OK);
    assert!(r.results.bruteforce.is_none());
    assert!(r.diagnostics.bruteforce_skipped.is_some());
}

#[test]
fn fuzz_is_reproducible() {
    let args = ["fuzz", "--count", "200", "--seed", "7", "--no-timestamp"];
    let (code, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, b);
    let r: FuzzJson = serde_json::from_str(&a).unwrap();
    assert_eq!((r.passed, r.failed), (200, 0));
    assert!(r.first_counterexample.is_none());
}

#[test]
fn fuzz_ignores_worker_count() {
    let bin = env!("CARGO_BIN_EXE_gcdmoment");
    let outputs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|w| {
            Command::new(bin)
                .args(["fuzz", "--count", "100", "--seed", "3", "--no-timestamp"])
                .env(gcdmoment_cli::WORKERS_ENV, w)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn fuzz_catches_an_injected_fault() {
    let (code, r): (_, FuzzJson) = json(&["fuzz", "--count", "50", "--inject-fault"]);
    assert_eq!(code, EXIT_DISAGREE);
    assert!(r.failed > 0);
    let c = r.first_counterexample.unwrap();
    assert!(!c.agree);
    assert_ne!(c.results.brute, c.results.euler_product);
}

#[test]
fn verify_passes() {
    let (code, r): (_, VerifyJson) = json(&["verify", "--range", "200"]);
    assert_eq!(code, EXIT_OK);
    assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
}

#[test]
fn zeta_routes_agree() {
    let (code, r): (_, ZetaJson) = json(&["zeta", "-r", "1", "-n", "6,4", "-s", "3+0.5i", "-M", "20000"]);
    assert_eq!(code, EXIT_OK);
    assert!(r.diagnostics.closed_form_gap <= 1e-9);
    assert!(r.diagnostics.max_series_gap <= r.diagnostics.tail_bound + 1e-9);
}

#[test]
fn zeta_outside_half_plane_is_rejected() {
    let (code, _, err) = call(&["zeta", "-r", "1", "-n", "12", "-s", "2"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(!err.is_empty());
}

#[test]
fn residue_matches_first_moment() {
    let (code, r): (_, ResidueJson) = json(&["residue", "-n", "6,4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.target, "35/6");
    assert!(r.relative_error <= 1e-5);
}

#[test]
fn bench_orders_routes() {
    let args = ["bench", "--max-lcm", "720720", "--reps", "1"];
    let (code, a): (_, BenchJson) = json(&args);
    let (_, b): (_, BenchJson) = json(&args);
    assert_eq!(code, EXIT_OK);
    let values = |r: &BenchJson| r.rows.iter().map(|x| (x.lcm, x.route.clone(), x.value.clone())).collect::<Vec<_>>();
    assert_eq!(values(&a), values(&b));
    let at = |route: &str| a.rows.iter().find(|x| x.lcm == 720720 && x.route == route).unwrap().nanos;
    assert!(at("euler_product") < at("brute"));
    assert!(at("census") < at("brute"));
    for lcm in [1, 12, 360, 5040, 55440, 720720] {
        let vals: Vec<_> = a.rows.iter().filter(|x| x.lcm == lcm).map(|x| &x.value).collect();
        assert_eq!(vals.len(), 3);
        assert!(vals.iter().all(|v| *v == vals[0]));
    }
}

#[test]
fn trivial_group_is_fast() {
    let start = Instant::now();
    let (code, r): (_, MomentJson) = json(&["moment", "-n", "1", "-w", "3"]);
    assert!(start.elapsed().as_millis() < 50);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.value.render(), "1/1");
}

#[test]
fn csv_and_text_formats() {
    let (_, csv, _) = call(&["moment", "-n", "12", "--format", "csv"]);
    assert_eq!(csv, "route,value\nbrute,10/3\neuler_product,10/3\ncensus,10/3\nconnes,10/3\n");
    let (_, text, _) = call(&["moment", "-n", "12", "--format", "text"]);
    assert!(text.contains("agree: true"));
    let (_, bench, _) = call(&["bench", "--max-lcm", "12", "--format", "csv"]);
    assert!(bench.starts_with("lcm,route,nanos\n"));
    assert_eq!(bench.lines().count(), 1 + 2 * 3);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("gcdmoment-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let (code, out, _) = call(&["moment", "-n", "12", "--no-timestamp", "-o", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let r: MomentJson = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.value.render(), "10/3");
    assert!(r.generated_at.is_none());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gcdmoment");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["moment", "-n", "12"]), Some(EXIT_OK));
    assert_eq!(status(&["moment", "-n", "12", "-w", "x"]), Some(EXIT_ERROR));
    assert_eq!(status(&["fuzz", "--count", "10", "--inject-fault"]), Some(EXIT_DISAGREE));
}

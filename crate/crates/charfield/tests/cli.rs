//! End-to-end checks of the command-line interface, run against the built
//! binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_charfield"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("charfield-cli-{}-{name}", std::process::id()));
    p
}

#[test]
fn solve_emits_json_record() {
    let out = run(&[
        "solve",
        "--scenario",
        "bi-linear",
        "--tau-p",
        "0.2",
        "--tau-q",
        "0.8",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["x", "y", "r1", "r2", "u", "v"] {
        assert!(v.get(key).is_some(), "missing key {key} in {text}");
    }
    // closed form: M_x = tau_q - [t + t^2/2], M_y = -[t^2/2 + t^3/3]
    let mx = 0.8 - ((0.8f64 + 0.32) - (0.2 + 0.02));
    assert!((v["x"].as_f64().unwrap() - mx).abs() < 1e-9);
}

#[test]
fn field_csv_has_contracted_header_and_is_deterministic() {
    let out1 = tmp("field1.csv");
    let out2 = tmp("field2.csv");
    for out in [&out1, &out2] {
        let res = run(&[
            "field",
            "--scenario",
            "gas-smooth",
            "--n1",
            "8",
            "--n2",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{res:?}");
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "field CSV not byte-identical across runs");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("family,curve_index,vertex_index,tau_p,tau_q,x,y,r1,r2,u,v\n"));
    let rows = charfield::cli::parse_field_csv(&text).unwrap();
    assert!(rows.len() > 8);
    let _ = std::fs::remove_file(out1);
    let _ = std::fs::remove_file(out2);
}

#[test]
fn field_svg_deterministic_with_polyline_count() {
    let out1 = tmp("field1.svg");
    let out2 = tmp("field2.svg");
    for out in [&out1, &out2] {
        let res = run(&[
            "field",
            "--scenario",
            "mikhlin-top",
            "--n1",
            "6",
            "--n2",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{res:?}");
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let svg = String::from_utf8(a).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 6 + 9);
    let _ = std::fs::remove_file(out1);
    let _ = std::fs::remove_file(out2);
}

#[test]
fn validate_prints_gas_anchor_line() {
    let out = run(&["validate", "--system", "gas", "--gamma", "2"]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("laplace h=k=-0.1875"), "report:\n{text}");
}

#[test]
fn scenarios_lists_registry() {
    let out = run(&["scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["mikhlin", "mikhlin-top", "gas-smooth", "beam-impact", "bi-linear"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn config_errors_exit_one_with_json_record() {
    let out = run(&["solve", "--scenario", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(v["kind"], "config");

    let out = run(&["field", "--scenario", "gas-smooth", "--n1", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_errors_exit_two() {
    // tau_p > tau_q violates the solver domain
    let out = run(&[
        "solve",
        "--scenario",
        "gas-smooth",
        "--tau-p",
        "0.9",
        "--tau-q",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(v["kind"], "numeric");
}

#[test]
fn boundary_file_with_config_and_flag_override() {
    // tabulated gas boundary equivalent to the gas-smooth fixture
    let table = tmp("boundary.csv");
    let mut text = String::from("tau,x,y,u,v\n");
    for i in 0..=64 {
        let t = i as f64 / 64.0;
        text.push_str(&format!("{t},{t},0,{},{}\n", t / 4.0, 1.0 + t / 4.0));
    }
    std::fs::write(&table, text).unwrap();
    let config = tmp("config.json");
    std::fs::write(
        &config,
        format!(
            "{{\"system\":\"gas\",\"params\":{{\"gamma\":3.0}},\"boundary_file\":{:?},\"tau_p\":0.25,\"tau_q\":0.75}}",
            table.to_str().unwrap()
        ),
    )
    .unwrap();
    // the flag overrides gamma back to 2
    let out = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--gamma",
        "2",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    // reference from the closure-based scenario
    let sc = charfield::scenarios::scenario("gas-smooth").unwrap();
    let opts = charfield::cauchy::SolverOptions::default();
    let want = charfield::cauchy::solve_point(&sc.system, &sc.curve, 0.25, 0.75, &opts).unwrap();
    assert!((v["x"].as_f64().unwrap() - want.x).abs() < 1e-6);
    assert!((v["y"].as_f64().unwrap() - want.y).abs() < 1e-6);
    let _ = std::fs::remove_file(table);
    let _ = std::fs::remove_file(config);
}

#[test]
fn oracle_compare_reports_levels_and_ratios() {
    let out = run(&[
        "oracle-compare",
        "--scenario",
        "gas-smooth",
        "--levels",
        "20,40",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n0=20") && text.contains("n0=40"), "{text}");
    assert!(text.contains("ratio="), "{text}");
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

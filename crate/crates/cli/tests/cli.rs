use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hartogs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hartogs")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn disc_hartogs(dir: &Path) -> String {
    write(dir, "disc-hartogs-1-1.json", r#"{"base":{"kind":"disc"},"N":1,"s":1}"#)
}

#[test]
fn member_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = hartogs(&["member", "--domain", &disc_hartogs(dir.path()), "--point", "[0,0],[0.5,0]"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "interior");
    assert!((v["h"].as_f64().unwrap() - 0.25 / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn kernel_compare_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = hartogs(&["kernel", "compare", "--domain", &disc_hartogs(dir.path()), "--pairs", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["max_rel_err"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn identity_echoes_point() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "identity.json", r#"{"kind":"identity","dim":1}"#);
    let out = hartogs(&["aut", "apply", "--map", &map, "--point", r#"{"z":[[0.25,-0.5]],"zeta":[[0.1,0.2]]}"#]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["z"], serde_json::json!([[0.25, -0.5]]));
    assert_eq!(v["zeta"], serde_json::json!([[0.1, 0.2]]));
}

#[test]
fn domain_show_round_trip() {
    let out = hartogs(&["domain", "show"]);
    assert!(out.status.success());
    for entry in json(&out).as_array().unwrap() {
        let desc = entry["descriptor"].to_string();
        let again = hartogs(&["domain", "show", "--domain", &desc]);
        assert!(again.status.success());
        assert_eq!(json(&again), entry["descriptor"]);
    }
    let dir = tempfile::tempdir().unwrap();
    let f = disc_hartogs(dir.path());
    let first = json(&hartogs(&["domain", "show", "--domain", &f]));
    let second = json(&hartogs(&["domain", "show", "--domain", &first.to_string()]));
    assert_eq!(first, second);
}

#[test]
fn verify_exit_codes_follow_report() {
    let ok = hartogs(&["verify", "tumanov", "--domain", "disc", "--samples", "10"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["pass"], true);
    // an unattainable bound must fail
    let bad = hartogs(&["verify", "tumanov", "--domain", "disc", "--samples", "10", "--tol", "1e300"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["pass"], false);
    assert_eq!(hartogs(&["verify", "no_such_suite"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_across_threads() {
    let run = |threads: &str| {
        let out = hartogs(&["verify", "shilov", "--samples", "20", "--seed", "9", "--threads", threads]);
        assert!(out.status.success());
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("wall_clock_s");
        v
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hartogs(&["member", "--domain", "disc", "--point", "[0.3"]).status.code(), Some(2));
    assert_eq!(hartogs(&["member", "--domain", "nowhere", "--point", "[0,0]"]).status.code(), Some(2));
    assert_eq!(hartogs(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_one() {
    // the disc kernel blows up on the boundary pairing 1 − z w̄ = 0
    let out = hartogs(&["kernel", "eval", "--domain", "disc", "--p", "[1,0]", "--q", "[1,0]"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn levi_batch_csv_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let dom = disc_hartogs(dir.path());
    let pts = hartogs(&["sample", "boundary", "--domain", &dom, "--stratum", "b0", "--samples", "4", "--seed", "3"]);
    assert!(pts.status.success());
    let file = write(dir.path(), "pts.json", &String::from_utf8(pts.stdout).unwrap());
    let out = hartogs(&["levi", "batch", "--domain", &dom, "--input", &file, "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "min_eig").unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[col].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn sample_base_stratum() {
    let dir = tempfile::tempdir().unwrap();
    let out = hartogs(&["sample", "boundary", "--domain", &disc_hartogs(dir.path()), "--stratum", "base", "--samples", "3"]);
    assert!(out.status.success());
    for p in json(&out).as_array().unwrap() {
        let z = &p["z"][0];
        let r = z[0].as_f64().unwrap().hypot(z[1].as_f64().unwrap());
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(p["zeta"], serde_json::json!([[0.0, 0.0]]));
    }
}

#[test]
fn compose_and_inverse_induced() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"kind":"induced","base":{"kind":"mobius","a":[0.3,0.1],"theta":0.7},"U":[[[1,0]]],"s":2}"#,
    );
    let out = hartogs(&["aut", "compose", "--outer", &m, "--inner", &m]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["phase_defect"]["angle"], 0.0);
    let inv = hartogs(&["aut", "inverse", "--map", &m]);
    assert!(inv.status.success());
    let inv_file = write(dir.path(), "inv.json", &json(&inv)["map"].to_string());
    let p = r#"{"z":[[0.2,0.1]],"zeta":[[0.1,0]]}"#;
    let img = hartogs(&["aut", "apply", "--map", &m, "--point", p]);
    let img_s = String::from_utf8(img.stdout).unwrap();
    let back = json(&hartogs(&["aut", "apply", "--map", &inv_file, "--point", &img_s]));
    let z = back["z"][0][0].as_f64().unwrap();
    assert!((z - 0.2).abs() < 1e-12);
}

#[test]
fn jacobian_at_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    // rotation about the origin fixes z0 = 0
    let m = write(
        dir.path(),
        "rot.json",
        r#"{"kind":"induced","base":{"kind":"mobius","a":[0,0],"theta":1.1},"U":[[[0,1]]],"s":1.5}"#,
    );
    let out = hartogs(&["aut", "jacobian", "--map", &m, "--point", "[0,0]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["df2_dz_norm"].as_f64().unwrap() <= 1e-8);
    assert!(v["unitary_defect"].as_f64().unwrap() <= 1e-8);
}

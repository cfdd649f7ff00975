//! End-to-end checks of the command-line interface: output shapes, JSON
//! schema round trips, and the documented exit codes.

use std::process::{Command, Output};

fn mes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn dr_text_and_json() {
    let out = mes(&["dr", "--comp", "b2,3", "--r", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(x) b2"), "{text}");
    assert!(text.contains("b3"), "{text}");

    let out = mes(&["dr", "--comp", "b2,3", "--r", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["r"], 3);
    assert_eq!(v["terms"][0]["right"], "b2");
    assert_eq!(v["terms"][0]["coeff"], "1");
    let left = v["terms"][0]["left"].as_array().unwrap();
    assert_eq!(left.len(), 2);

    // The vanishing case renders as zero.
    let out = mes(&["dr", "--comp", "b2,3,b2", "--r", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains('0'));

    // Raw cuts reproduce the full cut list.
    let out = mes(&["dr", "--comp", "b2,3", "--r", "3", "--raw"]);
    let text = stdout(&out);
    assert!(text.contains("raw cuts (3)"), "{text}");
}

#[test]
fn dr_domain_and_parse_errors() {
    let out = mes(&["dr", "--comp", "3", "--r", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = mes(&["dr", "--comp", "3,0", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_values_and_errors() {
    let out = mes(&["eval", "--comp", "1,b2", "--digits", "50"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0.15025711289494928567"));

    // Stuffle-regularized value (5/8) zeta(3).
    let out = mes(&["eval", "--comp", "b2,1", "--reg", "stuffle", "--digits", "40"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0.75128556447474642837"));

    let out = mes(&["eval", "--comp", "1"]);
    assert_eq!(out.status.code(), Some(3));

    // Environment variable precision override.
    let out = Command::new(env!("CARGO_BIN_EXE_mes"))
        .args(["eval", "--comp", "2"])
        .env("MES_DIGITS", "25")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.trim().len(), 27, "{text}"); // "1." + 25 digits
}

#[test]
fn certify_reports_and_exit_codes() {
    let out = mes(&["certify", "--family", "bar23", "--ell", "1..2", "--a", "0..1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("Verified").count(), 4, "{text}");

    // All derivations of the weight-3 value vanish.
    let out = mes(&["certify", "--comp", "b2,1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["instances"][0]["rational_zeta_multiple"], true);

    // The weight-12 target is not certified; exit code 1.
    let out = mes(&["certify", "--comp", "b2,3,b2,5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("Unknown"));
}

#[test]
fn relate_and_precision_exit_code() {
    let out = mes(&[
        "relate", "--target", "b2,3", "--target", "3,2", "--target", "5", "--digits", "60",
        "--bound", "10000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("relation found"), "{text}");
    assert!(text.contains("32"), "{text}");

    // Asking for a huge bound at low precision is a precision error.
    let out = mes(&[
        "relate", "--target", "2", "--target", "3", "--digits", "20", "--bound",
        "10000000000",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_catalog_and_failure_exit() {
    let catalog = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/identities.json");
    let out = mes(&["verify", catalog, "--digits", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("eight-l1"));
    assert!(!text.contains("FAIL"), "{text}");

    // A broken proven identity makes the exit code 1.
    let bad = r#"[{"name":"broken","status":"proven","scale":"8",
        "lhs":{"reg":"none","comp":"1,b2"},
        "rhs":[{"coeff":"1","a":0,"comp":"3"},{"coeff":"1/100000","a":0,"comp":"2"}]}]"#;
    let dir = std::env::temp_dir().join("mes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, bad).unwrap();
    let out = mes(&["verify", path.to_str().unwrap(), "--digits", "30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    // Malformed catalog: parse error.
    let path = dir.join("malformed.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = mes(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

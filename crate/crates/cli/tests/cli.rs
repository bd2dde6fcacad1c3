use std::process::{Command, Output};

use serde_json::Value;

fn mdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdl"))
        .args(args)
        .env_remove("MDL_MAX_CELLS")
        .output()
        .expect("mdl runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn validator() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&schema).unwrap()
}

fn assert_valid(v: &Value) {
    let schema = validator();
    if let Err(errors) = schema.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:?}\n{v:#}");
    };
}

#[test]
fn eval_rank_one_conditional() {
    let out = mdl(&["eval", "--r", "1", "--s", "1+0i", "--seq", "char:4:1", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    assert_eq!(v["schema_version"], 1);
    assert!((v["value"]["re"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    assert_eq!(v["in_D"], true);
    assert_eq!(v["in_D0"], false);
    assert!(v["wall_time_s"].is_number());
    assert_eq!(v["plan"]["kind"], "truncation");
}

#[test]
fn every_method_emits_valid_reports() {
    for method in ["integral", "direct", "iterated-abel"] {
        let out = mdl(&[
            "eval", "--s", "2+0i,2+0i", "--seq", "char:4:1", "--seq", "char:4:1", "--tol", "1e-6", "--method", method,
        ]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let v = stdout_json(&out);
        assert_valid(&v);
        assert_eq!(v["method"], method);
        assert!((v["value"]["re"].as_f64().unwrap() - 0.201_264_162_478_124_3).abs() < 2e-6);
    }
}

#[test]
fn compositions_exact_output() {
    let out = mdl(&["compositions", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"[{"k":[1,1],"coeff":1},{"k":[0,2],"coeff":1}]"#
    );
    let v = stdout_json(&mdl(&["compositions", "4"]));
    assert_valid(&v);
    assert_eq!(v.as_array().unwrap().len(), 14);
}

#[test]
fn region_reports_without_failing() {
    let out = mdl(&["region", "--r", "2", "--s", "0.5+0i,-0.2+0i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    assert_eq!(v["in_D"], false);
    assert_eq!(v["in_D0"], false);
    assert_eq!(v["classification"], "outside proven region");
    let v = stdout_json(&mdl(&["region", "--s", "0.5+0i,0.7+0i"]));
    assert_eq!((v["in_D"].as_bool(), v["in_D0"].as_bool()), (Some(true), Some(false)));
    let v = stdout_json(&mdl(&["region", "--s", "2+0i,2+0i"]));
    assert_eq!(v["in_D0"], true);
}

#[test]
fn exit_codes() {
    let region = mdl(&["eval", "--s", "0.5+0i,-0.2+0i", "--seq", "char:4:1", "--seq", "char:4:1"]);
    assert_eq!(region.status.code(), Some(2));
    let v = stdout_json(&region);
    assert_valid(&v);
    assert_eq!(v["error"]["kind"], "region");
    assert!(!region.stderr.is_empty());

    let budget = mdl(&[
        "eval", "--s", "0.5+0i,0.7+0i", "--seq", "char:4:1", "--seq", "char:4:1", "--tol", "1e-9", "--max-cells", "10",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    let v = stdout_json(&budget);
    assert_valid(&v);
    assert_eq!(v["error"]["kind"], "budget");

    for bad in [
        vec!["eval", "--s", "0.5", "--seq", "alt"],
        vec!["eval", "--r", "2", "--s", "1+0i", "--seq", "alt"],
        vec!["eval", "--s", "1+0i", "--seq", "char:4:7"],
        vec!["eval", "--s", "1+0i", "--seq", "alt", "--tol", "-1"],
        vec!["eval", "--s", "1+0i", "--seq", "alt", "--method", "magic"],
        vec!["nonsense"],
    ] {
        let out = mdl(&bad);
        assert_eq!(out.status.code(), Some(1), "{bad:?}");
        assert!(!out.stderr.is_empty());
    }
    let args = ["eval", "--s", "1+0i,1+0i,1+0i", "--seq", "alt", "--seq", "alt", "--seq", "alt"];
    let mut abel = args.to_vec();
    abel.extend(["--method", "iterated-abel"]);
    let unsupported = mdl(&abel);
    assert_eq!(unsupported.status.code(), Some(1));
    assert_eq!(stdout_json(&unsupported)["error"]["kind"], "unsupported-rank");
    assert_eq!(mdl(&["--help"]).status.code(), Some(0));
}

#[test]
fn env_var_sets_cell_budget() {
    let out = Command::new(env!("CARGO_BIN_EXE_mdl"))
        .args(["eval", "--s", "0.5+0i,0.7+0i", "--seq", "char:4:1", "--seq", "char:4:1", "--tol", "1e-9"])
        .env("MDL_MAX_CELLS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn trajectory_csv() {
    let out = mdl(&["trajectory", "--s", "1+0i", "--seq", "char:4:1", "--x", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,re,im");
    assert_eq!(lines.len(), 9);
    let last: Vec<f64> = lines[8].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 8.0);
    assert!((last[1] - 76.0 / 105.0).abs() < 1e-15);
}

#[test]
fn no_timing_is_bit_identical() {
    let args = [
        "compare", "--s", "-0.3+0i,1.2+0i", "--seq", "char:3:1", "--seq", "char:4:1", "--tol", "1e-7", "--no-timing",
    ];
    let a = mdl(&args);
    let b = mdl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("\"wall_time_s\": 0"));
}

#[test]
fn compare_deltas_within_combined_errors() {
    let points: [&[&str]; 5] = [
        &["--s", "2+0i,2+0i", "--seq", "char:4:1", "--seq", "char:4:1"],
        &["--s", "0.5+0i,0.7+0i", "--seq", "char:4:1", "--seq", "char:4:1"],
        &["--s", "-0.3+0i,1.2+0i", "--seq", "char:3:1", "--seq", "char:4:1"],
        &["--s", "1+0i", "--seq", "char:4:1"],
        &["--s", "2.5+1i", "--seq", "char:5:1", "--n0", "2"],
    ];
    for pt in points {
        let mut args = vec!["compare", "--tol", "1e-7"];
        args.extend_from_slice(pt);
        let out = mdl(&args);
        assert_eq!(out.status.code(), Some(0), "{pt:?}");
        let v = stdout_json(&out);
        assert_valid(&v);
        let deltas = v["deltas"].as_array().unwrap();
        assert!(!deltas.is_empty(), "{pt:?}: only one method applied");
        for d in deltas {
            assert_eq!(d["within"], true, "{pt:?}: {d}");
            assert!(d["delta"].as_f64().unwrap() <= d["combined_error"].as_f64().unwrap());
        }
    }
    // outside D0 the direct method is skipped with its reason
    let v = stdout_json(&mdl(&["compare", "--s", "0.5+0i,0.7+0i", "--seq", "char:4:1", "--seq", "char:4:1"]));
    let skipped = v["skipped"].as_array().unwrap();
    assert_eq!(skipped[0]["method"], "direct");
    assert_eq!(skipped[0]["kind"], "region");
}

#[test]
fn characters_and_kernel_reports_validate() {
    for q in ["1", "5", "8", "12"] {
        let out = mdl(&["characters", q]);
        assert_eq!(out.status.code(), Some(0));
        assert_valid(&stdout_json(&out));
    }
    let v = stdout_json(&mdl(&["characters", "5"]));
    assert_eq!(v["generators"], serde_json::json!([2]));
    assert_eq!(v["characters"].as_array().unwrap().len(), 4);

    let out = mdl(&["kernel-at", "--s", "0.5+0i,0.7+0i", "--t", "2,3", "--explain"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    assert_eq!(mdl(&["kernel-at", "--s", "0.5+0i", "--t", "0.5"]).status.code(), Some(1));
}

#[test]
fn lemma1_check_passes() {
    let out = mdl(&["lemma1-check", "5", "--trials", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    assert_eq!(v["pass"], true);
    assert_eq!(mdl(&["lemma1-check", "2"]).status.code(), Some(1));
}

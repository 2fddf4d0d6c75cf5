use std::process::Command;

use serde_json::{json, Value};

const P1: &str = r#"{"schema": 1, "genus": 0, "tau": [3.0, 0.0], "lattice": {"rank": 0}}"#;
const GENUS3: &str = r#"{"schema": 1, "genus": 3, "tau": [3.0, 0.0], "lattice": {"rank": 1, "gram": [[4]]}}"#;
const ELLIPTIC: &str =
    r#"{"schema": 1, "genus": 1, "tau": [0.0, 2.0], "sigma": [0.0, 2.0], "hom_exponents": [1], "lattice": {"rank": 1, "gram": [[1]]}}"#;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_ellbundle"))
        .args(args)
        .output()
        .expect("binary runs");
    let body = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), body)
}

fn line_bundle(lambda: [f64; 2], base_degree: i64) -> Value {
    json!({"section": {"constant": lambda, "hom": []}, "base_degree": base_degree, "fibre_twists": []})
}

fn extension(d: Value, delta: Value, z: Value) -> Value {
    json!({"extension": {"D": d, "delta": delta, "Z": z, "nonsplit_at": "everywhere"}})
}

#[test]
fn exists_exit_codes() {
    let (code, v) = run(&["exists", P1, "--c2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "exists");
    assert_eq!(v["delta"], "1/1");
    assert_eq!(v["schema"], 1);

    let (code, v) = run(&["exists", P1, "--c2", "-1"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "not_exists");

    let (code, v) = run(&["exists", GENUS3, "--c1", "1", "--c2", "-2"]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "unknown");
    assert_eq!(v["interval"], json!(["0/1", "1/2"]));
    assert_eq!(v["d_range"], json!([1, 2]));

    let (code, v) = run(&["exists", GENUS3, "--c1", "1", "--c2", "-2", "--d", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["filtrable"], "non_filtrable");
}

#[test]
fn malformed_input_is_64() {
    let (code, v) = run(&["exists", r#"{"schema": 7, "genus": 0, "tau": [3, 0], "lattice": {"rank": 0}}"#, "--c2", "0"]);
    assert_eq!(code, 64);
    assert_eq!(v["error"], "parse");

    let (code, v) = run(&["check", r#"{"genus": 0, "tau": [0.5, 0.0], "lattice": {"rank": 0}}"#]);
    assert_eq!(code, 64);
    assert_eq!(v["error"], "invalid_period");

    let indefinite = r#"{"genus": 2, "tau": [3, 0], "lattice": {"rank": 2, "gram": [[1, 0], [0, -1]]}}"#;
    let (code, _) = run(&["exists", indefinite, "--c2", "0"]);
    assert_eq!(code, 64);

    let (code, _) = run(&["exists", "/no/such/surface.json", "--c2", "0"]);
    assert_eq!(code, 64);
}

#[test]
fn recipe_transcript() {
    let (code, v) = run(&["recipe", P1, "--c2", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"], 4);
    let transcript = v["transcript"].as_array().unwrap();
    assert_eq!(transcript.len(), 5);
    for (i, row) in transcript.iter().enumerate() {
        assert_eq!(row["c2"], i as i64);
        assert_eq!(row["c1"]["torsion"][0], 4 - i as i64);
    }
    assert_eq!(transcript.last().unwrap(), &v["expected"]);

    let (code, v) = run(&["recipe", P1, "--c2", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"], 0);
    assert_eq!(v["transcript"].as_array().unwrap().len(), 1);

    let (code, v) = run(&["recipe", P1, "--c2", "-3"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "not_exists");
    assert_eq!(v["verdict"]["verdict"], "not_exists");

    let (code, v) = run(&["recipe", GENUS3, "--c1", "1", "--c2", "-2"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "unknown");
}

#[test]
fn spectral_cover_of_trivial_extension() {
    let o = line_bundle([1.0, 0.0], 0);
    let bundle = extension(o.clone(), o, json!([])).to_string();
    let (code, v) = run(&["spectral-cover", P1, &bundle]);
    assert_eq!(code, 0, "{v}");
    let pair = v["bisection"]["reducible"].as_array().unwrap();
    assert_eq!(pair[0], pair[1]);
    assert_eq!(pair[0]["constant"], json!([1.0, 0.0]));
    assert_eq!(v["verification"]["max_residual"], 0.0);
    assert_eq!(v["verification"]["samples"], 50);
    assert_eq!(v["accounting"]["n_e"], 0);
}

#[test]
fn spectral_cover_of_constant_lambda() {
    let d = line_bundle([2.0, 0.5], 0);
    let bundle = extension(d, line_bundle([1.0, 0.0], 0), json!([])).to_string();
    let (code, v) = run(&["spectral-cover", P1, &bundle, "--verify", "20"]);
    assert_eq!(code, 0, "{v}");
    let pair = v["bisection"]["reducible"].as_array().unwrap();
    let a = pair[0]["constant"].as_array().unwrap();
    let b = pair[1]["constant"].as_array().unwrap();
    let (ar, ai) = (a[0].as_f64().unwrap(), a[1].as_f64().unwrap());
    let (br, bi) = (b[0].as_f64().unwrap(), b[1].as_f64().unwrap());
    // the two points multiply to 1 up to the period
    let prod = (ar * br - ai * bi, ar * bi + ai * br);
    let modulus = (prod.0 * prod.0 + prod.1 * prod.1).sqrt();
    let k = modulus.ln() / 3f64.ln();
    assert!((k - k.round()).abs() < 1e-9, "{prod:?}");
    assert_eq!(v["verification"]["samples"], 20);
    assert_eq!(v["verification"]["false_positives"], 0);
}

#[test]
fn spectral_cover_jumps() {
    let o = line_bundle([1.0, 0.0], 0);
    let delta = line_bundle([1.0, 0.0], 2);
    let z = json!([[[0.5, 0.25], 1], [[-1.5, 0.0], 1]]);
    let bundle = extension(o, delta, z).to_string();
    let (code, v) = run(&["spectral-cover", P1, &bundle]);
    assert_eq!(code, 0, "{v}");
    let jumps = v["jumps"].as_array().unwrap();
    assert_eq!(jumps.len(), 2);
    let acc = &v["accounting"];
    assert_eq!(
        acc["cover_dot_zero_section"].as_i64().unwrap() + acc["jumps"].as_i64().unwrap(),
        acc["n_e"].as_i64().unwrap()
    );
}

#[test]
fn check_passes_on_sample_surfaces() {
    for s in [P1, GENUS3, ELLIPTIC] {
        let (code, v) = run(&["check", s]);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["passed"], true);
        assert_eq!(v["checks"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn intersect_and_genus() {
    let (code, v) = run(&["intersect", ELLIPTIC, r#"{"constant": [1, 0], "hom": [1]}"#, r#"{"constant": [2, 0], "hom": [0]}"#]);
    assert_eq!(code, 0);
    assert_eq!(v["pairing"], 1);
    assert_eq!(v["numeric_coincidences"], 1);

    let (code, v) = run(&["genus", P1, "--c2", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["delta"], "3/2");
    assert_eq!(v["genus"], 5);
    assert_eq!(v["branching"], 12);
    assert_eq!(v["hurwitz"], true);
}

#[test]
fn batch_keeps_order_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let queries = json!([
        {"command": "exists", "surface": P1, "c2": 2},
        {"command": "exists", "surface": P1, "c2": -5},
        {"command": "exists", "surface": GENUS3, "c1": [1], "c2": -2},
        {"command": "genus", "surface": P1, "c2": 1},
        {"command": "exists", "surface": P1, "c2": 0, "bogus": 1},
    ]);
    let batch = dir.path().join("batch.json");
    std::fs::write(&batch, queries.to_string()).unwrap();
    let out = dir.path().join("out.json");
    let (code, stdout) = run(&["--batch", batch.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(stdout, Value::Null);
    assert_eq!(code, 64);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let codes: Vec<i64> = v.as_array().unwrap().iter().map(|r| r["exit_code"].as_i64().unwrap()).collect();
    assert_eq!(codes, [0, 1, 2, 0, 64]);
    for (i, r) in v.as_array().unwrap().iter().enumerate() {
        assert_eq!(r["index"], i);
    }
    assert_eq!(v[3]["result"]["genus"], 1);
}

#[test]
fn batch_without_failures_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.json");
    let queries: Vec<Value> = (0..16).map(|c2| json!({"command": "exists", "surface": P1, "c2": c2})).collect();
    std::fs::write(&batch, Value::Array(queries).to_string()).unwrap();
    let (code, v) = run(&["--batch", batch.to_str().unwrap()]);
    assert_eq!(code, 0);
    for (i, r) in v.as_array().unwrap().iter().enumerate() {
        assert_eq!(r["result"]["delta"], format!("{}/{}", if i % 2 == 0 { i / 2 } else { i }, if i % 2 == 0 { 1 } else { 2 }));
    }
}

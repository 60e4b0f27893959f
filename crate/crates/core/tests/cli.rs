use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use resonance_lab::cli::{self, SequenceDocument, SimulationConfig};
use resonance_lab::lyapsim;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("resonance-lab").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn codim_table_for_f4() {
    let v = json(&["codim", "--type", "F4", "--json"]);
    let codims: Vec<(u64, u64)> = v["codims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["j0"].as_u64().unwrap(), e["codim"].as_u64().unwrap()))
        .collect();
    assert_eq!(codims, vec![(1, 15), (2, 20), (3, 20), (4, 15)]);
    assert_eq!(v["r_g"], 15);
    assert_eq!(v["minimizing_j0"], serde_json::json!([1, 4]));

    let (code, text, _) = run(&["codim", "--type", "F4"]);
    assert_eq!(code, 0);
    assert!(text.contains("r(g) = 15"));
}

#[test]
fn bounds_for_all_exceptional_types() {
    let v = json(&["bounds", "--all", "--json"]);
    let got: Vec<(String, u64)> = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|b| ["E6", "E7", "E8", "F4", "G2"].contains(&b["type"].as_str().unwrap()))
        .map(|b| (b["type"].as_str().unwrap().to_string(), b["k_bound"].as_u64().unwrap()))
        .collect();
    let want: Vec<(String, u64)> = [("E6", 8), ("E7", 14), ("E8", 28), ("F4", 7), ("G2", 2)]
        .iter()
        .map(|&(t, k)| (t.to_string(), k))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn e7_limit_case_is_infeasible() {
    let v = json(&["limit-case", "--type", "E7", "--json"]);
    assert_eq!(v["verdict"], "Infeasible");
    assert_eq!(v["refined_bound"], 14);
    assert_eq!(v["k_bound"], 14);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn f4_limit_case_direction() {
    let v = json(&["limit-case", "--type", "F4", "--json"]);
    assert_eq!(v["verdict"], "ConformallyFlat");
    assert_eq!(v["k_bound"], 7);
    assert!(v["refined_bound"].is_null());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["roots", "--type", "G2"]).0, 0);
    assert_eq!(run(&["limit-case", "--type", "A3"]).0, 1);
    assert_eq!(run(&["roots", "--type", "X9"]).0, 2);
    assert_eq!(run(&["roots", "--type", "D3"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    let (code, _, err) = run(&["validate-spectrum", "--input", "/nonexistent/spectrum.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("nonexistent"));
}

#[test]
fn type_errors_name_the_grammar() {
    let (_, _, err) = run(&["codim", "--type", "Q7"]);
    assert!(err.contains("E6, E7, E8, F4 or G2"), "{err}");
}

#[test]
fn binary_exit_codes_match() {
    let bin = env!("CARGO_BIN_EXE_resonance-lab");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["codim", "--type", "E8"]), Some(0));
    assert_eq!(status(&["limit-case", "--type", "B3"]), Some(1));
    assert_eq!(status(&["bounds", "--type", "Z2"]), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--p", "1", "--q", "2", "--steps", "2000", "--seed", "9", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let other = run(&["simulate", "--p", "1", "--q", "2", "--steps", "2000", "--seed", "10", "--json"]);
    assert_ne!(a.1, other.1);
}

#[test]
fn simulate_reads_a_config_file() {
    let cfg = SimulationConfig {
        p: 2,
        q: 2,
        steps: 3000,
        seed: 5,
        ..SimulationConfig::default()
    };
    let path = tmp("sim_config.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let from_file = json(&["simulate", "--config", path.to_str().unwrap(), "--json"]);
    let from_flags = json(&["simulate", "--p", "2", "--q", "2", "--steps", "3000", "--seed", "5", "--json"]);
    assert_eq!(from_file, from_flags);
    assert_eq!(from_file["estimate"]["exponents"].as_array().unwrap().len(), 4);
    assert_eq!(from_file["pairing"]["pass"], true);
}

#[test]
fn validate_spectrum_from_file_matches_import() {
    let imported = json(&["validate-spectrum", "--type", "F4", "--j0", "4", "--q", "9", "--json"]);
    assert_eq!(imported["violations"], serde_json::json!([]));
    assert_eq!(imported["r"], 15);
    let path = tmp("f4_spectrum.json");
    let mut doc = imported["spectrum"].clone();
    doc["schema_version"] = 1.into();
    std::fs::write(&path, doc.to_string()).unwrap();
    let from_file = json(&["validate-spectrum", "--input", path.to_str().unwrap(), "--json"]);
    assert_eq!(from_file, imported);
}

#[test]
fn validate_spectrum_reports_violations() {
    let doc = serde_json::json!({
        "schema_version": 1,
        "p": 1,
        "q": 1,
        "blocks": [
            {"functional": [[1, 1]], "multiplicity": 1, "signature": "Isotropic"},
            {"functional": [[3, 1]], "multiplicity": 1, "signature": "Isotropic"}
        ],
        "chi": [[1, 1]]
    });
    let path = tmp("bad_spectrum.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let v = json(&["validate-spectrum", "--input", path.to_str().unwrap(), "--json"]);
    let rules: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["rule"].as_str().unwrap())
        .collect();
    assert!(rules.contains(&"R2"), "{rules:?}");
    assert!(rules.contains(&"R6"), "{rules:?}");
    let (code, text, _) = run(&["validate-spectrum", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("R2"));
}

#[test]
fn classify_reads_a_sequence_file() {
    let doc = SequenceDocument::from_sequence(&lyapsim::split_family(100));
    let path = tmp("split.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = json(&["classify-seq", "--input", path.to_str().unwrap(), "--json"]);
    assert_eq!(v["report"]["verdict"], "NotUniform");

    let v = json(&["classify-seq", "--family", "scalar", "--n", "3", "--len", "100", "--json"]);
    assert_eq!(v["report"]["verdict"]["Uniform"]["exponent"], -1.0);
    let v = json(&["classify-seq", "--family", "perturbed", "--seed", "3", "--json"]);
    assert!(v["report"]["verdict"].get("Uniform").is_some(), "{v}");
}

#[test]
fn classify_rejects_a_ragged_file() {
    let path = tmp("ragged.json");
    std::fs::write(&path, r#"{"schema_version":1,"times":[1.0],"matrices":[[[1.0,0.0],[0.0]]]}"#).unwrap();
    let (code, _, err) = run(&["classify-seq", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("square"));
}

#[test]
fn text_and_json_agree() {
    let v = json(&["bounds", "--type", "E8", "--json"]);
    let (_, text, _) = run(&["bounds", "--type", "E8"]);
    let k = v["bounds"][0]["k_bound"].as_u64().unwrap();
    assert!(text.contains(&k.to_string()), "{text}");

    let v = json(&["roots", "--type", "E8", "--json"]);
    let (_, text, _) = run(&["roots", "--type", "E8"]);
    assert!(text.contains("240"), "{text}");
    assert_eq!(v["roots"].as_array().unwrap().len(), 240);
    assert_eq!(v["simple"].as_array().unwrap().len(), 8);
}

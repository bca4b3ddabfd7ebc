use std::path::PathBuf;
use std::process::Command as Process;

use fredholm_kp::cli::{run, Command, Format, JobConfig, EXIT_INVALID, EXIT_OK, EXIT_PRECISION, EXIT_PROPERTY};
use fredholm_kp::io::{parse_document, Document};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn invoke(config: &JobConfig) -> (i32, String, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let code = run(config, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn job(command: Command, inputs: &[&str], format: Format) -> JobConfig {
    let mut c = JobConfig::new(command);
    c.inputs = inputs.iter().map(|n| data(n)).collect();
    c.format = format;
    c
}

fn json_of(command: Command, inputs: &[&str]) -> (i32, Value) {
    let (code, out, _) = invoke(&job(command, inputs, Format::Json));
    (code, serde_json::from_str(&out).unwrap())
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let o = Process::new(env!("CARGO_BIN_EXE_fkp")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn coh_single_generator_reports_h1_one() {
    let (code, v) = json_of(Command::Coh, &["single_generator.json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["picture"]["h1"], 1);
    assert_eq!(v["complex"]["h1"], 1);
    assert_eq!(v["picture"]["h2"], "unbounded");
    assert_eq!(v["routes_agree"], true);
    let (_, table, _) = invoke(&job(Command::Coh, &["single_generator.json"], Format::Table));
    assert!(table.contains("unbounded-in-window"));
}

#[test]
fn kp_derive_prints_residual_and_depth() {
    let (code, out, _) = binary(&["kp-derive"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("residual = 0"));
    assert!(out.contains("depth used = 4"));
}

#[test]
fn kdv_derive_reports_the_computed_coefficient() {
    let (code, v) = json_of(Command::KdvDerive, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["third_derivative_coefficient"], "1");
    assert_eq!(v["nonlinear_coefficient"], "12");
    assert_eq!(v["printed_coefficient"], "7");
    assert_eq!(v["stable_in_depth"], true);
}

#[test]
fn malformed_document_exits_one_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"kind": "subspace", "rank": 1, "box": {"t": [-3, 3], "u": [-3, "x"]}}"#).unwrap();
    let (code, _, err) = binary(&["coh", "--input", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("box.u[1]"), "{err}");
    std::fs::write(&p, "{not json").unwrap();
    let (code, _, err) = binary(&["coh", "--input", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn invalid_overrides_and_wrong_kinds_exit_one() {
    let single = data("single_generator.json");
    let (code, _, err) = binary(&["coh", "--input", single.to_str().unwrap(), "--t-lo", "2"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("--t-lo"));
    let (code, _, err) = binary(&["apply", "--input", data("units.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("expected two-variable operator"));
    let (code, _, _) = binary(&["coh"]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn precision_exhaustion_exits_two() {
    let (code, _, err) = binary(&["kp-derive", "--depth-cap", "3"]);
    assert_eq!(code, EXIT_PRECISION);
    assert!(err.contains("precision"));
}

#[test]
fn property_failure_exits_three() {
    let p = data("noncommuting_pair.json");
    let (code, out, _) = binary(&["flow", "--input", p.to_str().unwrap(), "--i", "1", "--j", "0"]);
    assert_eq!(code, EXIT_PROPERTY);
    assert!(out.contains("preserved: no"));
    let (code, _, _) = binary(&["flow", "--input", p.to_str().unwrap(), "--i", "0", "--j", "1"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn json_reports_are_deterministic() {
    let c = job(Command::Coh, &["corpus.json"], Format::Json);
    let first = invoke(&c).1;
    for _ in 0..3 {
        assert_eq!(invoke(&c).1, first);
    }
    let (_, a, _) = binary(&["coh", "--input", data("corpus.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(a, first);
}

#[test]
fn batch_output_keeps_input_order() {
    let (code, batch) = json_of(Command::Coh, &["corpus.json"]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(data("corpus.json")).unwrap();
    let docs: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(batch.as_array().unwrap().len(), docs.len());
    let dir = tempfile::tempdir().unwrap();
    for (i, d) in docs.iter().enumerate() {
        let p = dir.path().join(format!("{i}.json"));
        std::fs::write(&p, d.to_string()).unwrap();
        let mut c = JobConfig::new(Command::Coh);
        c.inputs = vec![p];
        c.format = Format::Json;
        let single: Value = serde_json::from_str(&invoke(&c).1).unwrap();
        assert_eq!(single, batch[i]);
    }
}

#[test]
fn widening_the_box_keeps_the_answer() {
    let mut c = job(Command::Coh, &["rings.json"], Format::Json);
    let narrow = invoke(&c).1;
    c.window.t_lo = Some(-6);
    c.window.t_hi = Some(6);
    let wide: Value = serde_json::from_str(&invoke(&c).1).unwrap();
    let narrow: Value = serde_json::from_str(&narrow).unwrap();
    for i in 0..2 {
        assert_eq!(wide[i]["picture"], narrow[i]["picture"]);
    }
}

#[test]
fn fredholm_schur_starstar_ord_and_apply() {
    let (_, v) = json_of(Command::Fredholm, &["rings.json"]);
    assert_eq!(v[0]["report"]["fredholm"], true);
    let (_, v) = json_of(Command::Fredholm, &["single_generator.json"]);
    assert_eq!(v["report"]["fredholm"], false);

    let (_, v) = json_of(Command::Schur, &["rings.json"]);
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["algebra_closed"], "yes");
    assert!(v["witness"].is_array());

    let (_, v) = json_of(Command::Starstar, &["starstar.json"]);
    assert_eq!(v[0]["decision"], "yes");
    assert_eq!(v[1]["decision"], "no");

    let (_, v) = json_of(Command::Ord, &["units.json"]);
    assert_eq!((v["ord_a"].clone(), v["ord_b"].clone(), v["ord_ab"].clone()), (3.into(), (-1).into(), 2.into()));

    let (code, v) = json_of(Command::Apply, &["apply.json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v[0]["result"]["terms"], serde_json::json!([[0, 4, "3"]]));
    assert_eq!(v[1]["result"]["terms"], serde_json::json!([[1, 0, "1"]]));
}

#[test]
fn dress_output_feeds_the_parshin_flow() {
    let (code, v) = json_of(Command::Dress, &["dressing.json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["commuting"], true);
    let pair = parse_document(&v["pair"].to_string()).unwrap();
    assert!(matches!(pair, Document::Pair(_)));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pair.json");
    std::fs::write(&p, v["pair"].to_string()).unwrap();
    let (code, out, _) = binary(&["flow", "--input", p.to_str().unwrap(), "--i", "1", "--j", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("preserved: yes"));
}

#[test]
fn kp_flows_from_documents_and_symbolic() {
    let (code, v) = json_of(Command::Flow { n: 3, i: 0, j: 1 }, &["lax.json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["well_posed"], true);
    let (code, v) = json_of(Command::Flow { n: 2, i: 0, j: 1 }, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["images"][0], serde_json::json!([1, "1*a1^(2) + 2*a2^(1)"]));
}

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use clap::Parser;
use num_bigint::BigInt;
use serde_json::Value;
use toric_k::{corpus, CechComplex, Fan, FanSheaf, GroupRingElement, Subfan};
use toric_k_cli::{run, Cli, ExitStatus, JobReport};

fn fans_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fans")
}

fn fan_path(name: &str) -> String {
    fans_dir().join(format!("{name}.json")).display().to_string()
}

fn report(args: &[&str]) -> JobReport {
    let mut argv = vec!["toric-k"];
    argv.extend_from_slice(args);
    run(&Cli::parse_from(argv))
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-k")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn big(v: &Value) -> BigInt {
    match v {
        Value::Number(n) => BigInt::from(n.as_i64().unwrap()),
        Value::String(s) => s.parse().unwrap(),
        _ => panic!("not an integer: {v}"),
    }
}

fn element(group: &Arc<toric_k::QuotientLattice>, terms: &Value) -> GroupRingElement {
    let terms = terms.as_array().unwrap().iter().map(|t| {
        let coords = t[0].as_array().unwrap().iter().map(big).collect();
        (coords, big(&t[1]))
    });
    GroupRingElement::from_terms(group, terms).unwrap()
}

fn cone_of(fan: &Fan, ids: &Value) -> usize {
    let ids: Vec<usize> = ids
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    fan.find(&ids).unwrap()
}

fn cochain(complex: &CechComplex, v: &Value) -> toric_k::Cochain {
    let level = v["level"].as_u64().unwrap() as usize;
    let mut map = BTreeMap::new();
    for c in v["components"].as_array().unwrap() {
        let tuple: Vec<usize> = c["slot"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        let group = complex.stalk_of(level, &tuple).unwrap();
        map.insert(tuple, element(group, &c["terms"]));
    }
    complex.cochain(level, map).unwrap()
}

fn section(sheaf: &FanSheaf, v: &Value) -> toric_k::Section {
    let fan = sheaf.fan();
    let maxes: Vec<usize> = v["domain_max_cones"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| cone_of(fan, c))
        .collect();
    let domain = Subfan::closure(fan, maxes).unwrap();
    let mut map = BTreeMap::new();
    for c in v["components"].as_array().unwrap() {
        let m = cone_of(fan, &c["cone"]);
        map.insert(m, element(sheaf.stalk(m), &c["terms"]));
    }
    sheaf.section(&domain, map).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["info", "corpus:p2"]).0, 0);
    assert_eq!(bin(&["info", &fan_path("p1xp1")]).0, 0);
    assert_eq!(bin(&["info", "no/such/file.json"]).0, 2);
    assert_eq!(bin(&["check-exactness", &fan_path("quadric")]).0, 2);
    assert_eq!(
        bin(&["kclass", "--generators", "[[1]]", "--shifts", "[[0]]", "--symbolic"]).0,
        2
    );
    assert_eq!(bin(&["k0-affine", "corpus:p2", "--cone", "0,2"]).0, 0);
    assert_eq!(bin(&["k0-affine", "corpus:p2", "--cone", "7"]).0, 2);
    assert_eq!(bin(&["not-a-command"]).0, 2);
    let rejected = r#"[[[[2],1]],[[[0],1],[[3],-1]]]"#;
    assert_eq!(bin(&["k0-global", "corpus:p1", "--element", rejected]).0, 1);
    let accepted = r#"[[[[2],1]],[[[0],1],[[1],1],[[3],-1]]]"#;
    assert_eq!(bin(&["k0-global", "corpus:p1", "--element", accepted]).0, 0);
}

#[test]
fn malformed_fan_files_report_a_location() {
    let dir = std::env::temp_dir().join(format!("toric-k-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\n  \"lattice_rank\": 2,\n  \"rays\": [[1, 0], [0, 1]\n}\n").unwrap();
    let r = report(&["info", path.to_str().unwrap()]);
    assert_eq!(r.exit_status, ExitStatus::InputError);
    let msg = r.results["error"].as_str().unwrap();
    assert!(msg.contains("bad.json:"), "{msg}");
    std::fs::write(
        &path,
        r#"{"lattice_rank": 2, "rays": [[1, 0], [1, 0]], "max_cones": [[0, 1]]}"#,
    )
    .unwrap();
    assert_eq!(
        report(&["info", path.to_str().unwrap()]).exit_status,
        ExitStatus::InputError
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn nonprimitive_rays_warn() {
    let dir = std::env::temp_dir().join(format!("toric-k-cli-warn-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p1.json");
    std::fs::write(
        &path,
        r#"{"lattice_rank": 1, "rays": [[2], [-1]], "max_cones": [[0], [1]]}"#,
    )
    .unwrap();
    let r = report(&["info", path.to_str().unwrap()]);
    assert_eq!(r.exit_status, ExitStatus::Success);
    assert_eq!(r.warnings.len(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["--json", "--trials", "5", "check-exactness", "corpus:f2"],
        vec!["--json", "--trials", "5", "check-flasque", "corpus:bl1p2"],
        vec!["--json", "--trials", "5", "k0-global", "corpus:p2"],
    ] {
        let (c1, a) = bin(&args);
        let (c2, b) = bin(&args);
        assert_eq!((c1, &a), (c2, &b));
        assert_eq!(c1, 0);
    }
    let a = report(&["--seed", "1", "--trials", "5", "check-exactness", "corpus:p2"]).to_json();
    let b = report(&["--seed", "2", "--trials", "5", "check-exactness", "corpus:p2"]).to_json();
    assert_ne!(a, b);
}

#[test]
fn exactness_certificates_round_trip() {
    let fan = corpus::p1xp1();
    let complex = CechComplex::build(&fan);
    let r = report(&["--trials", "6", "check-exactness", "corpus:p1xp1", "--level", "1"]);
    assert_eq!(r.exit_status, ExitStatus::Success);
    assert_eq!(r.certificates.len(), 6);
    for cert in &r.certificates {
        let z = cochain(&complex, &cert["cocycle"]);
        let y = cochain(&complex, &cert["preimage"]);
        assert!(complex.is_cocycle(&z));
        assert_eq!(complex.d(&y).unwrap(), z);
    }
}

#[test]
fn flasque_certificates_round_trip() {
    let fan = corpus::hirzebruch(1);
    let sheaf = FanSheaf::a0(&fan);
    let r = report(&["--trials", "6", "check-flasque", "corpus:f1"]);
    assert_eq!(r.exit_status, ExitStatus::Success);
    for cert in &r.certificates {
        let s = section(&sheaf, &cert["section"]);
        let e = section(&sheaf, &cert["extension"]);
        assert!(sheaf.section_check(&s) && sheaf.section_check(&e));
        assert_eq!(e.domain().members().len(), fan.len());
        assert_eq!(sheaf.restrict_section(&e, s.domain()).unwrap(), s);
    }
}

#[test]
fn global_rejection_witness_is_a_real_disagreement() {
    let fan = corpus::p1();
    let sheaf = FanSheaf::a0(&fan);
    let r = report(&[
        "k0-global",
        "corpus:p1",
        "--element",
        r#"[[[[2],1]],[[[0],1],[[3],-1]]]"#,
    ]);
    assert_eq!(r.exit_status, ExitStatus::VerificationFailure);
    let cert = &r.certificates[0];
    let face = cone_of(&fan, &cert["common_face"]);
    let [a, b] = [0, 1].map(|i| element(sheaf.stalk(face), &cert["restrictions"][i]));
    assert_ne!(a, b);
}

#[test]
fn hilbert_and_kclass_outputs() {
    let r = report(&["hilbert", "corpus:quadric", "--cone", "0,1"]);
    assert_eq!(r.results["hilbert_basis"], serde_json::json!([[0, 1], [1, 0], [2, -1]]));
    let r = report(&["hilbert", "corpus:quadric", "--cone", "0,1", "--primal"]);
    assert_eq!(r.results["hilbert_basis"], serde_json::json!([[1, 0], [1, 1], [1, 2]]));
    let r = report(&[
        "kclass",
        "--generators",
        "[[1,0],[0,1],[-1,0]]",
        "--shifts",
        "[[0,0],[3,1],[0,2]]",
    ]);
    assert_eq!(r.exit_status, ExitStatus::Success);
    assert_eq!(r.results["virtual"], Value::Bool(false));
    assert_eq!(r.results["terms"].as_array().unwrap().len(), 3);
    let r = report(&[
        "kclass",
        "--fan",
        "corpus:p2",
        "--cone",
        "0,1",
        "--shifts",
        "[[1,0],[0,1]]",
    ]);
    assert_eq!(r.exit_status, ExitStatus::Success);
}

#[test]
fn documented_examples() {
    let r = report(&["info", &fan_path("p1")]);
    assert_eq!(r.statistics["cone_count"], 3);
    assert_eq!(
        (&r.results["smooth"], &r.results["complete"]),
        (&Value::Bool(true), &Value::Bool(true))
    );
    assert_eq!(report(&["info", &fan_path("empty")]).statistics["cone_count"], 1);
    assert_eq!(
        report(&["info", &fan_path("quadric")]).results["smooth"],
        Value::Bool(false)
    );
    let r = report(&["k0-affine", "corpus:p2", "--cone", "zero"]);
    assert_eq!(r.results["group_ring"], "ℤ");
    let r = report(&["k0-affine", "corpus:quadric", "--cone", "0,1"]);
    assert_eq!(r.results["m_sigma_rank"], 2);
    assert!(r.results.contains_key("note"));
    let r = report(&["kclass", "--generators", "[[1]]", "--shifts", "[[0],[1],[1]]"]);
    assert_eq!(r.results["class"], "χ^0 + 2χ^1");
    let chars = r#"[[[[1,1],1]],[[[1,1],1]],[[[1,1],1]]]"#;
    assert_eq!(
        report(&["k0-global", "corpus:p2", "--element", chars]).results["member"],
        Value::Bool(true)
    );
    let consts = r#"[[[[0,0],3]],[[[0,0],3]],[[[0,0],3]]]"#;
    assert_eq!(
        report(&["k0-global", "corpus:p2", "--element", consts]).results["member"],
        Value::Bool(true)
    );
    assert_eq!(report(&["check-exactness", "corpus:p1"]).results["solved"], 25);
    assert_eq!(
        report(&["check-flasque", &fan_path("f2")]).exit_status,
        ExitStatus::Success
    );
    let r = report(&["hilbert", "corpus:a2", "--cone", "0,1"]);
    assert_eq!(r.results["hilbert_basis"], serde_json::json!([[0, 1], [1, 0]]));
}

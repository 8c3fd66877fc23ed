//! End-to-end runs of the `nzflow` binary on job, graph and flow files.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nzflow::flow::{verify_flow, FlowAssignment, MultiGraph};
use nzflow::ladders::{build_ladder, LadderKind};
use nzflow::synth::Certificate;
use serde_json::json;
use tempfile::TempDir;

fn nzflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nzflow"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, value: &serde_json::Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn ladder_file(dir: &TempDir, name: &str, kind: LadderKind) -> PathBuf {
    let (g, _) = build_ladder(kind).unwrap();
    write(dir, name, &serde_json::to_value(&g).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn d5_job(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "d5.json",
        &json!({"group": {"kind": "dihedral", "n": 5}, "connection": ["r", "r^-1", "r^2", "r^3", "s"]}),
    )
}

#[test]
fn info_reports_hypotheses() {
    let dir = TempDir::new().unwrap();
    let o = nzflow(&["info", "--input", s(&d5_job(&dir))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in [
        "supersolvable: true",
        "derived subgroup order: 5",
        "applicable: true",
        "valency: 5",
    ] {
        assert!(text.contains(line), "{line} missing from\n{text}");
    }

    let z8 = write(
        &dir,
        "z8.json",
        &json!({"group": {"kind": "cyclic", "n": 8}}),
    );
    assert!(stdout(&nzflow(&["info", "--input", s(&z8)])).contains("nilpotent: true"));

    let a4 = write(
        &dir,
        "a4.json",
        &json!({"group": {"kind": "table", "table": common::a4().table_rows()}}),
    );
    let facts = dir.path().join("a4-facts.json");
    let o = nzflow(&["info", "--input", s(&a4), "--out", s(&facts)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("applicable: false"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(facts).unwrap()).unwrap();
    assert_eq!(v["report"]["supersolvable"], false);
    assert_eq!(v["order"], 12);
}

#[test]
fn synth_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let job = d5_job(&dir);
    let cert_path = dir.path().join("cert.json");
    let dot = dir.path().join("cert.dot");
    let o = nzflow(&[
        "synth",
        "--input",
        s(&job),
        "--out",
        s(&cert_path),
        "--dot",
        s(&dot),
        "--trace",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("[dihedral-2p]"));

    let text = std::fs::read_to_string(&cert_path).unwrap();
    let cert: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(cert.order, 10);
    let again: FlowAssignment =
        serde_json::from_str(&serde_json::to_string(&cert.flow).unwrap()).unwrap();
    assert_eq!(again, cert.flow);

    let graph_path = dir.path().join("graph.json");
    assert_eq!(
        nzflow(&["build", "--input", s(&job), "--out", s(&graph_path)])
            .status
            .code(),
        Some(0)
    );
    let g: MultiGraph =
        serde_json::from_str(&std::fs::read_to_string(&graph_path).unwrap()).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (10, 25));
    assert!(verify_flow(&g, &cert.flow, 3).unwrap().ok);

    for input in [&job, &graph_path] {
        let o = nzflow(&[
            "verify",
            "--input",
            s(input),
            "--flow",
            s(&cert_path),
            "--k",
            "3",
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("valid nowhere-zero 3-flow"));
    }

    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("color=red").count(), 5, "one rung per s-edge");
    assert_eq!(dot.matches("color=black").count(), 20);
}

#[test]
fn synth_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let job = d5_job(&dir);
    let a = nzflow(&["synth", "--input", s(&job), "--trace"]);
    let b = nzflow(&["synth", "--input", s(&job), "--trace"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d5 =
        |xs: serde_json::Value| json!({"group": {"kind": "dihedral", "n": 5}, "connection": xs});

    let valency3 = write(&dir, "v3.json", &d5(json!(["r", "r^-1", "s"])));
    assert_eq!(
        nzflow(&["synth", "--input", s(&valency3)]).status.code(),
        Some(3)
    );

    let nongenerating = write(&dir, "ng.json", &d5(json!(["r", "r^-1", "r^2", "r^3"])));
    assert_eq!(
        nzflow(&["synth", "--input", s(&nongenerating)])
            .status
            .code(),
        Some(4)
    );

    let a4 = write(
        &dir,
        "a4.json",
        &json!({"group": {"kind": "table", "table": common::a4().table_rows()}, "connection": (1..12).collect::<Vec<_>>()}),
    );
    assert_eq!(nzflow(&["synth", "--input", s(&a4)]).status.code(), Some(3));

    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        "{\"group\": {\"kind\": \"dihedral\", \"n\": 5},\n \"connection\": [\"r\" \"s\"]}",
    )
    .unwrap();
    let o = nzflow(&["synth", "--input", s(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.json:2:"));

    let not_inverse_closed = write(
        &dir,
        "nic.json",
        &d5(json!([{"element": "r", "multiplicity": 2}, "r^-1", "s"])),
    );
    assert_eq!(
        nzflow(&["synth", "--input", s(&not_inverse_closed)])
            .status
            .code(),
        Some(2)
    );

    let unknown_word = write(&dir, "w.json", &d5(json!(["t"])));
    assert_eq!(
        nzflow(&["info", "--input", s(&unknown_word)]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        nzflow(&["info", "--input", s(&missing)]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_rejects_a_tampered_flow() {
    let dir = TempDir::new().unwrap();
    let job = d5_job(&dir);
    let cert_path = dir.path().join("cert.json");
    nzflow(&["synth", "--input", s(&job), "--out", s(&cert_path)]);
    let mut cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    cert["flow"][0]["value"] = json!(0);
    let bad = write(&dir, "bad.json", &cert["flow"]);
    let o = nzflow(&["verify", "--input", s(&job), "--flow", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("zero_value"));
}

#[test]
fn oracle_on_ladders() {
    let dir = TempDir::new().unwrap();
    // CL_n has a nowhere-zero 3-flow iff n is even
    let cl3 = ladder_file(&dir, "cl3.json", LadderKind::Circular { n: 3 });
    let o = nzflow(&["oracle", "--input", s(&cl3), "--max-rank", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "no nowhere-zero 3-flow\n");

    // M_n has one iff n is odd
    let m3 = ladder_file(&dir, "m3.json", LadderKind::Mobius { n: 3 });
    let witness = dir.path().join("witness.json");
    let o = nzflow(&[
        "oracle",
        "--input",
        s(&m3),
        "--max-rank",
        "10",
        "--out",
        s(&witness),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = nzflow(&[
        "verify",
        "--input",
        s(&m3),
        "--flow",
        s(&witness),
        "--k",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));

    // CL_29 has cycle rank 3*29 - 2*29 + 1 = 30
    let big = ladder_file(&dir, "cl29.json", LadderKind::Circular { n: 29 });
    let o = nzflow(&["oracle", "--input", s(&big), "--max-rank", "18"]);
    assert_eq!(o.status.code(), Some(6));
}

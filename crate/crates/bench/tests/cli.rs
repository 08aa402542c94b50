use std::path::Path;
use std::process::{Command, Output};

use darcyflow_bench::config::{ProblemKind, ProblemSpec};

fn darcyflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darcyflow")).args(args).output().unwrap()
}

fn write_config(dir: &Path, spec: &ProblemSpec) -> String {
    let path = dir.join("problem.toml");
    std::fs::write(&path, spec.to_toml()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &ProblemSpec::preset(ProblemKind::FiveSpot));
    let out = dir.path().join("out");
    let o = darcyflow(&["run", &config, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["scalars.csv", "iterations.csv", "five_spot.csv", "solution.vtk"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let table = std::fs::read_to_string(out.join("five_spot.csv")).unwrap();
    assert!(table.starts_with("alpha,formalism,weight,element,p_injection,"));
    let iterations = std::fs::read_to_string(out.join("iterations.csv")).unwrap();
    assert!(iterations.starts_with("i,res_v,res_p\n"));
}

#[test]
fn repeated_sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ProblemSpec::preset(ProblemKind::FiveSpot);
    spec.mesh.nx = 6;
    spec.mesh.ny = 6;
    let config = write_config(dir.path(), &spec);
    let tables: Vec<Vec<u8>> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = darcyflow(&[
                "sweep",
                &config,
                "--param",
                "alpha",
                "--values",
                "1,20,1000",
                "--formulation",
                "LS",
                "--out-dir",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out.join("five_spot.csv")).unwrap()
        })
        .collect();
    assert_eq!(tables[0], tables[1]);
    assert_eq!(String::from_utf8_lossy(&tables[0]).lines().count(), 4);
}

#[test]
fn overrides_reach_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &ProblemSpec::preset(ProblemKind::FiveSpot));
    let out = dir.path().join("out");
    let o = darcyflow(&["run", &config, "--formulation", "LS", "--weight", "1", "--nele", "100", "--order", "2", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("five_spot.csv")).unwrap();
    let row = table.lines().nth(1).unwrap();
    assert!(row.starts_with("1.0,LS,1,Q9,"), "{row}");
    assert!(row.ends_with(",100"), "{row}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &ProblemSpec::preset(ProblemKind::Mms));
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let o = darcyflow(&["run", &config, "--tol", "1e-30", "--nele", "16", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let o = darcyflow(&["run", &config, "--theta", "1.5"]);
    assert_eq!(o.status.code(), Some(3));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[problem]\nid = \"mms\"\nunknown = 1\n").unwrap();
    let o = darcyflow(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = darcyflow(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = darcyflow(&["sweep", &config, "--param", "colour", "--values", "1"]);
    assert_eq!(o.status.code(), Some(3));

    let o = darcyflow(&["verify", "12"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_reports_selected_criteria() {
    let o = darcyflow(&["verify", "9"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.starts_with("PASS 9 "), "{text}");
}

#[test]
fn preset_output_parses() {
    for kind in ProblemKind::ALL {
        let o = darcyflow(&["preset", &kind.to_string()]);
        assert!(o.status.success());
        let spec = ProblemSpec::from_toml(&String::from_utf8(o.stdout).unwrap()).unwrap();
        assert_eq!(spec, ProblemSpec::preset(kind));
    }
}

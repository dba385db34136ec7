use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sparsiqc::lmi::read_sdpa;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparsiqc"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

/// Generates `instances` chains of length `n` into `dir/inst` and returns the
/// first instance file.
fn generate_chain(dir: &Path, n: usize, seed: u64, instances: usize) -> PathBuf {
    let cfg = dir.join("gen.json");
    fs::write(
        &cfg,
        format!(r#"{{"schema_version":1,"n":{n},"topology":{{"kind":"chain"}},"seed":{seed},"instances":{instances}}}"#),
    )
    .unwrap();
    let out = dir.join("inst");
    assert!(run(&[
        "generate",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&out)
    ])
    .status
    .success());
    out.join("instance_0.json")
}

/// Drops every timing field so that manifests of repeated runs compare equal.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in ["build_ms", "solve_ms", "total_ms"] {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn generate_writes_checked_instances_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let first = generate_chain(dir.path(), 5, 42, 2);
    let inst = read_json(&first);
    assert_eq!(inst["schema_version"], 1);
    assert_eq!(inst["generator"]["seed"], 42);
    let report = &inst["report"];
    for key in ["condition1", "condition2"] {
        assert!(report[key].as_array().unwrap().iter().all(|b| b == true));
    }
    assert_eq!(report["condition3"], true);
    let manifest = read_json(&dir.path().join("inst/manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["instances"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("inst/instance_1.json").exists());
}

#[test]
fn generate_output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gen.json");
    fs::write(
        &cfg,
        r#"{"n":6,"topology":{"kind":"scale_free","alpha":2.5},"seed":3,"instances":3}"#,
    )
    .unwrap();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("j{jobs}"));
        assert!(run(&[
            "--jobs",
            jobs,
            "generate",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&out)
        ])
        .status
        .success());
    }
    for k in 0..3 {
        let name = format!("instance_{k}.json");
        assert_eq!(
            fs::read(dir.path().join("j1").join(&name)).unwrap(),
            fs::read(dir.path().join("j3").join(&name)).unwrap()
        );
    }
}

#[test]
fn invalid_exponent_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"n":10,"topology":{"kind":"scale_free","alpha":0.5},"seed":1}"#,
    )
    .unwrap();
    let out = run(&[
        "generate",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponent"));
}

#[test]
fn unknown_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("v9.json");
    fs::write(
        &cfg,
        r#"{"schema_version":9,"n":3,"topology":{"kind":"chain"},"seed":1}"#,
    )
    .unwrap();
    let out = run(&[
        "generate",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_both_forms_agree_on_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_chain(dir.path(), 5, 42, 1);
    let out = dir.path().join("an");
    let res = run(&[
        "analyze",
        path_str(&inst),
        "--form",
        "both",
        "--grid",
        "log:1e-2:1e2:20",
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success());
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["grid"].as_array().unwrap().len(), 22);
    let outcomes = m["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 2);
    for o in outcomes {
        assert_eq!(o["records"].as_array().unwrap().len(), 22);
        assert!(out.join(o["certificate"].as_str().unwrap()).exists());
    }
    assert_eq!(outcomes[0]["verdict"], outcomes[1]["verdict"]);
    assert_eq!(m["verdict"], outcomes[0]["verdict"]);
    let t = &m["timing"];
    let (b, s, total) = (
        t["build_ms"].as_f64().unwrap(),
        t["solve_ms"].as_f64().unwrap(),
        t["total_ms"].as_f64().unwrap(),
    );
    assert!(b >= 0.0 && s >= 0.0 && total >= b + s);
}

#[test]
fn analyze_manifest_is_reproducible_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_chain(dir.path(), 4, 9, 1);
    let mut manifests = Vec::new();
    for (k, jobs) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let res = run(&[
            "--jobs",
            jobs,
            "analyze",
            path_str(&inst),
            "--form",
            "sparse",
            "--grid",
            "log:0.1:10:5",
            "--out",
            path_str(&out),
        ]);
        assert!(res.status.success());
        let mut m = read_json(&out.join("manifest.json"));
        strip_timing(&mut m);
        manifests.push(m);
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn scaled_subsystem_makes_verdict_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_chain(dir.path(), 3, 1, 1);
    let grid = "list:0,1,10";
    let base = dir.path().join("base");
    assert!(run(&[
        "analyze",
        path_str(&inst),
        "--form",
        "both",
        "--grid",
        grid,
        "--out",
        path_str(&base)
    ])
    .status
    .success());
    assert_eq!(
        read_json(&base.join("manifest.json"))["verdict"],
        "robustly_stable"
    );
    let mut v = read_json(&inst);
    // Scale the output matrix of the first subsystem's G_pq block.
    let c = &mut v["system"]["subsystems"][0]["g_pq"]["c"];
    scale_numbers(c, 10.0);
    let scaled = dir.path().join("scaled.json");
    fs::write(&scaled, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = dir.path().join("an");
    let res = run(&[
        "analyze",
        path_str(&scaled),
        "--form",
        "sparse",
        "--grid",
        grid,
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success());
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["verdict"], "inconclusive");
}

fn scale_numbers(v: &mut Value, k: f64) {
    match v {
        Value::Number(n) => *v = Value::from(n.as_f64().unwrap() * k),
        Value::Array(items) => items.iter_mut().for_each(|x| scale_numbers(x, k)),
        Value::Object(map) => map.values_mut().for_each(|x| scale_numbers(x, k)),
        _ => {}
    }
}

#[test]
fn export_block_sizes_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_chain(dir.path(), 3, 5, 1);
    for (form, size) in [("sparse", 14), ("lumped", 6)] {
        let file = dir.path().join(format!("{form}.dat-s"));
        assert!(run(&[
            "export",
            path_str(&inst),
            "--freq",
            "1.5",
            "--form",
            form,
            "--out",
            path_str(&file)
        ])
        .status
        .success());
        let text = fs::read_to_string(&file).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "1");
        assert_eq!(lines[2], size.to_string());
        let data = read_sdpa(text.as_bytes()).unwrap();
        assert_eq!(data.w.order(), size);
        // Writing the parsed data again reproduces the file.
        let again = sparsiqc::lmi::SdpFeasibilityProblem::new(data.w, data.q).unwrap();
        let mut buf = Vec::new();
        sparsiqc::lmi::write_sdpa(&again, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }
    let both = run(&[
        "export",
        path_str(&inst),
        "--freq",
        "1",
        "--form",
        "both",
        "--out",
        path_str(&dir.path().join("x")),
    ]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn benchmark_rows_per_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(
        &cfg,
        r#"{"schema_version":1,"topology":{"kind":"chain"},"sizes":[3,4],"trials":2,"seed":11,"frequency":1.0}"#,
    )
    .unwrap();
    let out = dir.path().join("b");
    assert!(run(&[
        "benchmark",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&out)
    ])
    .status
    .success());
    let mut reader = csv::Reader::from_path(out.join("benchmark.csv")).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        &headers[..9],
        [
            "N",
            "trial",
            "form",
            "build_ms",
            "solve_ms",
            "order",
            "nnz",
            "fill_ratio",
            "margin"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for form in ["lumped", "sparse"] {
        assert_eq!(rows.iter().filter(|r| &r[2] == form).count(), 4);
    }
    // Orders before the real embedding are N and 3N - 2.
    for r in &rows {
        let n: usize = r[0].parse().unwrap();
        let order: usize = r[5].parse().unwrap();
        let expect = if &r[2] == "lumped" {
            2 * n
        } else {
            2 * (3 * n - 2)
        };
        assert_eq!(order, expect);
    }
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["command"], "benchmark");
    assert_eq!(m["seed"], 11);
}

#[test]
fn single_size_single_trial_gives_one_row_per_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(
        &cfg,
        r#"{"topology":{"kind":"chain"},"sizes":[5],"trials":1,"seed":2,"forms":["sparse"]}"#,
    )
    .unwrap();
    let out = dir.path().join("b");
    assert!(run(&[
        "benchmark",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&out)
    ])
    .status
    .success());
    let mut reader = csv::Reader::from_path(out.join("benchmark.csv")).unwrap();
    assert_eq!(reader.records().count(), 1);
}

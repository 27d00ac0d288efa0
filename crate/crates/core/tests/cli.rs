use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use k3c_core::lattice::{
    build_k3_lattice, build_polarized_lattice, eichler_transvection, LatticeVector, K3_FIRST_U,
};
use k3c_core::metric::segment_space;
use serde_json::{json, Value};
use tempfile::TempDir;

fn k3c(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3c"))
        .args(args)
        .current_dir(dir)
        .env("K3C_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn generic_family() -> Value {
    // deterministic pseudo-random coefficients
    let coeff = |n: usize, s: f64| -> Value {
        (0..n)
            .map(|k| {
                let x = (k as f64 * 12.9898 + s).sin() * 43758.5453;
                let y = (k as f64 * 78.233 + s).sin() * 12345.678;
                json!([x - x.floor() - 0.5, y - y.floor() - 0.5])
            })
            .collect()
    };
    json!({"A": coeff(9, 1.0), "B": coeff(13, 2.0)})
}

#[test]
fn lattice_signature_of_k3() {
    let dir = TempDir::new().unwrap();
    let built = k3c(dir.path(), &["lattice", "build", "--out", "k3.json"]);
    assert!(built.status.success());
    let out = k3c(dir.path(), &["lattice", "signature", "k3.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(
        (v["positive"].as_u64(), v["negative"].as_u64()),
        (Some(3), Some(19))
    );
    assert!(!out.stderr.is_empty());
}

#[test]
fn lattice_quotient_and_classify() {
    let dir = TempDir::new().unwrap();
    let pol = build_polarized_lattice(1).unwrap();
    let mut e = vec![0i64; 22];
    e[K3_FIRST_U + 2] = 1;
    let iso = pol.from_ambient(&LatticeVector(e)).unwrap();
    let iso_json = serde_json::to_string(&iso.0).unwrap();
    let out = k3c(
        dir.path(),
        &["lattice", "quotient", "--degree", "1", "--iso", &iso_json],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["signature"]["positive"], 1);
    assert_eq!(v["signature"]["negative"], 18);

    let line: Vec<String> = iso.0.iter().map(|x| format!("{x}/1")).collect();
    write(dir.path(), "line.json", &json!([line]));
    let out = k3c(
        dir.path(),
        &[
            "lattice",
            "classify",
            "--degree",
            "1",
            "--subspace",
            "line.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["quotient_signature"]["positive"], 1);
}

#[test]
fn degenerate_classify_type_ii() {
    let dir = TempDir::new().unwrap();
    let k3 = build_k3_lattice();
    let mut e = vec![0i64; 22];
    e[K3_FIRST_U] = 1;
    let mut x = vec![0i64; 22];
    x[K3_FIRST_U + 2] = 1;
    let t = eichler_transvection(&k3, &LatticeVector(e), &LatticeVector(x)).unwrap();
    write(dir.path(), "t.json", &json!({ "T": t }));
    let out = k3c(
        dir.path(),
        &["degenerate", "classify", "--monodromy", "t.json"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["type"], "II");
    assert!(v.get("stratum").is_some());
}

#[test]
fn fibration_analyze_generic() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "generic.json", &generic_family());
    let out = k3c(dir.path(), &["fibration", "analyze", "generic.json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["euler_sum"], 24);
    assert_eq!(v["count"], 24);
}

#[test]
fn fibration_mesh_writes_metric() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "generic.json", &generic_family());
    let out = k3c(
        dir.path(),
        &[
            "fibration",
            "mesh",
            "generic.json",
            "--res",
            "24",
            "--landmarks",
            "12",
            "--out",
            "mesh.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let v: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("mesh.json")).unwrap()).unwrap();
    assert_eq!(v["space"]["n"], 12);
    let max = v["space"]["dist"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .fold(0.0, f64::max);
    assert!((max - 1.0).abs() < 1e-12);
}

#[test]
fn gh_segments() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "seg2.json",
        &serde_json::to_value(segment_space(2).unwrap()).unwrap(),
    );
    write(
        dir.path(),
        "seg3.json",
        &serde_json::to_value(segment_space(3).unwrap()).unwrap(),
    );
    let out = k3c(
        dir.path(),
        &["gh", "seg2.json", "seg3.json", "--iters", "50"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= hi && hi <= 0.25);
}

#[test]
fn torus_modulo_minus_one() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "g.json",
        &json!({"gram": [[1.0, 0.0], [0.0, 1.0]]}),
    );
    let out = k3c(
        dir.path(),
        &[
            "torus",
            "--gram",
            "g.json",
            "--samples",
            "4",
            "--mod-minus-one",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    // fixed points 4, free orbits (16 - 4) / 2
    assert_eq!(v["n"], 10);
}

#[test]
fn collapse_phi_and_probe() {
    let dir = TempDir::new().unwrap();
    let input = json!({"variant": "kummer_interior", "torus": {"gram": [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]}, "samples": 2});
    write(dir.path(), "in.json", &input);
    let out = k3c(dir.path(), &["collapse", "phi", "--input", "in.json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["meta"]["variant"], "kummer_interior");

    write(
        dir.path(),
        "path.json",
        &json!({"points": [input.clone(), input.clone(), input]}),
    );
    let out = k3c(dir.path(), &["collapse", "probe", "--path", "path.json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert!(v["distances"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d.as_f64() == Some(0.0)));
    assert!(v.get("steps").is_some());
}

#[test]
fn output_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "seg3.json",
        &serde_json::to_value(segment_space(3).unwrap()).unwrap(),
    );
    write(
        dir.path(),
        "seg5.json",
        &serde_json::to_value(segment_space(5).unwrap()).unwrap(),
    );
    let args = [
        "--seed",
        "7",
        "gh",
        "seg3.json",
        "seg5.json",
        "--iters",
        "30",
    ];
    let a = k3c(dir.path(), &args);
    let b = k3c(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    write(dir.path(), "generic.json", &generic_family());
    let args = [
        "fibration",
        "mesh",
        "generic.json",
        "--res",
        "16",
        "--landmarks",
        "8",
    ];
    assert_eq!(k3c(dir.path(), &args).stdout, k3c(dir.path(), &args).stdout);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = k3c(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["code"], "usage");
    let out = k3c(dir.path(), &["gh", "only-one.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_reports_position() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        "{\"rank\": 2,\n \"gram\": [[0, 1], [1, 0]\n",
    )
    .unwrap();
    let out = k3c(dir.path(), &["lattice", "signature", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["code"], "parse");
    assert!(v["error"]["location"]
        .as_str()
        .unwrap()
        .starts_with("bad.json:"));
}

#[test]
fn domain_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    // a constant discriminant is not a K3 family
    write(
        dir.path(),
        "flat.json",
        &json!({"A": [[1.0, 0.0]], "B": []}),
    );
    let out = k3c(dir.path(), &["fibration", "analyze", "flat.json"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(stdout_json(&out)["error"]["code"].is_string());

    let out = k3c(dir.path(), &["lattice", "signature", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
}

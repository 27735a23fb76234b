use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bloch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bloch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a report ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bands_of_free_operator_follow_cosine() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "zero.json", r#"{"periods":[2],"values":[0,0]}"#);
    let out = bloch(&["bands", s(&f), "--resolution", "8"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k1,lambda1,lambda2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let e = 2.0 * (std::f64::consts::PI * r[0]).cos().abs();
        assert!(
            (r[1] + e).abs() < 1e-12 && (r[2] - e).abs() < 1e-12,
            "{r:?}"
        );
    }
}

#[test]
fn bands_of_constant_potential_have_no_gaps() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.json", r#"{"periods":[2,2],"values":[1,1,1,1]}"#);
    let csv = dir.path().join("bands.csv");
    let out = bloch(&["bands", s(&f), "--resolution", "16", "--out", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("no gaps"));
    let r = report(&out);
    let spec = r["payload"]["spectrum"].as_array().unwrap();
    assert_eq!(spec.len(), 1);
    assert!((spec[0]["lower"].as_f64().unwrap() + 3.0).abs() < 1e-9);
    assert!((spec[0]["upper"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 16 * 16);
    assert!(text.starts_with("k1,k2,lambda1,lambda2,lambda3,lambda4\n"));
}

#[test]
fn bands_of_alternating_potential_report_the_gap() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "alt.json", r#"{"periods":[2],"values":[1,-1]}"#);
    let csv = dir.path().join("b.csv");
    let out = bloch(&["bands", s(&f), "--out", s(&csv)]);
    assert_eq!(code(&out), 0);
    assert!(
        stderr(&out).contains("gap: (-1.000, 1.000), width 2.000"),
        "{}",
        stderr(&out)
    );
    let gaps = report(&out)["payload"]["gaps"].clone();
    assert_eq!(gaps.as_array().unwrap().len(), 1);
}

#[test]
fn bands_rejects_complex_and_malformed_files() {
    let dir = TempDir::new().unwrap();
    let cplx = write(&dir, "c.json", r#"{"periods":[2],"values":[[0,2],[0,-2]]}"#);
    let out = bloch(&["bands", s(&cplx)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not real"));

    for (name, body) in [
        ("short.json", r#"{"periods":[3],"values":[1,2]}"#),
        ("garbage.json", "not json"),
        ("zero_period.json", r#"{"periods":[0],"values":[]}"#),
        ("triple.json", r#"{"periods":[1],"values":[[1,2,3]]}"#),
        ("extra.json", r#"{"periods":[1],"values":[1],"x":1}"#),
        ("nonfinite.json", r#"{"periods":[1],"values":[1e999]}"#),
    ] {
        let f = write(&dir, name, body);
        let out = bloch(&["bands", s(&f)]);
        assert_eq!(code(&out), 2, "{name}: {}", stderr(&out));
    }
    let out = bloch(&["bands", "/nonexistent/file.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn resolution_must_match_dimension() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "z.json", r#"{"periods":[2,2],"values":[0,0,0,0]}"#);
    let out = bloch(&["bands", s(&f), "--resolution", "4", "5", "6"]);
    assert_eq!(code(&out), 2);
    let out = bloch(&["bands", s(&f), "--resolution", "0"]);
    assert_eq!(code(&out), 2);
    let out = bloch(&["bands", s(&f), "--resolution", "4", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 21);
}

#[test]
fn entire_graph_verdicts() {
    let dir = TempDir::new().unwrap();
    let constant = write(
        &dir,
        "k.json",
        r#"{"periods":[2,3],"values":[[-1,2],[-1,2],[-1,2],[-1,2],[-1,2],[-1,2]]}"#,
    );
    let out = bloch(&["entire-graph", s(&constant)]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["payload"]["holds"], Value::Bool(true));
    assert_eq!(r["payload"]["l"], serde_json::json!([0, 0]));
    assert_eq!(r["payload"]["K"], serde_json::json!([-1.0, 2.0]));

    let exotic = write(&dir, "e.json", r#"{"periods":[2],"values":[[0,2],[0,-2]]}"#);
    let out = bloch(&["entire-graph", s(&exotic)]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["payload"]["l"], serde_json::json!([1]));
    assert_eq!(r["payload"]["K"], serde_json::json!([0.0, 0.0]));
    assert!(r["payload"]["residual"].as_f64().unwrap() < 1e-8);

    let real = write(&dir, "r.json", r#"{"periods":[3],"values":[0.5,-0.2,1.1]}"#);
    let out = bloch(&["entire-graph", s(&real)]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["payload"]["holds"], Value::Bool(false));
}

#[test]
fn tolerance_flag_is_validated_and_applied() {
    let dir = TempDir::new().unwrap();
    let real = write(&dir, "r.json", r#"{"periods":[2],"values":[1,-1]}"#);
    let out = bloch(&["--tolerance", "-1", "entire-graph", s(&real)]);
    assert_eq!(code(&out), 2);
    // A tolerance above every possible relative mismatch accepts anything.
    let out = bloch(&["entire-graph", s(&real), "--tolerance", "10"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn isospectral_verdicts() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.json",
        r#"{"periods":[3],"values":[[0.3,1],[-2,0.5],[1,0]]}"#,
    );
    let a_shift = write(
        &dir,
        "b.json",
        r#"{"periods":[3],"values":[[1,0],[0.3,1],[-2,0.5]]}"#,
    );
    assert_eq!(code(&bloch(&["isospectral", s(&a), s(&a_shift)])), 0);

    let e = write(&dir, "e.json", r#"{"periods":[2],"values":[[0,2],[0,-2]]}"#);
    let f = write(&dir, "f.json", r#"{"periods":[2],"values":[[0,-2],[0,2]]}"#);
    assert_eq!(code(&bloch(&["isospectral", s(&e), s(&f)])), 0);

    let p = write(&dir, "p.json", r#"{"periods":[2],"values":[1,-1]}"#);
    let z = write(&dir, "z.json", r#"{"periods":[2],"values":[0,0]}"#);
    let out = bloch(&["isospectral", s(&p), s(&z)]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["payload"]["isospectral"], Value::Bool(false));

    let out = bloch(&["isospectral", s(&p), s(&a)]);
    assert_eq!(code(&out), 2);
}

fn read_values(path: &Path) -> Vec<[f64; 2]> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| [x[0].as_f64().unwrap(), x[1].as_f64().unwrap()])
        .collect()
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn construct_exotic_two_site() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let out = bloch(&[
        "construct-exotic",
        "--periods",
        "2",
        "--l",
        "1",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let files = files_in(&out_dir);
    assert_eq!(files.len(), 2);
    let mut signs: Vec<f64> = files
        .iter()
        .map(|f| {
            let v = read_values(f);
            assert!(v
                .iter()
                .all(|x| x[0].abs() < 1e-7 && (x[1].abs() - 2.0).abs() < 1e-7));
            assert!((v[0][1] + v[1][1]).abs() < 1e-7);
            v[0][1].signum()
        })
        .collect();
    signs.sort_by(f64::total_cmp);
    assert_eq!(signs, vec![-1.0, 1.0]);
    for f in &files {
        assert_eq!(code(&bloch(&["entire-graph", s(f)])), 0);
    }
}

#[test]
fn construct_exotic_separable_lift_and_trivial_case() {
    let dir = TempDir::new().unwrap();
    let lift = dir.path().join("lift");
    let out = bloch(&[
        "construct-exotic",
        "--periods",
        "2",
        "2",
        "--l",
        "1",
        "1",
        "--out",
        s(&lift),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let files = files_in(&lift);
    assert!(!files.is_empty());
    for f in &files {
        let out = bloch(&["entire-graph", s(f)]);
        assert_eq!(code(&out), 0);
        assert_eq!(report(&out)["payload"]["l"], serde_json::json!([1, 1]));
    }

    let triv = dir.path().join("triv");
    let out = bloch(&[
        "construct-exotic",
        "--periods",
        "1",
        "--l",
        "0",
        "--out",
        s(&triv),
    ]);
    assert_eq!(code(&out), 0);
    let files = files_in(&triv);
    assert_eq!(files.len(), 1);
    assert_eq!(read_values(&files[0]), vec![[0.0, 0.0]]);
}

#[test]
fn construct_exotic_rejects_bad_shift() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().join("o");
    let out = bloch(&[
        "construct-exotic",
        "--periods",
        "2",
        "--l",
        "2",
        "--out",
        s(&o),
    ]);
    assert_eq!(code(&out), 2);
    let out = bloch(&[
        "construct-exotic",
        "--periods",
        "2",
        "2",
        "--l",
        "1",
        "--out",
        s(&o),
    ]);
    assert_eq!(code(&out), 2);
    let out = bloch(&["construct-exotic", "--l", "1", "--out", s(&o)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_suites() {
    let out = bloch(&["verify", "--suite", "counting"]);
    assert_eq!(code(&out), 0);
    assert!(
        stderr(&out).contains("classes=2, solutions=3, bound=4: PASS"),
        "{}",
        stderr(&out)
    );
    for suite in ["lemma21", "borg1d"] {
        let out = bloch(&["verify", "--suite", suite]);
        assert_eq!(code(&out), 0, "{suite}: {}", stderr(&out));
        assert!(!stderr(&out).contains("FAIL"));
        assert_eq!(report(&out)["payload"]["passed"], Value::Bool(true));
    }
    assert_eq!(code(&bloch(&["verify", "--suite", "nope"])), 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "r.json",
        r#"{"periods":[2,2],"values":[0.3,-0.1,0.7,1.2]}"#,
    );
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let a = strip(report(&bloch(&["entire-graph", s(&f), "--seed", "7"])));
    let b = strip(report(&bloch(&["entire-graph", s(&f), "--seed", "7"])));
    assert_eq!(a, b);
    assert_eq!(a["seed"], serde_json::json!(7));
    let c = strip(report(&bloch(&["entire-graph", s(&f), "--seed", "8"])));
    assert_ne!(a["inputs_digest"], c["inputs_digest"]);

    let o1 = dir.path().join("o1");
    let o2 = dir.path().join("o2");
    let x = strip(report(&bloch(&[
        "construct-exotic",
        "--periods",
        "3",
        "--l",
        "1",
        "--out",
        s(&o1),
    ])));
    let y = strip(report(&bloch(&[
        "construct-exotic",
        "--periods",
        "3",
        "--l",
        "1",
        "--out",
        s(&o2),
    ])));
    assert_eq!(x, y);
    for (p, q) in files_in(&o1).iter().zip(files_in(&o2)) {
        assert_eq!(fs::read(p).unwrap(), fs::read(q).unwrap());
    }
}

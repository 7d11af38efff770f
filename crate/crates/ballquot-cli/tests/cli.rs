use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballquot"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const FIELD_5: &str = r#"{"d":5,"alpha":[-11,0]}"#;
const REFLECTION: &str = r#"{"kind":"ints","entries":[[1,0,0],[0,-1,0],[0,0,-1]]}"#;

#[test]
fn classify_integer_reflection_about_line() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", REFLECTION);
    let out = dir.path().join("out.json");
    let o = run(&[
        "classify",
        "--matrix",
        m.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["class"]["label"], "ReflectionAboutLine");
    assert_eq!(r["tool"], "ballquot");
    assert_eq!(r["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn numeric_borderline_is_inconclusive_unless_assumed() {
    let dir = TempDir::new().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"kind":"numeric","entries":[[[1,0],[0,0],[0,0]],[[0,0],[-1,0],[0,0]],[[0,0],[0,0],[-1,0]]]}"#,
    );
    assert_eq!(
        run(&["classify", "--matrix", m.to_str().unwrap()]).status.code(),
        Some(4)
    );
    let o = run(&["classify", "--matrix", m.to_str().unwrap(), "--assume-repeated"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "{not json");
    assert_eq!(
        run(&["classify", "--matrix", m.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(
        run(&["classify", "--matrix", "/nonexistent/m.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn genus_at_or_below_threshold_exits_3_with_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&[
        "certificate",
        "genus",
        "--g",
        "2",
        "--sinh2",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(&out)["result"]["bound"]["status"], "infeasible");
    let o = run(&["certificate", "genus", "--g", "2", "--sinh2", "72"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn genus_bound_value() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&[
        "certificate",
        "genus",
        "--g",
        "2",
        "--sinh2",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&out)["result"]["bound"]["value"].as_f64().unwrap();
    let expected = 200.0 * std::f64::consts::PI / 7.0;
    assert!((v - expected).abs() <= 1e-12 * expected, "{v}");
}

#[test]
fn inadmissible_lattice_form_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", FIELD_5);
    let form = write(dir.path(), "form.json", r#"{"kind":"standard"}"#);
    let o = run(&[
        "lattice",
        "search",
        "--field",
        f.to_str().unwrap(),
        "--form",
        form.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reports_are_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", FIELD_5);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let (ca, cb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (out, csv, extra) in [(&a, &ca, None), (&b, &cb, Some("--sequential"))] {
        let mut args = vec![
            "lattice",
            "search",
            "--field",
            f.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend(["--csv", csv.to_str().unwrap()]);
        args.extend(extra);
        assert_eq!(run(&args).status.code(), Some(0));
    }
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["result"], rb["result"]);
    assert_eq!(fs::read(&ca).unwrap(), fs::read(&cb).unwrap());
    let again = dir.path().join("c.json");
    let args = [
        "lattice",
        "search",
        "--field",
        f.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn input_hash_tracks_file_contents() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", REFLECTION);
    let out = dir.path().join("1.json");
    run(&[
        "classify",
        "--matrix",
        m.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let h1 = report(&out)["input_hash"].clone();
    write(
        dir.path(),
        "m.json",
        r#"{"kind":"ints","entries":[[-1,0,0],[0,1,0],[0,0,-1]]}"#,
    );
    run(&[
        "classify",
        "--matrix",
        m.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_ne!(h1, report(&out)["input_hash"]);
}

#[test]
fn certify_reproduces_intersection_verdict() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", FIELD_5);
    let a = write(dir.path(), "a.json", REFLECTION);
    let b = write(
        dir.path(),
        "b.json",
        r#"{"kind":"ints","entries":[[-1,0,0],[0,1,0],[0,0,-1]]}"#,
    );
    let out = dir.path().join("c.json");
    let args = [
        "lattice",
        "certify",
        "--field",
        f.to_str().unwrap(),
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["verdict"]["verdict"], "intersect_at_isolated_point");
    assert_eq!(r["result"]["verdict"]["product_label"], "ReflectionAboutPoint");
}

#[test]
fn hodge_build_writes_integer_polarization() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", FIELD_5);
    let v = write(dir.path(), "v.json", r#"{"kind":"ints","entries":[0,0,1]}"#);
    let out = dir.path().join("h.json");
    let args = [
        "hodge",
        "build",
        "--field",
        f.to_str().unwrap(),
        "--v",
        v.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["polarization"]["skew"], true);
    assert_eq!(r["result"]["polarization"]["entries"].as_array().unwrap().len(), 12);
    assert_eq!(r["result"]["riemann"]["holds"], true);
}

#[test]
fn volume_curve_geodesic_disc() {
    let dir = TempDir::new().unwrap();
    let c = write(dir.path(), "c.json", r#"{"family":"line"}"#);
    let out = dir.path().join("v.json");
    let args = [
        "volume",
        "curve",
        "--curve",
        c.to_str().unwrap(),
        "--r",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let ratio = report(&out)["result"]["rows"][0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 5e-3, "{ratio}");
}

#[test]
fn unknown_curve_family_exits_2() {
    let dir = TempDir::new().unwrap();
    let c = write(dir.path(), "c.json", r#"{"family":"spiral"}"#);
    let o = run(&["volume", "curve", "--curve", c.to_str().unwrap(), "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

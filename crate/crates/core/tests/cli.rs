use std::path::Path;
use std::process::{Command, Output};

fn kslant(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kslant")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const BUILD: &[&str] =
    &["build", "--seed", "circle:a=0.6,r=0.8", "--op", "I", "--depth", "2", "--phases", "0,0", "--samples", "2048", "--out", "c.json"];

#[test]
fn build_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = kslant(dir.path(), BUILD);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("c.json")).unwrap()).unwrap();
    let levels = doc.as_array().expect("a chain is an array of curves");
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[2]["meta"]["level"], 2);
    assert_eq!(levels[2]["points"].as_array().unwrap().len(), 2048);

    let o = kslant(dir.path(), &["verify", "--in", "c.json", "--checks", "spherical,kslant:1:axis=0,0,1", "--tol", "1e-6"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let table = stdout(&o);
    assert!(table.contains("kslant:1") && table.contains("spherical"));
    assert!(!table.contains("FAIL"));

    // the same curve is not 0-slant: exit 1
    let o = kslant(dir.path(), &["verify", "--in", "c.json", "--checks", "kslant:0", "--tol", "1e-6"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn gallery_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gallery", "--name", "constant-precession", "--a", "0.6", "--b", "0.8", "--w", "1", "--samples", "1024", "--format", "csv"];
    let o = kslant(dir.path(), &args);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "s,x,y,z");
    assert_eq!(rows.len(), 1025);
    // shortest round-trip decimals
    for field in rows[1..].iter().flat_map(|r| r.split(',')) {
        let v: f64 = field.parse().unwrap();
        assert_eq!(kslant::io::fmt_num(v), field);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kslant(dir.path(), BUILD)), 0);
    let first = std::fs::read(dir.path().join("c.json")).unwrap();
    assert_eq!(code(&kslant(dir.path(), BUILD)), 0);
    assert_eq!(first, std::fs::read(dir.path().join("c.json")).unwrap());
    let g = ["gallery", "--name", "spherical-helix", "--a", "0.6", "--samples", "300"];
    assert_eq!(kslant(dir.path(), &g).stdout, kslant(dir.path(), &g).stdout);
}

#[test]
fn round_trip_through_csv_keeps_residuals() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kslant(dir.path(), BUILD)), 0);
    let o = kslant(dir.path(), &["export", "--in", "c.json", "--level", "2", "--format", "csv", "--out", "c2.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let check = |input: &str| -> serde_json::Value {
        let out = format!("{input}.report.json");
        let o = kslant(dir.path(), &["report", "--in", input, "--checks", "spherical,kslant:1", "--tol", "1e-6", "--out", &out]);
        assert_eq!(code(&o), 0);
        serde_json::from_slice(&std::fs::read(dir.path().join(out)).unwrap()).unwrap()
    };
    let (a, b) = (check("c.json"), check("c2.csv"));
    let ra = a["report"]["checks"].as_array().unwrap();
    let rb = b["report"]["checks"].as_array().unwrap();
    assert_eq!(ra.len(), 2);
    for (x, y) in ra.iter().zip(rb) {
        assert_eq!(x["name"], y["name"]);
        let d = (x["residual"].as_f64().unwrap() - y["residual"].as_f64().unwrap()).abs();
        assert!(d <= 1e-12, "{}: {d:e}", x["name"]);
    }
    assert_eq!(a["passed"], true);
}

#[test]
fn frames_export() {
    let dir = tempfile::tempdir().unwrap();
    let o = kslant(dir.path(), &["gallery", "--name", "circular-helix", "--a", "0.6", "--b", "0.8", "--samples", "64", "--out", "h.json"]);
    assert_eq!(code(&o), 0);
    let o = kslant(dir.path(), &["export", "--in", "h.json", "--format", "csv", "--frames"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let ki = header.iter().position(|h| *h == "kappa").unwrap();
    let ti = header.iter().position(|h| *h == "tau").unwrap();
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert!((f[ki].parse::<f64>().unwrap() - 0.6).abs() < 1e-6);
        assert!((f[ti].parse::<f64>().unwrap() - 0.8).abs() < 1e-6);
    }
    // frames need CSV
    let o = kslant(dir.path(), &["export", "--in", "h.json", "--format", "json", "--frames"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["build", "--seed", "circle:a=0.6", "--op", "I", "--depth", "5", "--out", "x.json"],
        vec!["build", "--seed", "circle:a=0.6", "--op", "I", "--depth", "2", "--phases", "0", "--out", "x.json"],
        vec!["build", "--seed", "wobble", "--op", "I", "--out", "x.json"],
        vec!["build", "--seed", "circle:a=0.6", "--op", "K", "--out", "x.json"],
        vec!["gallery", "--name", "circular-helix", "--a", "0.6", "--b", "0", "--out", "x.json"],
        vec!["verify", "--in", "missing.json", "--checks", "spherical"],
        vec!["verify", "--in", "c.json", "--checks", "bogus"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = kslant(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    let left: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(left.is_empty(), "{left:?}");
    assert_eq!(code(&kslant(dir.path(), &["--help"])), 0);
}

#[test]
fn unsafe_depth_lifts_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["build", "--seed", "circle:a=0.6", "--op", "I", "--depth", "5", "--unsafe-depth", "--samples", "64"];
    assert_eq!(code(&kslant(dir.path(), &args)), 0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "seed = \"circle:a=0.6,r=0.8\"\nop = \"I\"\ndepth = 2\nphases = [0.0, 0.0]\nsamples = 2048\nout = \"cfg.json\"\n",
    )
    .unwrap();
    let o = kslant(dir.path(), &["--config", "run.toml", "build"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&kslant(dir.path(), BUILD)), 0);
    assert_eq!(std::fs::read(dir.path().join("cfg.json")).unwrap(), std::fs::read(dir.path().join("c.json")).unwrap());

    // a flag overrides the file
    let o = kslant(dir.path(), &["--config", "run.toml", "build", "--samples", "16", "--out", "small.json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("small.json")).unwrap()).unwrap();
    assert_eq!(doc[0]["points"].as_array().unwrap().len(), 16);

    std::fs::write(dir.path().join("bad.toml"), "sedd = \"circle\"\n").unwrap();
    assert_eq!(code(&kslant(dir.path(), &["--config", "bad.toml", "build"])), 2);
}

fn schema(name: &str) -> jsonschema::Validator {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats");
    let load = |n: &str| -> serde_json::Value { serde_json::from_slice(&std::fs::read(dir.join(n)).unwrap()).unwrap() };
    let curve = load("curve.schema.json");
    let resource = jsonschema::Resource::from_contents(curve).unwrap();
    jsonschema::options().with_resource("json-schema:///curve.schema.json", resource).build(&load(name)).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &serde_json::Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn outputs_match_the_published_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let read = |n: &str| -> serde_json::Value { serde_json::from_slice(&std::fs::read(dir.path().join(n)).unwrap()).unwrap() };
    assert_eq!(code(&kslant(dir.path(), BUILD)), 0);
    assert_valid(&schema("chain.schema.json"), &read("c.json"));
    let o = kslant(dir.path(), &["gallery", "--name", "j3-series", "--a", "0.6", "--b", "0.8", "--samples", "50", "--out", "j3.json"]);
    assert_eq!(code(&o), 0);
    let curve_schema = schema("curve.schema.json");
    let mut j3 = read("j3.json");
    assert_valid(&curve_schema, &j3);
    j3["points"][0] = serde_json::json!([1.0, 2.0]);
    assert!(!curve_schema.is_valid(&j3));
    let o = kslant(dir.path(), &["report", "--in", "c.json", "--checks", "spherical,kslant:1,prime,characterization", "--out", "r.json"]);
    assert!(code(&o) <= 1);
    assert_valid(&schema("report.schema.json"), &read("r.json"));
    let o = kslant(dir.path(), &["report", "--in", "c.json", "--level", "1", "--checks", "unit-speed"]);
    assert_valid(&schema("report.schema.json"), &serde_json::from_slice(&o.stdout).unwrap());
}

use std::path::Path;
use std::process::{Command, Output};

use ncfa_core::{CheckRow, ClassifyRow, SweepRow, ValidityRow};
use serde::de::DeserializeOwned;
use tempfile::TempDir;

fn ncfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncfa")).args(args).env_remove("NCFA_JOBS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn rows<T: DeserializeOwned>(bytes: &[u8]) -> Vec<T> {
    csv::Reader::from_reader(bytes).deserialize().collect::<Result<_, _>>().expect("csv parses into records")
}

fn element_file(dir: &TempDir, name: &str, algebra: &str, values: &[[f64; 2]]) -> String {
    let blocks: Vec<Vec<Vec<[f64; 2]>>> = values.iter().map(|v| vec![vec![*v]]).collect();
    let doc = ncfa_core::ElementDoc { algebra_id: algebra.into(), blocks };
    let path = dir.path().join(name);
    std::fs::write(&path, doc.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_examples() {
    let o = ncfa(&["verify", "--model", "cyclic:6", "--checks", "plancherel,hy,ds", "--samples", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let parsed: Vec<CheckRow> = rows(&o.stdout);
    assert!(parsed.len() >= 3000);
    assert!(parsed.iter().all(|r| r.holds));
    for name in ["plancherel", "hausdorff_young", "donoho_stark"] {
        assert!(parsed.iter().any(|r| r.name == name), "{name}");
    }

    let o = ncfa(&["verify", "--model", "tl:1.4142135623730951", "--checks", "up2", "--grid-pq", "conjugate:1.0:2.0:0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let parsed: Vec<CheckRow> = rows(&o.stdout);
    assert!(parsed.iter().all(|r| r.name == "up2" && r.regime == "same_branch"));
}

#[test]
fn verify_all_checks_on_s3() {
    let o = ncfa(&["verify", "--model", "s3", "--samples", "40", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let parsed: Vec<CheckRow> = rows(&o.stdout);
    for name in ["plancherel", "hausdorff_young", "holder", "young", "norm_upper", "norm_lower", "donoho_stark", "hirschman_beckner", "up1", "up2", "norm1_lower", "norm1_upper", "entropy_monotone"] {
        assert!(parsed.iter().any(|r| r.name == name), "missing {name}");
    }
    assert!(parsed.iter().filter(|r| !r.holds).all(|r| r.name == "up2" && r.regime == "cross_branch"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 unexpected failures"));
}

#[test]
fn check_aliases() {
    let a = ncfa(&["verify", "--model", "cyclic:3", "--checks", "lemma37,lemma43", "--samples", "10"]);
    let b = ncfa(&["verify", "--model", "cyclic:3", "--checks", "norm1,entropy_monotone", "--samples", "10"]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.csv");
    let out_s = out.to_str().unwrap();
    for args in [
        vec!["verify", "--model", "cyclic:0", "--out", out_s],
        vec!["verify", "--model", "cyclic:4", "--checks", "plancherel,nope", "--out", out_s],
        vec!["verify", "--model", "cyclic:4", "--samples", "0", "--out", out_s],
        vec!["sweep", "--model", "cyclic:4", "--grid", "1:0:0.5", "--out", out_s],
        vec!["sweep", "--model", "cyclic:4", "--grid", "0:1:0", "--out", out_s],
        vec!["sweep", "--model", "cyclic:4", "--restarts", "0", "--out", out_s],
        vec!["anomaly", "--model", "cyclic:2", "--grid", "0:0.25:0.25", "--out", out_s],
        vec!["validate-model", "--model", "tl:1.2", "--out", out_s],
        vec!["search", "--model", "cyclic:3", "--p", "x", "--q", "2", "--out", out_s],
    ] {
        let o = ncfa(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!out.exists(), "{args:?} wrote output");
    }
}

#[test]
fn sweep_cyclic4_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = ncfa(&["sweep", "--model", "cyclic:4", "--grid", "0:1.25:0.25", "--restarts", "50", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&out).unwrap();
    let parsed: Vec<SweepRow> = rows(&bytes);
    assert_eq!(parsed.len(), 36);
    for r in &parsed {
        assert!(r.empirical_c <= r.k + 1e-6, "{r:?}");
        assert!(r.seed == 1 && r.restarts == 50);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &parsed {
        w.serialize(r).unwrap();
    }
    assert_eq!(w.into_inner().unwrap(), bytes, "re-serialization is byte-identical");
}

#[test]
fn sweep_s3_small_grid() {
    let o = ncfa(&["sweep", "--model", "s3", "--grid", "0:1:0.5", "--restarts", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows::<SweepRow>(&o.stdout).len(), 9);
}

#[test]
fn per_axis_grids() {
    let o = ncfa(&["sweep", "--model", "cyclic:3", "--grid-p", "0:1:0.5", "--grid-q", "0.25:0.75:0.25", "--restarts", "4"]);
    assert_eq!(code(&o), 0);
    let parsed: Vec<SweepRow> = rows(&o.stdout);
    assert_eq!(parsed.len(), 9);
    assert_eq!((parsed[1].inv_p, parsed[1].inv_q), (0.0, 0.5));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["sweep", "--model", "cyclic:5", "--grid", "0:1:0.5", "--restarts", "6", "--seed", "11"];
    let one = ncfa(&[&args[..], &["--jobs", "1"]].concat());
    let four = ncfa(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);

    let v = ["verify", "--model", "abelian:2x2", "--samples", "30", "--seed", "5"];
    assert_eq!(ncfa(&[&v[..], &["--jobs", "1"]].concat()).stdout, ncfa(&[&v[..], &["--jobs", "3"]].concat()).stdout);
}

#[test]
fn classify_examples() {
    let dir = TempDir::new().unwrap();
    let delta1 = element_file(&dir, "d1.json", "cyclic:4/+", &[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
    let o = ncfa(&["classify", "--model", "cyclic:4", "--element", &delta1, "--p", "1", "--q", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "TraceOneProjection, ratio=2.000000, K=2.000000");

    let generic = element_file(&dir, "g.json", "cyclic:4/+", &[[1.0, 0.0], [0.3, -0.2], [-0.7, 0.2], [0.1, 0.0]]);
    let out = dir.path().join("c.csv");
    let o = ncfa(&["classify", "--model", "cyclic:4", "--element", &generic, "--p", "1", "--q", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("NoFamily, ratio="), "{text}");
    assert!(text.contains("ratio<K"), "{text}");
    let row: Vec<ClassifyRow> = rows(&std::fs::read(&out).unwrap());
    assert!(row[0].ratio < row[0].k && row[0].gap > 0.0);
}

#[test]
fn classify_rejects_bad_elements() {
    let dir = TempDir::new().unwrap();
    let wrong_shape = dir.path().join("w.json");
    let doc = ncfa_core::ElementDoc { algebra_id: "cyclic:4/+".into(), blocks: vec![vec![vec![[1.0, 0.0]; 2]; 2]; 4] };
    std::fs::write(&wrong_shape, doc.to_json()).unwrap();
    let wrong_count = element_file(&dir, "n.json", "cyclic:4/+", &[[1.0, 0.0], [0.0, 0.0]]);
    let other_model = element_file(&dir, "o.json", "cyclic:3/+", &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
    let garbage = dir.path().join("bad.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    for path in [wrong_shape.to_str().unwrap(), &wrong_count, &other_model, garbage.to_str().unwrap(), "/nonexistent/x.json"] {
        let o = ncfa(&["classify", "--model", "cyclic:4", "--element", path, "--p", "1", "--q", "1"]);
        assert_eq!(code(&o), 2, "{path}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn anomaly_finds_the_cross_branch_counterexample() {
    let o = ncfa(&["anomaly", "--model", "cyclic:2", "--grid", "0.5:1.5:0.25", "--samples", "500"]);
    assert_eq!(code(&o), 0);
    let parsed: Vec<ValidityRow> = rows(&o.stdout);
    let corner = parsed.iter().find(|r| r.inv_p == 1.0 && r.inv_q == 1.0).expect("(1,1) row");
    assert!(corner.violated && corner.regime == "cross_branch");
    assert!((corner.min_slack + 2.0 * 2f64.ln()).abs() < 1e-9, "{}", corner.min_slack);
    assert_eq!(corner.witness_hash.len(), 16);

    let o = ncfa(&["anomaly", "--model", "cyclic:2", "--grid-pq", "conjugate:1:1.9:0.1", "--samples", "200"]);
    assert_eq!(code(&o), 0);
    let parsed: Vec<ValidityRow> = rows(&o.stdout);
    assert!(!parsed.is_empty());
    assert!(parsed.iter().all(|r| r.min_slack >= -1e-9), "{parsed:?}");
}

#[test]
fn model_documents() {
    let dir = TempDir::new().unwrap();
    let toml_path = dir.path().join("m.toml");
    std::fs::write(&toml_path, "kind = \"tl\"\ndelta = 1.618033988749895\n").unwrap();
    let json_path = dir.path().join("m.json");
    std::fs::write(&json_path, r#"{"kind": "abelian", "factors": [2, 3]}"#).unwrap();
    for path in [&toml_path, &json_path] {
        let o = ncfa(&["validate-model", "--model", path.to_str().unwrap(), "--samples", "20"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let table_path = dir.path().join("s3.json");
    std::fs::write(&table_path, serde_json::to_string(&ncfa_core::s3().to_doc()).unwrap()).unwrap();
    let doc_path = dir.path().join("g.toml");
    std::fs::write(&doc_path, "kind = \"nonabelian\"\nirrep_table_path = \"s3.json\"\n").unwrap();
    let o = ncfa(&["verify", "--model", doc_path.to_str().unwrap(), "--checks", "plancherel,ds", "--samples", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"cyclic\"\nn = \"four\"\n").unwrap();
    assert_eq!(code(&ncfa(&["validate-model", "--model", bad.to_str().unwrap()])), 2);
}

#[test]
fn text_format_is_structured() {
    let o = ncfa(&["search", "--model", "cyclic:3", "--p", "inf", "--q", "2", "--restarts", "4", "--format", "text"]);
    assert_eq!(code(&o), 0);
    #[derive(serde::Deserialize)]
    struct Doc {
        rows: Vec<SweepRow>,
    }
    let doc: Doc = toml::from_str(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(doc.rows.len(), 1);
    assert_eq!(doc.rows[0].inv_p, 0.0);
    assert!((doc.rows[0].k - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn search_saves_best_element() {
    let dir = TempDir::new().unwrap();
    let saved = dir.path().join("best.json");
    let o = ncfa(&["search", "--model", "cyclic:4", "--p", "1", "--q", "1", "--restarts", "4", "--save-element", saved.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(Path::new(&saved).exists());
    let o = ncfa(&["classify", "--model", "cyclic:4", "--element", saved.to_str().unwrap(), "--p", "1", "--q", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("ratio=2.000000, K=2.000000"));
}

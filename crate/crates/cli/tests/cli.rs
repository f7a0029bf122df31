use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use catsd::document::ProblemDocument;
use catsd::engine;
use catsd::export::read_distribution;
use catsd::likeness::assign;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn catsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catsd")).args(args).env_remove("CATSD_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_soldiers_is_feasible() {
    let o = catsd(&["check", path(&fixture("soldiers.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for c in ["C1", "C2", "C3", "C4"] {
        assert!(out.contains(&format!("{c}: feasible, ε* = ")), "{out}");
    }
}

#[test]
fn check_json_report() {
    let o = catsd(&["check", "--json", path(&fixture("soldiers.json"))]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cats = v["categories"].as_array().unwrap();
    assert_eq!(cats.len(), 4);
    assert!(cats.iter().all(|c| c["epsilon"].as_f64().unwrap() > 0.0));
}

#[test]
fn contradictory_deck_names_the_category() {
    let o = catsd(&["check", path(&fixture("contradictory.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("C3: infeasible"));
    assert!(stderr(&o).contains("C3"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"hierarchy\": [").unwrap();
    let o = catsd(&["check", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    assert_eq!(catsd(&["check"]).status.code(), Some(2));
    assert_eq!(catsd(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(catsd(&["check", "/nonexistent/x.json"]).status.code(), Some(2));
}

#[test]
fn smaa_is_reproducible_and_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let f = fixture("soldiers.json");
    for out in [&a, &b] {
        let o = catsd(&["smaa", path(&f), "--samples", "500", "--seed", "7", "--out", path(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let names = ["distribution.json", "manifest.json", "node_g0.csv", "node_g1.csv", "node_g2.csv", "node_g3.csv"];
    for n in names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["samples"], 500);
    assert_eq!(manifest["input_sha256"].as_str().unwrap().len(), 64);

    // Every CSV cell equals the corresponding structured value.
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(a.join("distribution.json")).unwrap()).unwrap();
    let columns: Vec<String> =
        doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    for node in doc["nodes"].as_array().unwrap() {
        let file = format!("node_{}.csv", node["node"].as_str().unwrap());
        let text = fs::read_to_string(a.join(file)).unwrap();
        let mut lines = text.lines();
        let header = split_csv(lines.next().unwrap());
        for (row, action) in lines.zip(node["actions"].as_array().unwrap()) {
            let cells = split_csv(row);
            assert_eq!(cells[0], action["action"].as_str().unwrap());
            for (k, c) in columns.iter().enumerate() {
                let at = header.iter().position(|h| *h == format!("marginal {c}")).unwrap();
                let csv: f64 = cells[at].parse().unwrap();
                assert_eq!(csv, action["marginals"][k].as_f64().unwrap());
            }
            for e in action["exact"].as_array().unwrap() {
                let labels: Vec<&str> = e["set"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
                let label = if labels.len() > 1 { format!("{{{}}}", labels.join(",")) } else { labels[0].to_string() };
                let at = header.iter().position(|h| *h == label).unwrap();
                let csv: f64 = cells[at].parse().unwrap();
                assert_eq!(csv, e["percent"].as_f64().unwrap());
            }
        }
    }
}

/// Splits a CSV line, honoring double quotes.
fn split_csv(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            c => out.last_mut().unwrap().push(c),
        }
    }
    out
}

#[test]
fn single_sample_matches_direct_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("soldiers.json");
    let o = catsd(&["smaa", path(&f), "--samples", "1", "--seed", "3", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dist = read_distribution(dir.path()).unwrap();

    let model = ProblemDocument::from_json(&fs::read_to_string(&f).unwrap()).unwrap().compile().unwrap();
    let mut settings = model.smaa;
    settings.samples = 1;
    settings.seed = 3;
    let params = engine::sample_parameters(&model, &settings).unwrap();
    let point: Vec<_> = params.iter().map(|p| p[0].clone()).collect();
    for (ni, node) in dist.nodes.iter().enumerate() {
        for (ai, a) in model.problem.actions.iter().enumerate() {
            let set = assign(&model.problem, &a.performance, node, &point).unwrap();
            assert_eq!(dist.exact(ni, ai, set), 100.0);
        }
    }
    let csv = fs::read_to_string(dir.path().join("node_g0.csv")).unwrap();
    for row in csv.lines().skip(1) {
        assert!(split_csv(row)[1..].iter().all(|c| c == "0.000" || c == "100.000"), "{row}");
    }
}

#[test]
fn large_run_matches_the_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = catsd(&["smaa", path(&fixture("soldiers.json")), "--samples", "100000", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g0 = fs::read_to_string(dir.path().join("node_g0.csv")).unwrap();
    let header = split_csv(g0.lines().next().unwrap());
    let a1 = split_csv(g0.lines().nth(1).unwrap());
    assert_eq!(a1[header.iter().position(|h| h == "C1").unwrap()], "100.000");

    let pof = fs::read_to_string(dir.path().join("node_g3.csv")).unwrap();
    let header = split_csv(pof.lines().next().unwrap());
    let a4 = split_csv(pof.lines().nth(4).unwrap());
    let c3: f64 = a4[header.iter().position(|h| h == "C3").unwrap()].parse().unwrap();
    let c5: f64 = a4[header.iter().position(|h| h == "C5").unwrap()].parse().unwrap();
    assert!((c3 - 97.269).abs() <= 3.0 && (c5 - 2.731).abs() <= 3.0, "C3 {c3} C5 {c5}");
}

#[test]
fn default_output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_catsd"))
        .args(["smaa", path(&fixture("soldiers.json")), "--samples", "10", "--seed", "1"])
        .env("CATSD_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("soldiers-seed1-n10").join("manifest.json").exists());
}

#[test]
fn smaa_refuses_infeasible_decks() {
    let dir = tempfile::tempdir().unwrap();
    let o = catsd(&["smaa", path(&fixture("contradictory.json")), "--samples", "10", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("C3: infeasible"), "{}", stderr(&o));
    assert!(!dir.path().join("manifest.json").exists());
}

fn run(dir: &Path, file: &Path) {
    let o = catsd(&["smaa", path(file), "--samples", "2000", "--out", path(dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn classify_enumerates_optima() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("soldiers.json");
    run(dir.path(), &f);
    let o = catsd(&["classify", path(&f), "--dist", path(dir.path()), "--node", "g0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("L* = 300.000, 3 optimal classification(s)"), "{}", stdout(&o));
    let written: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("classification_g0.json")).unwrap()).unwrap();
    assert_eq!(written["solutions"].as_array().unwrap().len(), 3);
    assert_eq!(written["solutions"][0]["a4"][0], "C3");

    let o = catsd(&["classify", path(&f), "--dist", path(dir.path()), "--node", "MR", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 6);
    assert_eq!(v["node"], "g2");
}

#[test]
fn classify_reports_infeasible_requirements() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("soldiers.json");
    run(dir.path(), &f);
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
    doc["requirements"]["default"]["min_per_category"] = 3.into();
    doc["requirements"]["default"]["max_per_category"] = 3.into();
    let strict = dir.path().join("strict.json");
    fs::write(&strict, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = catsd(&["classify", path(&strict), "--dist", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("minimums add up to 12"), "{}", stderr(&o));
    assert!(stderr(&o).contains("different input"), "{}", stderr(&o));
}

#[test]
fn classify_unknown_node_or_missing_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("soldiers.json");
    assert_eq!(catsd(&["classify", path(&f), "--dist", path(dir.path())]).status.code(), Some(2));
    run(dir.path(), &f);
    let o = catsd(&["classify", path(&f), "--dist", path(dir.path()), "--node", "XYZ"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn slack_requirements_give_the_modal_classification() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("soldiers.json");
    run(dir.path(), &f);
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
    doc["requirements"] = serde_json::json!({ "default": { "exactly_one": true } });
    let slack = dir.path().join("slack.json");
    fs::write(&slack, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = catsd(&["classify", path(&slack), "--dist", path(dir.path()), "--node", "PoF", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // a2 and a3 tie between C2 and C4; everything else is modal.
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);
    for s in v["solutions"].as_array().unwrap() {
        assert_eq!(s["a1"][0], "C1");
        assert_eq!(s["a4"][0], "C3");
        assert_eq!(s["a7"][0], "C4");
    }
}

#[test]
fn book_sample_document_checks() {
    let md = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src/documents.md")).unwrap();
    let start = md.find("```json\n").unwrap() + "```json\n".len();
    let end = start + md[start..].find("```").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sample.json");
    fs::write(&file, &md[start..end]).unwrap();
    let o = catsd(&["check", path(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "C1: feasible, ε* = 1.000000\n");
}

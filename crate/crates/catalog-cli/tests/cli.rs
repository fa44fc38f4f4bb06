use std::fs;
use std::process::{Command, Output};

fn kodaira(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kodaira"))
        .args(["--no-cache"])
        .args(args)
        .env_remove("KODAIRA_CATALOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cct_report() {
    let o = kodaira(&["report", "cct-54"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("| G(54,5) | no |"), "{text}");
    assert!(text.contains("golden: ok"));
    assert_eq!(text, stdout(&kodaira(&["report", "cct-54"])), "output is not byte-stable");

    let csv = stdout(&kodaira(&["--format", "csv", "report", "cct-54"]));
    assert!(csv.lines().next().unwrap().starts_with("group,CCT"), "{csv}");
    assert_eq!(csv.lines().filter(|l| l.starts_with("\"G(54,")).count(), 12);

    let json: serde_json::Value = serde_json::from_str(&stdout(&kodaira(&["--format", "json", "report", "cct-54"]))).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn errors_exit_with_two() {
    let o = kodaira(&["group", "cct", "G(99,1)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown catalog label `G(99,1)`"));

    let o = kodaira(&["group", "mon", "G(64,18)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("external input required"));

    assert_eq!(kodaira(&["report", "cct-37"]).status.code(), Some(2));
    assert_eq!(kodaira(&["invariants", "--order", "64", "--b", "2", "--n", "2", "--m1", "3", "--m2", "1"]).status.code(), Some(2));
}

#[test]
fn golden_mismatch_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let src = kodaira_catalog::Catalog::default_dir();
    for f in fs::read_dir(&src).unwrap() {
        let f = f.unwrap();
        fs::copy(f.path(), dir.path().join(f.file_name())).unwrap();
    }
    let path = dir.path().join("manifest.json");
    let text = fs::read_to_string(&path).unwrap();
    let mut manifest: serde_json::Value = serde_json::from_str(&text).unwrap();
    for e in manifest["groups"].as_array_mut().unwrap() {
        if e["label"] == "G(36,10)" {
            e["annotations"]["cct"] = true.into();
        }
    }
    fs::write(&path, manifest.to_string()).unwrap();

    let o = kodaira(&["--catalog", dir.path().to_str().unwrap(), "report", "cct-36"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("G(36,10)"));
}

#[test]
fn invariants_command() {
    let text = stdout(&kodaira(&["invariants", "--order", "64", "--b", "2", "--n", "2", "--m1", "2", "--m2", "2", "--q", "6"]));
    for needle in ["| K^2 | 736 |", "| c2 | 320 |", "| sigma | 32 |", "| p_g | 93 |", "| Betti | 1/12/342/12/1 |"] {
        assert!(text.contains(needle), "{needle} missing from\n{text}");
    }
}

#[test]
fn structure_commands() {
    let text = stdout(&kodaira(&["structures", "search", "G(64,266)", "--first", "3"]));
    assert_eq!(text.lines().filter(|l| l.contains("| 2 | (32, 32) | false |")).count(), 3, "{text}");

    let text = stdout(&kodaira(&["h1", "G(32,49)", "--representative", "2"]));
    assert!(text.contains("Z^8 + (Z_2)^4"), "{text}");

    let text = stdout(&kodaira(&["structures", "lift", "G(64,264)", "--over", "G(32,49)", "--bases", "2"]));
    assert_eq!(text.lines().filter(|l| l.ends_with("| 256 | 240 |")).count(), 2, "{text}");

    let text = stdout(&kodaira(&["group", "mon", "G(54,5)"]));
    assert!(text.contains(r"| \|mon\| | 3 |"), "{text}");
}

#[test]
fn cache_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_kodaira"))
            .args(["--cache-dir", dir.path().to_str().unwrap(), "group", "aut", "G(32,50)"])
            .output()
            .unwrap()
    };
    let first = run();
    assert!(stdout(&first).contains(r"| \|Aut\| | 1920 |"));
    let files = walk(dir.path());
    assert_eq!(files.len(), 1);
    assert!(files[0].to_string_lossy().contains(kodaira_core::ENGINE_VERSION));
    assert_eq!(stdout(&run()), stdout(&first));
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

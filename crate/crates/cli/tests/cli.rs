use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hamsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamsim"))
        .args(args)
        .env_remove("HAMSIM_JOBS")
        .output()
        .expect("run hamsim")
}

fn ok(args: &[&str]) -> String {
    let out = hamsim(args);
    assert!(
        out.status.success(),
        "hamsim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = hamsim(args);
    assert!(!out.status.success(), "hamsim {args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut cells = Vec::new();
            let mut cur = String::new();
            let mut quoted = false;
            for ch in l.chars() {
                match ch {
                    '"' => quoted = !quoted,
                    ',' if !quoted => cells.push(std::mem::take(&mut cur)),
                    c => cur.push(c),
                }
            }
            cells.push(cur);
            cells
        })
        .collect()
}

fn p(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn single_pattern_config_reads_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!("layouts = [\"Ham7,4,A\"]\npatterns = [1]\nout = {:?}\nformat = \"csv\"\n", p(&out)),
    )
    .unwrap();
    ok(&["simulate", "--config", p(&cfg)]);
    let rows = read_csv(&out.join("ham7_4_a_patterns.csv"));
    assert_eq!(rows.len(), 2);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    assert_eq!(rows[1][col("dc")], "224");
    assert_eq!(rows[1][col("dnc")], "0");
    assert_eq!(rows[1][col("nd")], "32");
    assert_eq!(rows[1][col("dc_pct")], "87.5");
    assert!(!out.join("report.json").exists());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    fs::write(&cfg, "layouts = [\"Ham7,4,A\"]\nformat = \"csv\"\n").unwrap();
    ok(&["simulate", "--config", p(&cfg), "--layout", "Ham31,26", "--format", "json", "--out", p(&out)]);
    assert!(out.join("report.json").exists());
    let json = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(json.contains("Ham31,26") && !json.contains("Ham7,4,A"));
}

#[test]
fn validation_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("empty.toml");
    fs::write(&cfg, "layouts = []\n").unwrap();
    assert!(fails(&["simulate", "--config", p(&cfg), "--out", p(&out)]).contains("layouts"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "colums = 32\n").unwrap();
    assert!(fails(&["simulate", "--config", p(&bad)]).contains("bad.toml"));

    let cat = dir.path().join("short.catalog");
    fs::write(&cat, "pattern 1 0,0\n").unwrap();
    assert!(fails(&["simulate", "--catalog", p(&cat), "--out", p(&out)]).contains("short.catalog"));

    let lay = dir.path().join("broken.layout");
    fs::write(&lay, "block 3 1-6\nuncovered 7-32\n").unwrap();
    assert!(fails(&["simulate", "--layout", p(&lay), "--out", p(&out)]).contains("broken.layout"));

    assert!(fails(&["simulate", "--layout", "Ham99", "--out", p(&out)]).contains("Ham99"));
    assert!(fails(&["simulate", "--counting", "bits", "--out", p(&out)]).contains("counting"));
    assert!(fails(&["simulate", "--pattern", "37", "--out", p(&out)]).contains("37"));
    assert!(fails(&["simulate", "--cols", "16", "--out", p(&out)]).contains("columns"));
}

#[test]
fn custom_layout_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let lay = dir.path().join("halves.layout");
    fs::write(&lay, "name Halves\nblock 4 1-15\nblock 4 17-31\nuncovered 16, 32\n").unwrap();
    ok(&["simulate", "--layout", p(&lay), "--pattern", "1", "--out", p(&out), "--format", "csv"]);
    let rows = read_csv(&out.join("halves_patterns.csv"));
    assert_eq!(rows[1][4..7], ["240", "0", "16"]);
}

#[test]
fn reliability_needs_exactly_one_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert!(fails(&["reliability", "--out", p(&out)]).contains("lambda"));
    let both = fails(&[
        "reliability",
        "--lambda",
        "1e-5",
        "--calibrate",
        "Ham31,26:500:0.7143",
        "--out",
        p(&out),
    ]);
    assert!(both.contains("not both"));
    assert!(fails(&["reliability", "--calibrate", "Ham31,26:500:1.5", "--out", p(&out)]).contains("calibrat"));
    assert!(fails(&["reliability", "--lambda", "1e-5", "--t-grid", "5:1:1", "--out", p(&out)]).contains("t-grid"));
}

#[test]
fn reliability_series_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let stdout = ok(&[
        "reliability",
        "--calibrate",
        "Ham31,26:500:0.7143",
        "--t-grid",
        "0:1000:250",
        "--out",
        p(&out),
    ]);
    assert!(stdout.contains("lambda = "));
    let rows = read_csv(&out.join("reliability.csv"));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].len(), 6);
    assert!(rows[1][1..].iter().all(|v| v == "1"));
    let t500 = rows.iter().find(|r| r[0] == "500").unwrap();
    let col = rows[0].iter().position(|h| h == "Ham31,26").unwrap();
    assert!((t500[col].parse::<f64>().unwrap() - 0.7143).abs() < 1e-9);

    let tr = read_csv(&out.join("redundancy.csv"));
    let pct: Vec<&str> = tr[1..].iter().map(|r| r[3].as_str()).collect();
    assert_eq!(pct, ["42.9", "42.9", "26.7", "34.5", "16.1"]);
}

#[test]
fn report_rerenders_saved_json() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    ok(&["reliability", "--lambda", "1e-5", "--t-grid", "0:200:100", "--physical", "plain", "--out", p(&first)]);
    ok(&["report", "--input", p(&first.join("report.json")), "--out", p(&second)]);
    let mut names: Vec<_> = fs::read_dir(&first)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_str().unwrap().ends_with(".csv"))
        .collect();
    names.sort();
    assert!(names.len() > 10);
    for n in names {
        assert_eq!(fs::read(first.join(&n)).unwrap(), fs::read(second.join(&n)).unwrap(), "{n:?}");
    }
    assert!(fails(&["report", "--input", p(&dir.path().join("missing.json"))]).contains("missing.json"));
}

#[test]
fn identical_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let common = ["--physical", "extended", "--seed", "9", "--layout", "Ham15,11"];
    let mut args_a = vec!["simulate", "--jobs", "1", "--out", p(&a)];
    args_a.extend(common);
    ok(&args_a);
    let out = Command::new(env!("CARGO_BIN_EXE_hamsim"))
        .args(["simulate", "--out", p(&b)])
        .args(common)
        .env("HAMSIM_JOBS", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    for e in fs::read_dir(&a).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
    assert!(a.join("ham15_11_physical_extended.csv").exists());
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}

fn lcmeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcmeval")).args(args).output().unwrap()
}

fn copy_fixture(dst: &Path) -> String {
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dst.join(entry.file_name())).unwrap();
    }
    dst.join("campaign.conf").to_string_lossy().into_owned()
}

fn conf() -> String {
    fixture_dir().join("campaign.conf").to_string_lossy().into_owned()
}

#[test]
fn validate_reports_clean_fixture() {
    let out = lcmeval(&["validate", &conf()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["expected_rating_count"], 288);
}

#[test]
fn missing_ratings_exits_with_io_code() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = copy_fixture(tmp.path());
    fs::remove_file(tmp.path().join("ratings.csv")).unwrap();
    let out = lcmeval(&["validate", &conf]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ratings.csv"));
}

#[test]
fn bad_ratio_exits_with_data_code() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = copy_fixture(tmp.path());
    let ratings = tmp.path().join("ratings.csv");
    let text = fs::read_to_string(&ratings).unwrap().replacen(",0.5,", ",0.7,", 1);
    fs::write(&ratings, text).unwrap();
    let out = lcmeval(&["qc", &conf, "-o", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.7"));
}

#[test]
fn subcommands_write_their_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let fast = ["--hybrids", "100", "--permutations", "100", "--bootstrap", "100"];
    let runs: [&[&str]; 5] = [
        &["qc", &conf(), "-o", dir],
        &["normalize", &conf(), "-o", dir],
        &["score", &conf(), "--task", "en-zh@0.8", "-o", dir],
        &["correlate", &conf(), "--level", "segment", "-o", dir],
        &["significance", &conf(), "--level", "segment", "--format", "csv", "--task", "zh-en@0.5", "-o", dir],
    ];
    for args in runs {
        let out = lcmeval(&[args, &fast].concat());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for name in [
        "qc_timing.csv",
        "qc_traps.csv",
        "agreement.csv",
        "human_scores.csv",
        "native_scores_en-zh_0.8.tsv",
        "native_system_scores.csv",
        "correlations_segment.csv",
        "variant_selection.csv",
        "sig_segment_zh-en_0.5.csv",
    ] {
        assert!(tmp.path().join(name).is_file(), "{name} missing");
    }

    let sig = tmp.path().join("sig_segment_zh-en_0.5.csv");
    let rendered = tmp.path().join("rendered");
    let out = lcmeval(&["report", sig.to_str().unwrap(), "--format", "textgrid", "-o", rendered.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = fs::read_to_string(rendered.join("sig_segment_zh-en_0.5.txt")).unwrap();
    assert!(grid.starts_with("# zh-en@0.5 segment\n"));
}

#[test]
fn unknown_format_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lcmeval(&["significance", &conf(), "--format", "pdf", "-o", tmp.path().to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn traps_writes_one_line_per_trap() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("traps.jsonl");
    let out = lcmeval(&["traps", &conf(), "--per-annotator", "4", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = fs::read_to_string(&path).unwrap().lines().count();
    assert_eq!(lines, 4 * 3 * 4);
}

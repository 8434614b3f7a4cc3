use std::path::PathBuf;
use std::process::{Command, Output};

fn tilingforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilingforge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tilingforge-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn derive_text_and_json() {
    let o = tilingforge(&["derive", "-M", "1,1,1,0", "-l", "-1,1", "-s", "-1/2,1", "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "a₁→b₁a₁, a₂→a₂b₂, b₁→a₂, b₂→a₁");
    let o = tilingforge(&["derive", "-M", "1,1,1,0", "-l", "-1,1", "-s", "-1/2,1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["words"]["a1"], serde_json::json!(["b1", "a1"]));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| tilingforge(args).status.code().unwrap();
    assert_eq!(code(&["derive", "-M", "1,1,1,0", "-l", "-1,1", "-s", "0,0"]), 3);
    assert_eq!(code(&["derive", "-M", "1,1,0,1", "-l", "-1,1", "-s", "0,0"]), 2);
    assert_eq!(code(&["derive", "-M", "x", "-l", "-1,1", "-s", "0,0"]), 2);
    assert_eq!(code(&["table1"]), 0);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn out_file_matches_stdout() {
    let dir = scratch_dir("out");
    let path = dir.join("rule.json");
    let args = ["derive", "-M", "2,1,1,1", "-l", "-2,2", "-s", "-1,0"];
    let direct = stdout(&tilingforge(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let o = tilingforge(&with_out);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn analyze_reports_case_name() {
    let o = tilingforge(&["analyze", "-M", "2,1,1,1", "-l", "-2,2", "-s", "-1,0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["locality"]["verdict"], "local");
    assert_eq!(v["locality"]["case"], "l∈Z², s∈Z²");
    assert!(v["locality"]["cases"].as_array().unwrap().contains(&serde_json::json!("l−Ml∈Z², s∈Z²")));
}

#[test]
fn fixed_counts() {
    let o = tilingforge(&["fixed", "-M", "2,1,1,1", "-l", "-2,2", "-s", "-1,0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 2);
    assert_eq!(v["det_m_minus_i"], 1);
    let o = tilingforge(&["fixed", "-M", "1,1,1,0", "-l", "-1,1", "-s", "-1,1", "--half-line", "--format", "text"]);
    assert_eq!(stdout(&o).lines().next(), Some("fixed tilings: 1"));
}

#[test]
fn iet_from_tiling_renormalizes() {
    let o = tilingforge(&["iet", "-M", "2,1,1,1", "-l", "-2,2", "-s", "-1,0", "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "a1→ca1, a2→a1ba2, b→c, c→ca1ba2");
}

#[test]
fn render_writes_svg() {
    for what in ["staircase", "partition", "patch"] {
        let o = tilingforge(&["render", "-M", "1,1,1,0", "-l", "-1,1", "-s", "-1/2,1", "--what", what]);
        assert!(o.status.success(), "{what}");
        let svg = stdout(&o);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"), "{what}");
    }
}

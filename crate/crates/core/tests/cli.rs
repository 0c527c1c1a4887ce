//! End-to-end runs of the `syndemic` binary.

use std::path::Path;
use std::process::{Command, Output};

fn syndemic(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syndemic"))
        .args(args)
        .env("SYNDEMIC_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = syndemic(
        &["simulate", "--beta1", "6", "--beta2", "0.1", "--out", "ignored"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,S,L_T,I_T,R_T,I_H,A,L_TH,I_TH,R_TH,A_T,N");
    assert_eq!(lines.count(), 241);
    let svg = std::fs::read_to_string(dir.path().join("trajectory.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 10);
    assert!(!Path::new("ignored").exists());
}

#[test]
fn table2_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = syndemic(&["scenario", "--name", "table2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(dir.path().join("table2_table.csv")).unwrap();
    assert!(table.starts_with("beta1,R1,I_T,residual\n"));
    assert_eq!(table.lines().count(), 7);
    let summary = std::fs::read_to_string(dir.path().join("table2_summary.csv")).unwrap();
    assert!(summary.starts_with(syndemic::scenarios::SUMMARY_HEADER));
    assert!(!summary.contains("FAIL"));
}

#[test]
fn failing_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = syndemic(&["scenario", "--name", "table3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn coinfection_scenario_writes_every_arm() {
    let dir = tempfile::tempdir().unwrap();
    let o = syndemic(&["scenario", "--name", "treatment-coinfection"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for arm in [
        "with-treatment",
        "without-treatment-minimal",
        "without-treatment-alternative",
    ] {
        let path = dir.path().join(format!("treatment-coinfection__{arm}_deaths-off.csv"));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 242, "{}", path.display());
    }
}

#[test]
fn queries_print_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = syndemic(&["r0", "--beta1", "6", "--beta2", "0.1", "--nref", "dfe"], dir.path());
    let s = stdout(&o);
    assert!(s.contains("R1 = 1.39239") && s.contains("R2 = 1.83666"), "{s}");

    let o = syndemic(&["stability", "--bifurcation"], dir.path());
    let s = stdout(&o);
    assert!(s.contains("beta* = 0.0544465") && s.contains("forward"), "{s}");

    let o = syndemic(
        &["stability", "--beta1", "2.7", "--beta2", "0.03", "--at", "dfe"],
        dir.path(),
    );
    assert!(stdout(&o).contains("classification = stable"));

    let o = syndemic(
        &["sweep", "--beta1", "6", "--param", "beta2", "--values", "0:0.1:3"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn config_file_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "beta1 = 6\nbeta2 = 0.1\n").unwrap();
    let o = syndemic(
        &["equilibrium", "--kind", "dfe", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));

    std::fs::write(&cfg, "beta1 = 6\nbogus = 1\n").unwrap();
    let o = syndemic(&["r0", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(syndemic(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(syndemic(&["r0"], dir.path()).status.code(), Some(2));
}

use std::process::{Command, Output};

fn singulab(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singulab"))
        .args(args)
        .current_dir(dir)
        .env_remove("SINGULAB_THREADS")
        .output()
        .unwrap()
}

#[test]
fn inline_run_writes_reports_and_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = singulab(
        &["zeros", "-m", "1", "-d", "16", "-d", "64", "-d", "256", "--trials", "5", "--out", "r"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("log-log slope"));
    let csv = std::fs::read_to_string(dir.path().join("r/zeros.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    assert!(dir.path().join("r/zeros.json").exists());
}

#[test]
fn same_seed_gives_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = singulab(&["crit", "-d", "6", "--trials", "4", "--seed", "9", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |p: &str| std::fs::read_to_string(dir.path().join(p).join("crit.csv")).unwrap();
    let strip = |t: String| t.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(read("a")), strip(read("b")));
}

#[test]
fn report_rebuilds_summaries_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = singulab(&["knot", "-d", "12", "--trials", "3", "--out", "r"], dir.path());
    assert_eq!(run.status.code(), Some(0));
    let rep = singulab(&["report", "r/knot.csv", "--out", "s"], dir.path());
    assert_eq!(rep.status.code(), Some(0));
    assert!(dir.path().join("s/knot.json").exists());
    assert!(dir.path().join("s/knot.svg").exists());
}

#[test]
fn config_errors_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "experiment = zeros\ntrials = 0\nd = 8\n").unwrap();
    let o = singulab(&["zeros", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2"));
    std::fs::write(dir.path().join("crit.cfg"), "experiment = crit\ntrials = 2\nd = 5\n").unwrap();
    assert_eq!(singulab(&["zeros", "--config", "crit.cfg"], dir.path()).status.code(), Some(3));
    assert_eq!(singulab(&["zeros", "--bogus"], dir.path()).status.code(), Some(3));
    assert_eq!(singulab(&["verify", "--criterion", "14"], dir.path()).status.code(), Some(3));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# coupled gaps\nexperiment = coupled\nid = gaps\nm = 2\nd = 8\ntrials = 3\nformat = json\nout = o\n",
    )
    .unwrap();
    let o = singulab(&["coupled", "--config", "run.cfg", "--threads", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("o/gaps.json").exists());
    assert!(!dir.path().join("o/gaps.csv").exists());
}

#[test]
fn verify_runs_a_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = singulab(&["verify", "--criterion", "8"], dir.path());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("criterion  8 PASS"), "{stdout}");
    assert_eq!(o.status.code(), Some(0));
}
